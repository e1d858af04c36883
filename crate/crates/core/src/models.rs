//! Hamiltonians and sweep parametrizations.
//!
//! Frequencies are angular (rad/s). The NV control term is `+1/2 H.sigma` on
//! the `{|0>, |-1>}` electronic qubit; the hyperfine term is `1/2 A_par sz Iz`,
//! so nuclear sector `m` sees an effective field `H + m A_par z` and hosts its
//! degeneracy at `H = (0, 0, -m A_par)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, kron_all, spin_op, ComplexMatrix, SpinOp};

/// Hyperfine coupling `A_par / 2pi` in Hz.
pub const DEFAULT_A_PAR_HZ: f64 = 2.2e6;

/// Converts an ordinary frequency in Hz to rad/s.
pub fn hz_to_rad(hz: f64) -> f64 {
    2.0 * PI * hz
}

/// Cartesian Larmor vector `(Hx, Hy, Hz)` in rad/s.
pub type FieldVector = [f64; 3];

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive and finite, got {value}")))
    }
}

/// Hemispherical north-to-south sweep of the Larmor vector:
/// `H(t) = (W1 sin th cos phi0, W1 sin th sin phi0, D1 cos th + D2)` with
/// `th = pi t / T_ramp`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LarmorSweep {
    omega1: f64,
    delta1: f64,
    delta2: f64,
    t_ramp: f64,
    phi0: f64,
}

impl LarmorSweep {
    pub fn new(omega1: f64, delta1: f64, delta2: f64, t_ramp: f64) -> Result<Self> {
        require_positive("omega1", omega1)?;
        require_positive("t_ramp", t_ramp)?;
        if (omega1 - delta1).abs() > 1e-12 * omega1 {
            return Err(Error::invalid(
                "delta1",
                format!("sphere constraint requires delta1 = omega1 ({omega1}), got {delta1}"),
            ));
        }
        if !delta2.is_finite() {
            return Err(Error::invalid("delta2", "must be finite"));
        }
        Ok(Self {
            omega1,
            delta1,
            delta2,
            t_ramp,
            phi0: 0.0,
        })
    }

    /// Sphere of radius `radius` centered at `(0, 0, offset)`.
    pub fn sphere(radius: f64, offset: f64, t_ramp: f64) -> Result<Self> {
        Self::new(radius, radius, offset, t_ramp)
    }

    pub fn with_phi0(mut self, phi0: f64) -> Self {
        self.phi0 = phi0;
        self
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    pub fn delta2(&self) -> f64 {
        self.delta2
    }

    pub fn t_ramp(&self) -> f64 {
        self.t_ramp
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    /// Constant polar angular velocity `pi / T_ramp`.
    pub fn v_theta(&self) -> f64 {
        PI / self.t_ramp
    }

    pub fn theta_of_t(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * self.t_ramp;
        if !(t >= -slack && t <= self.t_ramp + slack) {
            return Err(Error::invalid(
                "t",
                format!("must lie in [0, {}], got {t}", self.t_ramp),
            ));
        }
        Ok(PI * t.clamp(0.0, self.t_ramp) / self.t_ramp)
    }

    pub fn larmor_vector(&self, t: f64) -> Result<FieldVector> {
        Ok(self.larmor_vector_at_theta(self.theta_of_t(t)?))
    }

    pub fn larmor_vector_at_theta(&self, theta: f64) -> FieldVector {
        self.field_at(theta, self.phi0)
    }

    /// Field on the full sweep sphere at `(theta, phi)`.
    pub fn field_at(&self, theta: f64, phi: f64) -> FieldVector {
        let (s, c) = theta.sin_cos();
        [
            self.omega1 * s * phi.cos(),
            self.omega1 * s * phi.sin(),
            self.delta1 * c + self.delta2,
        ]
    }

    pub fn alpha(&self) -> f64 {
        alpha_of(self)
    }
}

/// Adiabaticity parameter `alpha = W1 T_ramp / 2pi`.
pub fn alpha_of(sweep: &LarmorSweep) -> f64 {
    sweep.omega1 * sweep.t_ramp / (2.0 * PI)
}

/// Inverse of [`alpha_of`]: the ramp time giving `alpha` at Rabi amplitude `omega1`.
pub fn ramp_time_for_alpha(alpha: f64, omega1: f64) -> Result<f64> {
    require_positive("alpha", alpha)?;
    require_positive("omega1", omega1)?;
    Ok(2.0 * PI * alpha / omega1)
}

/// Nuclear spin projection `m` of the host 14N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NuclearProjection {
    Minus,
    Zero,
    Plus,
}

impl NuclearProjection {
    pub const ALL: [NuclearProjection; 3] = [Self::Minus, Self::Zero, Self::Plus];

    pub fn m(self) -> i8 {
        match self {
            Self::Minus => -1,
            Self::Zero => 0,
            Self::Plus => 1,
        }
    }

    pub fn from_m(m: i64) -> Result<Self> {
        match m {
            -1 => Ok(Self::Minus),
            0 => Ok(Self::Zero),
            1 => Ok(Self::Plus),
            _ => Err(Error::invalid("m", format!("nuclear projection must be -1, 0 or +1, got {m}"))),
        }
    }

    /// Row of this projection in the `Iz = diag(+1, 0, -1)` basis.
    pub fn nuclear_index(self) -> usize {
        match self {
            Self::Plus => 0,
            Self::Zero => 1,
            Self::Minus => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Minus => "m-1",
            Self::Zero => "m0",
            Self::Plus => "m+1",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub projection: NuclearProjection,
    pub weight: f64,
}

/// NV electronic qubit with longitudinal hyperfine coupling to the 14N spin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NVModel {
    a_par: f64,
    sectors: Vec<Sector>,
}

impl NVModel {
    /// All three nuclear sectors with unit weight.
    pub fn new(a_par: f64) -> Result<Self> {
        Self::with_sectors(a_par, &NuclearProjection::ALL, &[1.0; 3])
    }

    pub fn from_hz(a_par_hz: f64) -> Result<Self> {
        Self::new(hz_to_rad(a_par_hz))
    }

    pub fn with_sectors(a_par: f64, labels: &[NuclearProjection], weights: &[f64]) -> Result<Self> {
        require_positive("a_par", a_par)?;
        if labels.is_empty() {
            return Err(Error::invalid("sector_labels", "at least one sector is required"));
        }
        if labels.len() != weights.len() {
            return Err(Error::invalid(
                "sector_weights",
                format!("{} weights for {} sectors", weights.len(), labels.len()),
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::invalid("sector_weights", format!("weights must be >= 0, got {w}")));
        }
        let mut seen = labels.to_vec();
        seen.sort();
        seen.dedup();
        if seen.len() != labels.len() {
            return Err(Error::invalid("sector_labels", "duplicate nuclear projection"));
        }
        let sectors = labels
            .iter()
            .zip(weights)
            .map(|(&projection, &weight)| Sector { projection, weight })
            .collect();
        Ok(Self { a_par, sectors })
    }

    /// A single unit-weight sector; with `m = 0` this is one monopole at the origin.
    pub fn single_sector(a_par: f64, projection: NuclearProjection) -> Result<Self> {
        Self::with_sectors(a_par, &[projection], &[1.0])
    }

    pub fn a_par(&self) -> f64 {
        self.a_par
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// Degeneracy position of sector `m` on the z axis, in rad/s.
    pub fn monopole_z(&self, projection: NuclearProjection) -> f64 {
        -f64::from(projection.m()) * self.a_par
    }
}

/// `1/2 [(Hz + m A) sz + Hx sx + Hy sy]`: the block of sector `m`.
pub fn nv_sector_hamiltonian(model: &NVModel, projection: NuclearProjection, h: FieldVector) -> ComplexMatrix {
    let hz = h[2] + f64::from(projection.m()) * model.a_par;
    qubit_hamiltonian([h[0], h[1], hz], 0.5)
}

/// `prefactor * (bx sx + by sy + bz sz)` as an explicit 2x2 matrix.
pub(crate) fn qubit_hamiltonian(b: FieldVector, prefactor: f64) -> ComplexMatrix {
    let [bx, by, bz] = b.map(|x| x * prefactor);
    let off = Complex64::new(bx, -by);
    ComplexMatrix::from_rows(
        2,
        &[Complex64::new(bz, 0.0), off, off.conj(), Complex64::new(-bz, 0.0)],
    )
    .expect("2x2 layout")
}

/// Full 6x6 electron-nuclear Hamiltonian `1/2 A (sz x Iz) + 1/2 (H.sigma) x I3`.
///
/// Basis index is `3 e + n` with `e = 0` for `|0>` and `n` the row of `Iz`.
pub fn nv_full_hamiltonian(model: &NVModel, h: FieldVector) -> ComplexMatrix {
    let hyperfine = kron(&spin_op(SpinOp::PauliZ), &spin_op(SpinOp::Spin1Z)).scale(0.5 * model.a_par);
    let control = kron(&qubit_hamiltonian(h, 0.5), &spin_op(SpinOp::Identity3));
    &hyperfine + &control
}

/// Basis indices of the 2x2 block of sector `m` inside the 6x6 Hamiltonian.
pub fn nv_sector_indices(projection: NuclearProjection) -> [usize; 2] {
    let n = projection.nuclear_index();
    [n, 3 + n]
}

/// Open three-qubit XY chain in a common field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeQubitModel {
    g: f64,
    h0_prime: f64,
    h_r_prime: f64,
}

impl ThreeQubitModel {
    pub fn new(g: f64, h0_prime: f64, h_r_prime: f64) -> Result<Self> {
        require_positive("h_r_prime", h_r_prime)?;
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::invalid("g", format!("must be >= 0, got {g}")));
        }
        if !h0_prime.is_finite() {
            return Err(Error::invalid("h0_prime", "must be finite"));
        }
        Ok(Self { g, h0_prime, h_r_prime })
    }

    /// Model from normalized coordinates `g' = g / H'_r`, `H'_0 = H0 / H'_r`.
    pub fn from_normalized(p: ProjectedPoint, h_r_prime: f64) -> Result<Self> {
        Self::new(p.g_tilde_prime * h_r_prime, p.h0_tilde_prime * h_r_prime, h_r_prime)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn h0_prime(&self) -> f64 {
        self.h0_prime
    }

    pub fn h_r_prime(&self) -> f64 {
        self.h_r_prime
    }

    pub fn normalized(&self) -> ProjectedPoint {
        ProjectedPoint {
            g_tilde_prime: self.g / self.h_r_prime,
            h0_tilde_prime: self.h0_prime / self.h_r_prime,
        }
    }

    /// Sweep sphere of radius `H'_r` centered on the origin.
    pub fn sweep(&self, alpha: f64) -> Result<LarmorSweep> {
        LarmorSweep::sphere(self.h_r_prime, 0.0, ramp_time_for_alpha(alpha, self.h_r_prime)?)
    }
}

/// Pauli operator `kind` acting on qubit `site` (0-based, qubit 1 most significant).
pub fn qubit_op(kind: SpinOp, site: usize, n_qubits: usize) -> ComplexMatrix {
    assert!(site < n_qubits);
    let op = spin_op(kind);
    let id = spin_op(SpinOp::Identity2);
    let factors: Vec<&ComplexMatrix> = (0..n_qubits).map(|k| if k == site { &op } else { &id }).collect();
    kron_all(&factors)
}

/// `-1/2 [ sum_i H.sigma_i + H'0 s1z + 1/2 H'0 s2z
///        - g (s1x s2x + s1y s2y) - g (s2x s3x + s2y s3y) ]`.
pub fn three_qubit_hamiltonian(model: &ThreeQubitModel, h: FieldVector) -> ComplexMatrix {
    let ops = |site| {
        [
            qubit_op(SpinOp::PauliX, site, 3),
            qubit_op(SpinOp::PauliY, site, 3),
            qubit_op(SpinOp::PauliZ, site, 3),
        ]
    };
    let sites = [ops(0), ops(1), ops(2)];
    let mut inner = ComplexMatrix::zeros(8);
    for s in &sites {
        for (axis, op) in s.iter().enumerate() {
            inner = &inner + &op.scale(h[axis]);
        }
    }
    inner = &inner + &sites[0][2].scale(model.h0_prime);
    inner = &inner + &sites[1][2].scale(0.5 * model.h0_prime);
    for (a, b) in [(0, 1), (1, 2)] {
        let xx = &sites[a][0] * &sites[b][0];
        let yy = &sites[a][1] * &sites[b][1];
        inner = &inner - &(&xx + &yy).scale(model.g);
    }
    inner.scale(-0.5)
}

/// Sphere coordinates normalized by `A_par`: radius `H_r / A` and offset `H_0 / A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedPoint {
    pub h_r_tilde: f64,
    pub h_0_tilde: f64,
}

impl NormalizedPoint {
    pub fn new(h_r_tilde: f64, h_0_tilde: f64) -> Result<Self> {
        require_positive("h_r_tilde", h_r_tilde)?;
        if !h_0_tilde.is_finite() {
            return Err(Error::invalid("h_0_tilde", "must be finite"));
        }
        Ok(Self { h_r_tilde, h_0_tilde })
    }
}

/// Normalized three-qubit coordinates `(g', H'_0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectedPoint {
    pub g_tilde_prime: f64,
    pub h0_tilde_prime: f64,
}

/// Maps an NV sphere onto the three-qubit chain:
/// `g' = sqrt(1 - s^2) / (2 H_r)`, `H'_0 = s / H_r` with `s = 1 - |1 - 2 H_0|`.
pub fn project_to_three_qubit(p: NormalizedPoint) -> Result<ProjectedPoint> {
    if p.h_r_tilde.is_nan() || p.h_r_tilde <= 0.0 {
        return Err(Error::invalid("h_r_tilde", format!("must be positive, got {}", p.h_r_tilde)));
    }
    let s = 1.0 - (1.0 - 2.0 * p.h_0_tilde).abs();
    let radicand = 1.0 - s * s;
    if radicand.is_nan() || radicand < 0.0 {
        return Err(Error::ProjectionDomain {
            h0_tilde: p.h_0_tilde,
            radicand,
        });
    }
    Ok(ProjectedPoint {
        g_tilde_prime: radicand.sqrt() / (2.0 * p.h_r_tilde),
        h0_tilde_prime: s / p.h_r_tilde,
    })
}

/// Sweep realizing the normalized sphere: `W1 = D1 = H_r A`, `D2 = H_0 A`.
pub fn sweep_from_normalized(p: NormalizedPoint, alpha: f64, a_par: f64) -> Result<LarmorSweep> {
    require_positive("a_par", a_par)?;
    let omega1 = p.h_r_tilde * a_par;
    LarmorSweep::sphere(omega1, p.h_0_tilde * a_par, ramp_time_for_alpha(alpha, omega1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigh;
    use std::f64::consts::SQRT_2;

    const A: f64 = 2.0 * PI * 2.2e6;

    fn sweep(omega: f64, d2: f64, t: f64) -> LarmorSweep {
        LarmorSweep::new(omega, omega, d2, t).unwrap()
    }

    #[test]
    fn theta_endpoints() {
        let s = sweep(1.0, 0.0, 4.0);
        assert_eq!(s.theta_of_t(0.0).unwrap(), 0.0);
        assert_eq!(s.theta_of_t(4.0).unwrap(), PI);
        assert_eq!(s.theta_of_t(2.0).unwrap(), PI / 2.0);
        assert!(s.theta_of_t(4.1).is_err());
        assert!(s.theta_of_t(-0.1).is_err());
        assert_eq!(s.v_theta(), PI / 4.0);
    }

    #[test]
    fn larmor_vector_poles_and_equator() {
        let s = sweep(1.0, 0.23, 2.0);
        assert_eq!(s.larmor_vector(0.0).unwrap(), [0.0, 0.0, 1.23]);
        let south = s.larmor_vector(2.0).unwrap();
        assert!(south[0].abs() < 1e-15 && (south[2] - (-1.0 + 0.23)).abs() < 1e-15);
        let eq = s.larmor_vector(1.0).unwrap();
        assert!((eq[0] - 1.0).abs() < 1e-15);
        assert_eq!(eq[1], 0.0);
        assert!((eq[2] - 0.23).abs() < 1e-15);
    }

    #[test]
    fn sweep_rejects_unequal_amplitudes() {
        assert!(LarmorSweep::new(1.0, 1.1, 0.0, 1.0).is_err());
        assert!(LarmorSweep::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(LarmorSweep::new(1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn alpha_round_trip() {
        let t = ramp_time_for_alpha(2.0, A).unwrap();
        assert!((t - 2.0 / 2.2e6).abs() < 1e-12 * t);
        let t10 = ramp_time_for_alpha(10.0, A).unwrap();
        assert!((t10 - 4.545_454_545e-6).abs() < 1e-14);
        assert_eq!(alpha_of(&sweep(2.0 * PI, 0.0, 1.0)), 1.0);
        let s = sweep(A, 0.0, t);
        let back = ramp_time_for_alpha(alpha_of(&s), s.omega1()).unwrap();
        assert!((back - t).abs() <= 1e-12 * t);
        assert!(ramp_time_for_alpha(0.0, A).is_err());
        assert!(ramp_time_for_alpha(1.0, -A).is_err());
    }

    #[test]
    fn sector_hamiltonian_degeneracies() {
        let model = NVModel::new(A).unwrap();
        let zero = ComplexMatrix::zeros(2);
        assert_eq!(nv_sector_hamiltonian(&model, NuclearProjection::Zero, [0.0; 3]), zero);
        let h = nv_sector_hamiltonian(&model, NuclearProjection::Plus, [0.0, 0.0, -A]);
        assert!(h.max_abs() < 1e-6);

        let (om, de) = (3.0, 4.0);
        let h = nv_sector_hamiltonian(&model, NuclearProjection::Zero, [om, 0.0, de]);
        let expected = (&spin_op(SpinOp::PauliZ).scale(de) + &spin_op(SpinOp::PauliX).scale(om)).scale(0.5);
        assert!(h.max_abs_diff(&expected) < 1e-15);
        let eig = eigh(&h).unwrap();
        assert!((eig.eigenvalues[0] + 2.5).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 2.5).abs() < 1e-14);
    }

    #[test]
    fn full_hamiltonian_at_zero_field() {
        let model = NVModel::new(A).unwrap();
        let h = nv_full_hamiltonian(&model, [0.0; 3]);
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, -1.0, -1.0, 0.0, 1.0]).scale(0.5 * A);
        assert!(h.max_abs_diff(&expected) < 1e-6);
    }

    #[test]
    fn full_hamiltonian_blocks_match_sectors() {
        let model = NVModel::new(A).unwrap();
        let field = [0.3 * A, -0.2 * A, 0.7 * A];
        let full = nv_full_hamiltonian(&model, field);
        for p in NuclearProjection::ALL {
            let block = full.block(&nv_sector_indices(p));
            assert!(block.max_abs_diff(&nv_sector_hamiltonian(&model, p, field)) < 1e-12 * A);
        }
        // Off-block couplings vanish: Iz is conserved.
        for r in 0..6 {
            for c in 0..6 {
                if r % 3 != c % 3 {
                    assert_eq!(full.get(r, c), Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn full_spectrum_contains_degenerate_sector_at_plus_a() {
        // At Hz = +A the m = -1 sector block vanishes.
        let model = NVModel::new(1.0).unwrap();
        let eig = eigh(&nv_full_hamiltonian(&model, [0.0, 0.0, 1.0])).unwrap();
        let zeros = eig.eigenvalues.iter().filter(|l| l.abs() < 1e-12).count();
        assert_eq!(zeros, 2);
        let block = nv_sector_hamiltonian(&model, NuclearProjection::Minus, [0.0, 0.0, 1.0]);
        assert_eq!(eigh(&block).unwrap().ground_gap(), 0.0);
    }

    #[test]
    fn three_qubit_free_spectrum() {
        let h_val = 2.0;
        let model = ThreeQubitModel::new(0.0, 0.0, 1.0).unwrap();
        let eig = eigh(&three_qubit_hamiltonian(&model, [0.0, 0.0, h_val])).unwrap();
        let expected = [-3.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 3.0].map(|x| x * h_val / 2.0);
        for (l, e) in eig.eigenvalues.iter().zip(expected) {
            assert!((l - e).abs() < 1e-12, "{:?}", eig.eigenvalues);
        }
    }

    #[test]
    fn three_qubit_offset_cancellation_degenerates_ground() {
        let h0 = 0.8;
        let model = ThreeQubitModel::new(0.0, h0, 1.0).unwrap();
        let eig = eigh(&three_qubit_hamiltonian(&model, [0.0, 0.0, -h0])).unwrap();
        assert!(eig.ground_gap() < 1e-12);
    }

    #[test]
    fn three_qubit_xy_chain_gap_closings() {
        // Single-excitation energies of the open 3-site chain are {0, +-sqrt2 g}.
        let g = 0.5;
        let model = ThreeQubitModel::new(g, 0.0, 1.0).unwrap();
        let gap = |hz: f64| eigh(&three_qubit_hamiltonian(&model, [0.0, 0.0, hz])).unwrap().ground_gap();
        assert!(gap(0.0) < 1e-12);
        assert!(gap(SQRT_2 * g) < 1e-12);
        assert!(gap(-SQRT_2 * g) < 1e-12);
        assert!(gap(0.5 * SQRT_2 * g) > 0.1);
        assert!(gap(1.5) > 0.1);
    }

    #[test]
    fn three_qubit_is_hermitian_with_transverse_field() {
        let model = ThreeQubitModel::new(0.3, 0.4, 1.0).unwrap();
        let h = three_qubit_hamiltonian(&model, [0.2, -0.7, 0.1]);
        assert!(h.hermitian_asymmetry() < 1e-15);
    }

    #[test]
    fn projection_examples() {
        let p = project_to_three_qubit(NormalizedPoint::new(1.0, 0.0).unwrap()).unwrap();
        assert_eq!((p.g_tilde_prime, p.h0_tilde_prime), (0.5, 0.0));
        let p = project_to_three_qubit(NormalizedPoint::new(2.0, 0.5).unwrap()).unwrap();
        assert_eq!((p.g_tilde_prime, p.h0_tilde_prime), (0.0, 0.5));
        let p = project_to_three_qubit(NormalizedPoint::new(1.0, 0.25).unwrap()).unwrap();
        assert!((p.g_tilde_prime - 0.75_f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((p.g_tilde_prime - 0.4330).abs() < 1e-4);
        assert_eq!(p.h0_tilde_prime, 0.5);
    }

    #[test]
    fn projection_domain_error() {
        match project_to_three_qubit(NormalizedPoint { h_r_tilde: 1.0, h_0_tilde: 1.6 }) {
            Err(Error::ProjectionDomain { radicand, .. }) => assert!(radicand < 0.0),
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(project_to_three_qubit(NormalizedPoint { h_r_tilde: 1.0, h_0_tilde: -0.6 }).is_err());
        assert!(project_to_three_qubit(NormalizedPoint { h_r_tilde: 1.0, h_0_tilde: 1.5 }).is_ok());
    }

    #[test]
    fn sweep_from_fig2a_parameters() {
        let p = NormalizedPoint::new(0.2, 0.23).unwrap();
        let s = sweep_from_normalized(p, 2.0, A).unwrap();
        assert!((s.omega1() - 2.0 * PI * 0.44e6).abs() < 1e-6);
        assert_eq!(s.omega1(), s.delta1());
        assert!((s.delta2() - 2.0 * PI * 0.506e6).abs() < 1e-6);
        assert!((s.alpha() - 2.0).abs() < 1e-12 * 2.0);
        let eq = s.larmor_vector_at_theta(PI / 2.0);
        assert!((eq[0] - 0.2 * A).abs() < 1e-6);

        let unit = sweep_from_normalized(NormalizedPoint::new(1.0, 0.0).unwrap(), 1.0, A).unwrap();
        assert!((unit.t_ramp() - 1.0 / 2.2e6).abs() < 1e-12 * unit.t_ramp());
    }

    #[test]
    fn nv_model_validation() {
        assert!(NVModel::new(0.0).is_err());
        assert!(NVModel::with_sectors(1.0, &[NuclearProjection::Zero], &[-1.0]).is_err());
        assert!(NVModel::with_sectors(1.0, &[NuclearProjection::Zero; 2], &[1.0, 1.0]).is_err());
        assert!(NuclearProjection::from_m(2).is_err());
        let m = NVModel::new(A).unwrap();
        assert_eq!(m.sectors().len(), 3);
        assert!(m.sectors().iter().all(|s| s.weight == 1.0));
        assert_eq!(m.monopole_z(NuclearProjection::Plus), -A);
    }
}
