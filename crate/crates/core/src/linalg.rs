//! Small dense complex linear algebra.
//!
//! Everything here works in natural units (hbar = 1): Hamiltonian entries are
//! angular frequencies and `exp(-i dt H)` is dimensionless.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance used for Hermiticity, normalization and expectation checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self(DMatrix::identity(dim, dim))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self(DMatrix::from_row_slice(dim, dim, entries)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (k, &d) in diag.iter().enumerate() {
            m.0[(k, k)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.0[(row, col)] = value;
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.scale(factor))
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |H - H^dagger|` over entries.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.0[(r, c)] - self.0[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Checks Hermiticity within `HERMITIAN_TOL`, scaled by the matrix magnitude
    /// when entries exceed unity (Hamiltonians here are in rad/s).
    pub fn check_hermitian(&self) -> Result<()> {
        let asymmetry = self.hermitian_asymmetry();
        if asymmetry > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(())
    }

    /// Extracts the sub-matrix on the given basis indices.
    pub fn block(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), |r, c| self.0[(indices[r], indices[c])])
    }

    pub fn apply(&self, psi: &StateVector) -> Result<DVector<Complex64>> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        Ok(&self.0 * &psi.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

/// Unit-norm state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(DVector<Complex64>);

impl StateVector {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if v.is_empty() || (norm - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(v))
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if v.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(v / Complex64::new(norm, 0.0)))
    }

    /// Computational basis state `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut v = DVector::zeros(dim);
        v[k] = ONE;
        Self(v)
    }

    pub(crate) fn from_unit_column(v: DVector<Complex64>) -> Self {
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.dotc(&other.0)
    }

    /// Tensor product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// Replaces the state by `u |psi>`; `u` must be unitary.
    pub fn evolve(&mut self, u: &ComplexMatrix) {
        self.0 = &u.0 * &self.0;
    }

    /// Bloch vector `(<sx>, <sy>, <sz>)` of a two-level state, with `|0>` the
    /// `+1` eigenstate of `sz`.
    pub fn bloch(&self) -> [f64; 3] {
        debug_assert_eq!(self.dim(), 2);
        let a = self.0[0];
        let b = self.0[1];
        let coherence = a.conj() * b;
        [
            2.0 * coherence.re,
            2.0 * coherence.im,
            a.norm_sqr() - b.norm_sqr(),
        ]
    }
}

/// Hermitian eigensystem with ascending eigenvalues and orthonormal columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// The `k`-th eigenvector (ascending order) as a state.
    pub fn eigenvector(&self, k: usize) -> StateVector {
        StateVector::from_unit_column(self.eigenvectors.0.column(k).into_owned())
    }

    pub fn ground_state(&self) -> StateVector {
        self.eigenvector(0)
    }

    /// `lambda_1 - lambda_0`, or 0 for one-dimensional systems.
    pub fn ground_gap(&self) -> f64 {
        if self.dim() < 2 {
            0.0
        } else {
            self.eigenvalues[1] - self.eigenvalues[0]
        }
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| Complex64::new(l, 0.0))
    }

    /// `V diag(f(lambda)) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let v = &self.eigenvectors.0;
        let mut scaled = v.clone();
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            let factor = f(l);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= factor;
            }
        }
        ComplexMatrix(scaled * v.adjoint())
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn eigh(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    h.check_hermitian()?;
    Ok(if h.dim() == 2 {
        eigh_2x2(h)
    } else {
        eigh_general(h)
    })
}

fn eigh_general(h: &ComplexMatrix) -> EigenDecomposition {
    let n = h.dim();
    // Symmetrize so the solver only ever sees an exactly Hermitian input.
    let sym = (&h.0 + h.0.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    EigenDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix(eigenvectors),
    }
}

/// Closed form for `c0 I + n.sigma`; the sweeps spend nearly all their time here.
fn eigh_2x2(h: &ComplexMatrix) -> EigenDecomposition {
    let a = h.get(0, 0).re;
    let d = h.get(1, 1).re;
    let b = 0.5 * (h.get(0, 1) + h.get(1, 0).conj());
    let c0 = 0.5 * (a + d);
    let nz = 0.5 * (a - d);
    let r = (nz * nz + b.norm_sqr()).sqrt();
    if r == 0.0 {
        return EigenDecomposition {
            eigenvalues: vec![c0, c0],
            eigenvectors: ComplexMatrix::identity(2),
        };
    }
    // Pick the algebraically stable eigenvector formulas for the sign of nz.
    let (lower, upper) = if nz >= 0.0 {
        let s = Complex64::new(r + nz, 0.0);
        ([b, -s], [s, b.conj()])
    } else {
        let s = Complex64::new(r - nz, 0.0);
        ([-s, b.conj()], [b, s])
    };
    let norm = (lower[0].norm_sqr() + lower[1].norm_sqr()).sqrt();
    let inv = Complex64::new(1.0 / norm, 0.0);
    let vectors = DMatrix::from_row_slice(
        2,
        2,
        &[lower[0] * inv, upper[0] * inv, lower[1] * inv, upper[1] * inv],
    );
    EigenDecomposition {
        eigenvalues: vec![c0 - r, c0 + r],
        eigenvectors: ComplexMatrix(vectors),
    }
}

/// One time-ordered factor `exp(-i dt H)`, evaluated through the eigensystem.
pub fn propagator_step(h: &ComplexMatrix, dt: f64) -> Result<ComplexMatrix> {
    let eig = eigh(h)?;
    propagator_from_eigen(&eig, dt)
}

pub(crate) fn propagator_from_eigen(eig: &EigenDecomposition, dt: f64) -> Result<ComplexMatrix> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", format!("must be positive and finite, got {dt}")));
    }
    Ok(eig.map_spectrum(|l| Complex64::from_polar(1.0, -l * dt)))
}

/// Kronecker product with standard ordering: block `(i, j)` is `a[i][j] * b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let (first, rest) = factors.split_first().expect("at least one factor");
    rest.iter().fold((*first).clone(), |acc, f| kron(&acc, f))
}

/// `<psi|A|psi>` for Hermitian `A`.
pub fn expect(psi: &StateVector, a: &ComplexMatrix) -> Result<f64> {
    let a_psi = a.apply(psi)?;
    let value = psi.0.dotc(&a_psi);
    if value.im.abs() > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(Error::ComplexExpectation {
            residue: value.im.abs(),
        });
    }
    Ok(value.re)
}

/// Named constant spin operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinOp {
    PauliX,
    PauliY,
    PauliZ,
    Identity2,
    /// `diag(+1, 0, -1)` in the `m = +1, 0, -1` basis.
    Spin1Z,
    Identity3,
}

pub fn spin_op(kind: SpinOp) -> ComplexMatrix {
    match kind {
        SpinOp::PauliX => ComplexMatrix(DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])),
        SpinOp::PauliY => ComplexMatrix(DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])),
        SpinOp::PauliZ => ComplexMatrix::from_real_diagonal(&[1.0, -1.0]),
        SpinOp::Identity2 => ComplexMatrix::identity(2),
        SpinOp::Spin1Z => ComplexMatrix::from_real_diagonal(&[1.0, 0.0, -1.0]),
        SpinOp::Identity3 => ComplexMatrix::identity(3),
    }
}
