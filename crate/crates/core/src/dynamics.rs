//! Time-ordered propagation of the sweep protocol.
//!
//! The propagator is the product of `exp(-i dt' H(t_j))` factors with `H`
//! sampled at step midpoints. Sweeps are cut into one segment per recorded
//! polar angle, so every grid angle falls exactly on a step boundary and a
//! truncated run reproduces the recorded state bit for bit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, expect, propagator_from_eigen, ComplexMatrix, SpinOp, StateVector};
use crate::models::{
    nv_sector_hamiltonian, qubit_op, sweep_from_normalized, three_qubit_hamiltonian, LarmorSweep,
    NVModel, NormalizedPoint, NuclearProjection, ThreeQubitModel,
};

/// Relative gap below which an initial Hamiltonian counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationSettings {
    /// Maximum step size in seconds.
    pub dt: f64,
    /// Number of recorded polar angles, evenly spaced on `[0, pi]` inclusive.
    pub n_theta: usize,
}

impl Default for PropagationSettings {
    fn default() -> Self {
        Self {
            dt: 1e-9,
            n_theta: 181,
        }
    }
}

impl PropagationSettings {
    pub fn new(dt: f64, n_theta: usize) -> Result<Self> {
        let s = Self { dt, n_theta };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if self.n_theta < 3 {
            return Err(Error::invalid("n_theta", format!("must be >= 3, got {}", self.n_theta)));
        }
        Ok(())
    }

    /// Recorded polar angles; the last one is exactly `pi`.
    pub fn theta_grid(&self) -> Vec<f64> {
        let last = self.n_theta - 1;
        (0..self.n_theta)
            .map(|k| if k == last { PI } else { PI * k as f64 / last as f64 })
            .collect()
    }

    fn record_times(&self, t_ramp: f64) -> Vec<f64> {
        let last = self.n_theta - 1;
        (0..self.n_theta)
            .map(|k| if k == last { t_ramp } else { t_ramp * k as f64 / last as f64 })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitPolicy {
    /// Lowest eigenvector of `H(0)`.
    #[default]
    GroundState,
    /// Electronic `|0>` (the `+1` eigenstate of `sz`), as prepared by optical pumping.
    ElectronZero,
}

/// Result of a time-ordered propagation.
#[derive(Clone, Debug)]
pub struct Propagation {
    pub state: StateVector,
    /// Smallest ground gap of `H` at any sampled midpoint.
    pub min_gap: f64,
    pub steps: usize,
}

/// Number of steps covering `duration` with steps no longer than `dt`.
pub fn step_count(duration: f64, dt: f64) -> usize {
    // Guard against ratios like 3636.0000000001 from rounding.
    ((duration / dt) - 1e-9).ceil().max(1.0) as usize
}

/// Propagates `psi` from `t0` to `t1` in place; returns `(steps, min_gap)`.
fn advance<F>(h_of_t: &F, psi: &mut StateVector, t0: f64, t1: f64, dt: f64) -> Result<(usize, f64)>
where
    F: Fn(f64) -> ComplexMatrix,
{
    let n = step_count(t1 - t0, dt);
    let dt_step = (t1 - t0) / n as f64;
    let mut min_gap = f64::INFINITY;
    for j in 0..n {
        let h = h_of_t(t0 + (j as f64 + 0.5) * dt_step);
        if h.dim() != psi.dim() {
            return Err(Error::DimensionMismatch {
                expected: psi.dim(),
                found: h.dim(),
            });
        }
        let eig = eigh(&h)?;
        min_gap = min_gap.min(eig.ground_gap());
        psi.evolve(&propagator_from_eigen(&eig, dt_step)?);
    }
    Ok((n, min_gap))
}

/// `U(t_final, 0) psi0` with `ceil(t_final / dt)` midpoint-sampled steps.
pub fn propagate<F>(h_of_t: F, psi0: &StateVector, t_final: f64, settings: &PropagationSettings) -> Result<Propagation>
where
    F: Fn(f64) -> ComplexMatrix,
{
    settings.validate()?;
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::invalid("t_final", format!("must be positive, got {t_final}")));
    }
    let mut state = psi0.clone();
    let (steps, min_gap) = advance(&h_of_t, &mut state, 0.0, t_final, settings.dt)?;
    Ok(Propagation { state, min_gap, steps })
}

/// States at each of the increasing `record_times` (the first must be 0).
///
/// Each interval between consecutive record times is stepped independently, so
/// the output for a prefix of `record_times` does not depend on later entries.
pub fn propagate_recording<F>(
    h_of_t: F,
    psi0: &StateVector,
    record_times: &[f64],
    dt: f64,
) -> Result<(Vec<StateVector>, f64)>
where
    F: Fn(f64) -> ComplexMatrix,
{
    if record_times.first() != Some(&0.0) {
        return Err(Error::invalid("record_times", "must start at t = 0"));
    }
    if record_times.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::invalid("record_times", "must be strictly increasing"));
    }
    let mut psi = psi0.clone();
    let mut states = Vec::with_capacity(record_times.len());
    let mut min_gap = f64::INFINITY;
    states.push(psi.clone());
    for w in record_times.windows(2) {
        let (_, gap) = advance(&h_of_t, &mut psi, w[0], w[1], dt)?;
        min_gap = min_gap.min(gap);
        states.push(psi.clone());
    }
    Ok((states, min_gap))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochChannel {
    pub label: String,
    /// Aggregation weight used when summing channels into a curvature signal.
    pub weight: f64,
    pub sx: Vec<f64>,
    pub sy: Vec<f64>,
    pub sz: Vec<f64>,
}

impl BlochChannel {
    fn new(label: impl Into<String>, weight: f64, n: usize) -> Self {
        Self {
            label: label.into(),
            weight,
            sx: Vec::with_capacity(n),
            sy: Vec::with_capacity(n),
            sz: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, s: [f64; 3]) {
        self.sx.push(s[0]);
        self.sy.push(s[1]);
        self.sz.push(s[2]);
    }

    pub fn bloch(&self, k: usize) -> [f64; 3] {
        [self.sx[k], self.sy[k], self.sz[k]]
    }
}

/// Bloch components per channel on the recorded polar-angle grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTrace {
    pub theta: Vec<f64>,
    /// Ramp time of the sweep that produced the trace.
    pub t_ramp: f64,
    pub channels: Vec<BlochChannel>,
    /// Largest `| |psi| - 1 |` seen at any record point.
    pub norm_drift: f64,
    /// Smallest ground gap of the propagated Hamiltonians (rad/s).
    pub min_gap: f64,
}

impl SweepTrace {
    /// Weighted sum of `<sy>` over channels.
    pub fn sigma_y_sum(&self) -> Vec<f64> {
        (0..self.theta.len())
            .map(|k| self.channels.iter().map(|c| c.weight * c.sy[k]).sum())
            .collect()
    }
}

fn initial_state(h0: &ComplexMatrix, init: InitPolicy, scale: f64) -> Result<StateVector> {
    match init {
        InitPolicy::GroundState => {
            let eig = eigh(h0)?;
            let gap = eig.ground_gap();
            let threshold = DEGENERACY_TOL * scale;
            if gap < threshold {
                return Err(Error::DegenerateInitialState { gap, threshold });
            }
            Ok(eig.ground_state())
        }
        InitPolicy::ElectronZero => Ok(StateVector::basis(h0.dim(), 0)),
    }
}

fn sweep_hamiltonian<'a, H>(sweep: &'a LarmorSweep, build: H) -> impl Fn(f64) -> ComplexMatrix + 'a
where
    H: Fn([f64; 3]) -> ComplexMatrix + 'a,
{
    let t_ramp = sweep.t_ramp();
    move |t| build(sweep.larmor_vector_at_theta(PI * (t / t_ramp).clamp(0.0, 1.0)))
}

fn sector_states(
    model: &NVModel,
    projection: NuclearProjection,
    sweep: &LarmorSweep,
    init: InitPolicy,
    times: &[f64],
    dt: f64,
) -> Result<(Vec<StateVector>, f64)> {
    let h = sweep_hamiltonian(sweep, |field| nv_sector_hamiltonian(model, projection, field));
    let psi0 = initial_state(&h(0.0), init, sweep.omega1())?;
    propagate_recording(h, &psi0, times, dt)
}

/// Runs the sweep for every nuclear sector and records the electronic Bloch
/// vector at each grid angle.
///
/// The 6x6 Hamiltonian is block diagonal in `Iz`, so sectors are propagated
/// independently as 2x2 problems.
pub fn run_nv_sweep(
    model: &NVModel,
    sweep: &LarmorSweep,
    init: InitPolicy,
    settings: &PropagationSettings,
) -> Result<SweepTrace> {
    run_nv_sweep_until(model, sweep, init, settings, settings.n_theta - 1)
}

/// Like [`run_nv_sweep`] but stops after grid index `last` (terminating the
/// control pulse at `T_meas = last / (n_theta - 1) * T_ramp`).
pub fn run_nv_sweep_until(
    model: &NVModel,
    sweep: &LarmorSweep,
    init: InitPolicy,
    settings: &PropagationSettings,
    last: usize,
) -> Result<SweepTrace> {
    settings.validate()?;
    if last == 0 || last >= settings.n_theta {
        return Err(Error::invalid("last", format!("must lie in 1..{}", settings.n_theta)));
    }
    let times = &settings.record_times(sweep.t_ramp())[..=last];
    let mut channels = Vec::with_capacity(model.sectors().len());
    let mut norm_drift = 0.0_f64;
    let mut min_gap = f64::INFINITY;
    for sector in model.sectors() {
        let (states, gap) = sector_states(model, sector.projection, sweep, init, times, settings.dt)?;
        min_gap = min_gap.min(gap);
        let mut channel = BlochChannel::new(sector.projection.label(), sector.weight, times.len());
        for psi in &states {
            norm_drift = norm_drift.max((psi.norm() - 1.0).abs());
            channel.push(psi.bloch());
        }
        channels.push(channel);
    }
    Ok(SweepTrace {
        theta: settings.theta_grid()[..=last].to_vec(),
        t_ramp: sweep.t_ramp(),
        channels,
        norm_drift,
        min_gap,
    })
}

/// Three-qubit sweep from the ground state of `H(0)`, recording each qubit's
/// Bloch vector.
pub fn run_three_qubit_sweep(
    model: &ThreeQubitModel,
    sweep: &LarmorSweep,
    settings: &PropagationSettings,
) -> Result<SweepTrace> {
    settings.validate()?;
    let times = settings.record_times(sweep.t_ramp());
    let h = sweep_hamiltonian(sweep, |field| three_qubit_hamiltonian(model, field));
    let psi0 = initial_state(&h(0.0), InitPolicy::GroundState, sweep.omega1())?;
    let (states, min_gap) = propagate_recording(h, &psi0, &times, settings.dt)?;

    let ops: Vec<[ComplexMatrix; 3]> = (0..3)
        .map(|q| [SpinOp::PauliX, SpinOp::PauliY, SpinOp::PauliZ].map(|k| qubit_op(k, q, 3)))
        .collect();
    let mut channels: Vec<BlochChannel> = (1..=3)
        .map(|q| BlochChannel::new(format!("q{q}"), 1.0, times.len()))
        .collect();
    let mut norm_drift = 0.0_f64;
    for psi in &states {
        norm_drift = norm_drift.max((psi.norm() - 1.0).abs());
        for (channel, op) in channels.iter_mut().zip(&ops) {
            channel.push([expect(psi, &op[0])?, expect(psi, &op[1])?, expect(psi, &op[2])?]);
        }
    }
    Ok(SweepTrace {
        theta: settings.theta_grid(),
        t_ramp: sweep.t_ramp(),
        channels,
        norm_drift,
        min_gap,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorOutcome {
    pub label: String,
    /// `|<g(T_ramp)|psi(T_ramp)>|^2`.
    pub ground_pop: f64,
    pub sz_final: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandauZenerPoint {
    pub alpha: f64,
    /// Mean ground-state population over the model's sectors.
    pub ground_pop: f64,
    /// Mean terminal `<sz>` over the model's sectors.
    pub sz_final: f64,
    pub sectors: Vec<SectorOutcome>,
}

/// Terminal ground-state survival of full sweeps at each adiabaticity parameter.
pub fn landau_zener_scan(
    model: &NVModel,
    point: NormalizedPoint,
    alphas: &[f64],
    init: InitPolicy,
    settings: &PropagationSettings,
) -> Result<Vec<LandauZenerPoint>> {
    settings.validate()?;
    alphas
        .iter()
        .map(|&alpha| {
            let sweep = sweep_from_normalized(point, alpha, model.a_par())?;
            let mut sectors = Vec::with_capacity(model.sectors().len());
            for sector in model.sectors() {
                let h = sweep_hamiltonian(&sweep, |f| nv_sector_hamiltonian(model, sector.projection, f));
                let psi0 = initial_state(&h(0.0), init, sweep.omega1())?;
                let end = eigh(&h(sweep.t_ramp()))?;
                let gap = end.ground_gap();
                if gap < DEGENERACY_TOL * sweep.omega1() {
                    return Err(Error::DegenerateTerminalState { gap });
                }
                let run = propagate(&h, &psi0, sweep.t_ramp(), settings)?;
                sectors.push(SectorOutcome {
                    label: sector.projection.label().to_string(),
                    ground_pop: end.ground_state().inner(&run.state).norm_sqr(),
                    sz_final: run.state.bloch()[2],
                });
            }
            let n = sectors.len() as f64;
            Ok(LandauZenerPoint {
                alpha,
                ground_pop: sectors.iter().map(|s| s.ground_pop).sum::<f64>() / n,
                sz_final: sectors.iter().map(|s| s.sz_final).sum::<f64>() / n,
                sectors,
            })
        })
        .collect()
}
