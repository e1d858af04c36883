//! Parameter-grid sweeps, transition cuts and the radial projection onto the
//! three-qubit diagram.
//!
//! Cells are independent. They are evaluated on a rayon pool and collected by
//! index, so the output never depends on how work was scheduled.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{project_to_three_qubit, NVModel, NormalizedPoint, ProjectedPoint, ThreeQubitModel};
use crate::topology::{ChernMethod, ChernResult, MethodContext, SystemPoint};

/// Evenly spaced axis, `start` and `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    start: f64,
    stop: f64,
    count: usize,
}

impl AxisSpec {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite()) || start >= stop {
            return Err(Error::invalid("axis", format!("need finite start < stop, got {start}:{stop}")));
        }
        if count < 2 {
            return Err(Error::invalid("axis", format!("need count >= 2, got {count}")));
        }
        Ok(Self { start, stop, count })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn point(&self, k: usize) -> f64 {
        if k + 1 == self.count {
            return self.stop;
        }
        self.start + k as f64 * (self.stop - self.start) / (self.count - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.point(k)).collect()
    }
}

impl FromStr for AxisSpec {
    type Err = Error;

    /// Parses `start:stop:count`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::invalid("axis", format!("expected start:stop:count, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        Self::new(start, stop, count)
    }
}

impl fmt::Display for AxisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

/// Which physical system a grid is drawn over, with its axis semantics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GridSystem {
    /// x = normalized offset, y = normalized radius (units of A∥).
    Nv(NVModel),
    /// x = normalized coupling, y = normalized offset (units of H'_r).
    ThreeQubit { h_r_prime: f64 },
}

impl GridSystem {
    pub fn name(&self) -> &'static str {
        match self {
            GridSystem::Nv(_) => "nv",
            GridSystem::ThreeQubit { .. } => "three-qubit",
        }
    }

    pub fn x_label(&self) -> &'static str {
        match self {
            GridSystem::Nv(_) => "h0_tilde",
            GridSystem::ThreeQubit { .. } => "g_tilde_prime",
        }
    }

    pub fn y_label(&self) -> &'static str {
        match self {
            GridSystem::Nv(_) => "hr_tilde",
            GridSystem::ThreeQubit { .. } => "h0_tilde_prime",
        }
    }

    pub fn point(&self, x: f64, y: f64) -> Result<SystemPoint> {
        match self {
            GridSystem::Nv(model) => Ok(SystemPoint::Nv {
                model: model.clone(),
                point: NormalizedPoint::new(y, x)?,
            }),
            GridSystem::ThreeQubit { h_r_prime } => Ok(SystemPoint::ThreeQubit(ThreeQubitModel::from_normalized(
                ProjectedPoint {
                    g_tilde_prime: x,
                    h0_tilde_prime: y,
                },
                *h_r_prime,
            )?)),
        }
    }
}

/// One evaluated parameter point. Failed cells carry `NaN` and an
/// `error: ...` flag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub x: f64,
    pub y: f64,
    pub chern: f64,
    pub min_gap: Option<f64>,
    pub flag: String,
}

impl Cell {
    fn from_outcome(x: f64, y: f64, outcome: Result<ChernResult>) -> Self {
        match outcome {
            Ok(r) => Cell {
                x,
                y,
                chern: r.value,
                min_gap: r.diagnostics.min_gap,
                flag: if r.diagnostics.boundary { "boundary".into() } else { String::new() },
            },
            Err(e) => Cell {
                x,
                y,
                chern: f64::NAN,
                min_gap: None,
                flag: format!("error: {e}"),
            },
        }
    }

    pub fn is_error(&self) -> bool {
        self.flag.starts_with("error")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub system: String,
    pub x_label: String,
    pub y_label: String,
    pub x_axis: AxisSpec,
    pub y_axis: AxisSpec,
    pub method: String,
    /// Row-major with y outer: index `iy * x_axis.count() + ix`.
    pub cells: Vec<Cell>,
}

impl PhaseGrid {
    pub fn cell(&self, ix: usize, iy: usize) -> &Cell {
        &self.cells[iy * self.x_axis.count() + ix]
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.cell(ix, iy).chern
    }
}

fn run_parallel<T, F>(n: usize, jobs: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match jobs {
        Some(0) => Err(Error::invalid("jobs", "must be at least 1")),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Error::invalid("jobs", e.to_string()))?;
            Ok(pool.install(|| (0..n).into_par_iter().map(&f).collect()))
        }
        None => Ok((0..n).into_par_iter().map(&f).collect()),
    }
}

fn evaluate(
    system: &GridSystem,
    coords: &[(f64, f64)],
    method: &dyn ChernMethod,
    ctx: &MethodContext,
    jobs: Option<usize>,
) -> Result<Vec<Cell>> {
    ctx.settings.validate()?;
    run_parallel(coords.len(), jobs, |k| {
        let (x, y) = coords[k];
        let outcome = system.point(x, y).and_then(|p| method.compute(&p, ctx));
        Cell::from_outcome(x, y, outcome)
    })
}

/// Evaluates `method` on every cell of `x × y`. `jobs` caps the worker count;
/// `None` uses the global pool.
pub fn sweep_grid(
    system: &GridSystem,
    x: &AxisSpec,
    y: &AxisSpec,
    method: &dyn ChernMethod,
    ctx: &MethodContext,
    jobs: Option<usize>,
) -> Result<PhaseGrid> {
    let coords: Vec<(f64, f64)> = y
        .points()
        .into_iter()
        .flat_map(|yv| x.points().into_iter().map(move |xv| (xv, yv)))
        .collect();
    let cells = evaluate(system, &coords, method, ctx, jobs)?;
    Ok(PhaseGrid {
        system: system.name().into(),
        x_label: system.x_label().into(),
        y_label: system.y_label().into(),
        x_axis: *x,
        y_axis: *y,
        method: method.kind().as_str().into(),
        cells,
    })
}

/// Which grid coordinate a cut holds fixed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Fixed {
    X(f64),
    Y(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutPoint {
    pub x: f64,
    pub chern: f64,
    pub min_gap: Option<f64>,
    pub flag: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionCut {
    pub system: String,
    pub fixed_label: String,
    pub fixed_value: f64,
    pub varying_label: String,
    pub axis: AxisSpec,
    pub method: String,
    pub points: Vec<CutPoint>,
}

impl TransitionCut {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.chern).collect()
    }
}

pub fn transition_cut(
    system: &GridSystem,
    fixed: Fixed,
    varying: &AxisSpec,
    method: &dyn ChernMethod,
    ctx: &MethodContext,
    jobs: Option<usize>,
) -> Result<TransitionCut> {
    let (coords, fixed_label, fixed_value, varying_label): (Vec<(f64, f64)>, _, _, _) = match fixed {
        Fixed::X(xv) => (
            varying.points().into_iter().map(|v| (xv, v)).collect(),
            system.x_label(),
            xv,
            system.y_label(),
        ),
        Fixed::Y(yv) => (
            varying.points().into_iter().map(|v| (v, yv)).collect(),
            system.y_label(),
            yv,
            system.x_label(),
        ),
    };
    let cells = evaluate(system, &coords, method, ctx, jobs)?;
    let points = cells
        .into_iter()
        .map(|c| CutPoint {
            x: if matches!(fixed, Fixed::X(_)) { c.y } else { c.x },
            chern: c.chern,
            min_gap: c.min_gap,
            flag: c.flag,
        })
        .collect();
    Ok(TransitionCut {
        system: system.name().into(),
        fixed_label: fixed_label.into(),
        fixed_value,
        varying_label: varying_label.into(),
        axis: *varying,
        method: method.kind().as_str().into(),
        points,
    })
}

/// One NV sweep mapped onto three-qubit coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectedSample {
    pub hr_tilde: f64,
    pub g_tilde_prime: f64,
    pub h0_tilde_prime: f64,
    pub chern: f64,
    pub flag: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialCurve {
    pub h0_tilde: f64,
    pub samples: Vec<ProjectedSample>,
}

/// For each fixed offset, sweeps the radius over `hr_axis`, computes C on the
/// NV side and projects every point onto the three-qubit plane. Points outside
/// the projection domain keep their C with `NaN` coordinates and a flag.
pub fn radial_projection(
    model: &NVModel,
    h0_tildes: &[f64],
    hr_axis: &AxisSpec,
    method: &dyn ChernMethod,
    ctx: &MethodContext,
    jobs: Option<usize>,
) -> Result<Vec<RadialCurve>> {
    let system = GridSystem::Nv(model.clone());
    let coords: Vec<(f64, f64)> = h0_tildes
        .iter()
        .flat_map(|&h0| hr_axis.points().into_iter().map(move |hr| (h0, hr)))
        .collect();
    let cells = evaluate(&system, &coords, method, ctx, jobs)?;
    let mut curves: Vec<RadialCurve> = h0_tildes
        .iter()
        .map(|&h0_tilde| RadialCurve {
            h0_tilde,
            samples: Vec::with_capacity(hr_axis.count()),
        })
        .collect();
    for (k, cell) in cells.into_iter().enumerate() {
        let projected = NormalizedPoint::new(cell.y, cell.x).and_then(project_to_three_qubit);
        let (g, h0p, flag) = match projected {
            Ok(p) => (p.g_tilde_prime, p.h0_tilde_prime, cell.flag),
            Err(e) if cell.flag.is_empty() => (f64::NAN, f64::NAN, format!("error: {e}")),
            Err(e) => (f64::NAN, f64::NAN, format!("{}; {e}", cell.flag)),
        };
        curves[k / hr_axis.count()].samples.push(ProjectedSample {
            hr_tilde: cell.y,
            g_tilde_prime: g,
            h0_tilde_prime: h0p,
            chern: cell.chern,
            flag,
        });
    }
    Ok(curves)
}
