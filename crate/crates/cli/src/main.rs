mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nvchern::dynamics::{landau_zener_scan, run_nv_sweep, PropagationSettings};
use nvchern::export::{
    curvature_csv, cut_csv, format_f64, grid_csv, grid_svg, projection_csv, to_json, write_file, ExportMetadata,
    SvgSize,
};
use nvchern::models::{
    hz_to_rad, project_to_three_qubit, sweep_from_normalized, NVModel, NormalizedPoint, NuclearProjection,
};
use nvchern::phase_map::{radial_projection, sweep_grid, transition_cut, AxisSpec, Fixed, GridSystem};
use nvchern::topology::{
    curvature_from_trace, integrate_chern, MethodContext, MethodKind, MethodRegistry, SystemPoint,
};

use crate::config::{parse_init, ConfigError, RunConfig};

const UNITS: &str = "Units: radii and offsets are normalized (NV: units of A_par; three-qubit: units of H'_r). \
A_par itself is given in Hz (ordinary frequency) and converted to rad/s internally. Times are in seconds.";

#[derive(Debug, Parser)]
#[command(name = "nvchern", version, about = "Chern numbers of swept-field spin systems", after_help = UNITS)]
struct Cli {
    /// `key = value` config file (keys: a_par_hz, alpha, dt_s, n_theta, init, jobs, out_dir).
    #[arg(long, global = true, env = "NVCHERN_CONFIG", value_name = "PATH")]
    config: Option<PathBuf>,

    /// Maximum number of worker threads for grid commands.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Hyperfine splitting A_par in Hz (ordinary frequency, not rad/s) [default: 2.2e6].
    #[arg(long, global = true, value_name = "HZ")]
    a_par_hz: Option<f64>,

    /// Adiabaticity parameter alpha = Omega_1 T_ramp / 2 pi (dimensionless) [default: 2].
    #[arg(long, global = true)]
    alpha: Option<f64>,

    /// Propagation time step in seconds [default: 1e-9].
    #[arg(long, global = true, value_name = "SECONDS")]
    dt: Option<f64>,

    /// Number of recorded polar angles on [0, pi], inclusive [default: 181].
    #[arg(long, global = true)]
    ntheta: Option<usize>,

    /// Initial NV state: ground or electron-zero [default: ground].
    #[arg(long, global = true)]
    init: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct NvPoint {
    /// Sphere radius H_r / A_par (normalized, > 0).
    #[arg(long, allow_negative_numbers = true)]
    hr: f64,

    /// Sphere offset H_0 / A_par along z (normalized).
    #[arg(long, allow_negative_numbers = true)]
    h0: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SystemArg {
    Nv,
    #[value(name = "3q", alias = "three-qubit")]
    ThreeQubit,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one sweep and write its Berry-curvature trace.
    #[command(after_help = UNITS)]
    Berry {
        #[command(flatten)]
        point: NvPoint,
        /// Curvature CSV path (theta_rad,sigma_y_sum,f_phi,sy_<sector>...).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chern number of one NV parameter point.
    #[command(after_help = UNITS)]
    Chern {
        #[command(flatten)]
        point: NvPoint,
        /// dynamic, fhs (lattice) or count (monopole-count).
        #[arg(long, default_value = "dynamic")]
        method: String,
    },
    /// Chern number over a 2D parameter grid.
    #[command(after_help = UNITS)]
    PhaseDiagram {
        #[arg(long, value_enum, default_value = "nv")]
        system: SystemArg,
        /// x axis as start:stop:count. NV: H_0/A_par [default -2.25:2.25:45]; 3q: g'/H'_r [default 0:1.5:31].
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// y axis as start:stop:count. NV: H_r/A_par [default 0.25:2.25:41]; 3q: H'_0/H'_r [default 0:2.5:51].
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        #[arg(long, default_value = "count")]
        method: String,
        /// Grid CSV path; stdout when neither this nor out_dir is set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional SVG heatmap path.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Optional JSON path (grid plus run metadata).
        #[arg(long)]
        json: Option<PathBuf>,
        /// SVG width in pixels.
        #[arg(long, default_value_t = 640)]
        width: u32,
        /// SVG height in pixels.
        #[arg(long, default_value_t = 480)]
        height: u32,
    },
    /// Chern number along one axis with the other held fixed.
    #[command(after_help = UNITS)]
    Cut {
        #[arg(long, value_enum, default_value = "nv")]
        system: SystemArg,
        /// Fixed x coordinate (NV: H_0/A_par; 3q: g'/H'_r).
        #[arg(long, allow_negative_numbers = true, conflicts_with = "fixed_y", required_unless_present = "fixed_y")]
        fixed_x: Option<f64>,
        /// Fixed y coordinate (NV: H_r/A_par; 3q: H'_0/H'_r).
        #[arg(long, allow_negative_numbers = true)]
        fixed_y: Option<f64>,
        /// Varying coordinate as start:stop:count (normalized).
        #[arg(long, allow_hyphen_values = true)]
        axis: String,
        #[arg(long, default_value = "dynamic")]
        method: String,
        /// Cut CSV path (x,chern).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Terminal ground-state survival against the adiabaticity parameter.
    #[command(after_help = UNITS)]
    Lz {
        #[command(flatten)]
        point: NvPoint,
        /// Comma-separated alphas (dimensionless).
        #[arg(long, default_value = "0.5,1,2,4,8")]
        alphas: String,
        /// Comma-separated nuclear projections m in {-1, 0, 1}; use 0 alone for a single monopole at H_z = 0.
        #[arg(long, default_value = "-1,0,1", allow_hyphen_values = true)]
        sectors: String,
        /// CSV path (alpha,ground_pop,sz_final).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Map one normalized NV point onto the three-qubit plane; prints g',H'_0 (units of H'_r).
    #[command(after_help = UNITS)]
    Project {
        #[command(flatten)]
        point: NvPoint,
    },
    /// Radial NV cuts projected onto the three-qubit plane.
    #[command(after_help = UNITS)]
    Radial {
        /// Comma-separated fixed offsets H_0/A_par.
        #[arg(long, default_value = "0,0.23,0.45,0.68,0.91", allow_hyphen_values = true)]
        h0_list: String,
        /// Radius axis H_r/A_par as start:stop:count.
        #[arg(long, default_value = "0.22:2.2:20")]
        hr: String,
        #[arg(long, default_value = "dynamic")]
        method: String,
        /// Projection CSV path (g_tilde_prime,h0_tilde_prime,chern).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Malformed command-line values that clap itself cannot check.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn parse_list<T: std::str::FromStr>(name: &str, s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<T>()
                .map_err(|_| UsageError(format!("--{name}: cannot parse {v:?}")).into())
        })
        .collect()
}

fn parse_axis(name: &str, s: &str) -> Result<AxisSpec> {
    s.parse::<AxisSpec>().with_context(|| format!("--{name}"))
}

struct Session {
    config: RunConfig,
    registry: MethodRegistry,
}

impl Session {
    fn from_cli(cli: &Cli) -> Result<Self> {
        let mut config = RunConfig::default();
        if let Some(path) = &cli.config {
            config = config.load(path)?;
        }
        let flag = |name: &str, v: f64| -> Result<f64> {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(UsageError(format!("--{name} must be positive, got {v}")).into())
            }
        };
        if let Some(v) = cli.a_par_hz {
            config.a_par_hz = flag("a-par-hz", v)?;
        }
        if let Some(v) = cli.alpha {
            config.alpha = flag("alpha", v)?;
        }
        if let Some(v) = cli.dt {
            config.dt_s = flag("dt", v)?;
        }
        if let Some(v) = cli.ntheta {
            config.n_theta = v;
        }
        if let Some(v) = &cli.init {
            config.init = parse_init(v)?;
        }
        if let Some(v) = cli.jobs {
            if v == 0 {
                return Err(UsageError("--jobs must be at least 1".into()).into());
            }
            config.jobs = Some(v);
        }
        Ok(Self {
            config,
            registry: MethodRegistry::default(),
        })
    }

    fn model(&self) -> Result<NVModel> {
        Ok(NVModel::from_hz(self.config.a_par_hz)?)
    }

    fn context(&self) -> Result<MethodContext> {
        Ok(MethodContext {
            alpha: self.config.alpha,
            settings: PropagationSettings::new(self.config.dt_s, self.config.n_theta)?,
            init: self.config.init,
            ..MethodContext::default()
        })
    }

    fn grid_system(&self, system: SystemArg) -> Result<GridSystem> {
        Ok(match system {
            SystemArg::Nv => GridSystem::Nv(self.model()?),
            // The chain's radius plays the role of A_par so both systems share time scales.
            SystemArg::ThreeQubit => GridSystem::ThreeQubit {
                h_r_prime: hz_to_rad(self.config.a_par_hz),
            },
        })
    }

    /// Writes to `explicit`, else `out_dir/default_name`, else stdout.
    fn emit(&self, explicit: Option<&Path>, default_name: &str, contents: &str) -> Result<()> {
        let path = explicit
            .map(Path::to_path_buf)
            .or_else(|| self.config.out_dir.as_ref().map(|d| d.join(default_name)));
        match path {
            Some(p) => {
                write_file(&p, contents)?;
                eprintln!("wrote {}", p.display());
            }
            None => {
                let mut out = std::io::stdout().lock();
                if let Err(e) = out.write_all(contents.as_bytes()).and_then(|()| out.flush()) {
                    // A closed downstream pipe (e.g. `| head`) is not an error.
                    if e.kind() != std::io::ErrorKind::BrokenPipe {
                        return Err(e.into());
                    }
                }
            }
        }
        Ok(())
    }

    fn run(&self, command: &Command) -> Result<()> {
        match command {
            Command::Berry { point, out } => self.berry(point, out.as_deref()),
            Command::Chern { point, method } => self.chern(point, method),
            Command::PhaseDiagram {
                system,
                x,
                y,
                method,
                out,
                svg,
                json,
                width,
                height,
            } => {
                let system = self.grid_system(*system)?;
                let (dx, dy) = match system {
                    GridSystem::Nv(_) => ("-2.25:2.25:45", "0.25:2.25:41"),
                    GridSystem::ThreeQubit { .. } => ("0:1.5:31", "0:2.5:51"),
                };
                let x = parse_axis("x", x.as_deref().unwrap_or(dx))?;
                let y = parse_axis("y", y.as_deref().unwrap_or(dy))?;
                let method = self.registry.get(method)?;
                let ctx = self.context()?;
                let grid = sweep_grid(&system, &x, &y, method.as_ref(), &ctx, self.config.jobs)?;
                let failed = grid.cells.iter().filter(|c| c.is_error()).count();
                eprintln!("{} cells, {failed} failed", grid.cells.len());
                self.emit(out.as_deref(), "phase_diagram.csv", &grid_csv(&grid)?)?;
                if let Some(p) = svg {
                    write_file(p, &grid_svg(&grid, SvgSize { width: *width, height: *height }))?;
                }
                if let Some(p) = json {
                    write_file(p, &to_json(&grid, &ExportMetadata::new(&grid.method, &ctx))?)?;
                }
                Ok(())
            }
            Command::Cut {
                system,
                fixed_x,
                fixed_y,
                axis,
                method,
                out,
            } => {
                let system = self.grid_system(*system)?;
                let fixed = match (fixed_x, fixed_y) {
                    (Some(x), None) => Fixed::X(*x),
                    (None, Some(y)) => Fixed::Y(*y),
                    _ => return Err(UsageError("give exactly one of --fixed-x, --fixed-y".into()).into()),
                };
                let axis = parse_axis("axis", axis)?;
                let method = self.registry.get(method)?;
                let cut = transition_cut(&system, fixed, &axis, method.as_ref(), &self.context()?, self.config.jobs)?;
                self.emit(out.as_deref(), "cut.csv", &cut_csv(&cut)?)
            }
            Command::Lz {
                point,
                alphas,
                sectors,
                out,
            } => {
                let alphas: Vec<f64> = parse_list("alphas", alphas)?;
                let ms: Vec<i64> = parse_list("sectors", sectors)?;
                let labels = ms
                    .into_iter()
                    .map(NuclearProjection::from_m)
                    .collect::<nvchern::error::Result<Vec<_>>>()?;
                let model = NVModel::with_sectors(self.model()?.a_par(), &labels, &vec![1.0; labels.len()])?;
                let p = NormalizedPoint::new(point.hr, point.h0)?;
                let ctx = self.context()?;
                let scan = landau_zener_scan(&model, p, &alphas, ctx.init, &ctx.settings)?;
                let mut csv = String::from("alpha,ground_pop,sz_final\n");
                for s in &scan {
                    csv.push_str(&format!(
                        "{},{},{}\n",
                        format_f64(s.alpha),
                        format_f64(s.ground_pop),
                        format_f64(s.sz_final)
                    ));
                }
                self.emit(out.as_deref(), "lz.csv", &csv)
            }
            Command::Project { point } => {
                let p = project_to_three_qubit(NormalizedPoint::new(point.hr, point.h0)?)?;
                println!("{},{}", format_f64(p.g_tilde_prime), format_f64(p.h0_tilde_prime));
                Ok(())
            }
            Command::Radial {
                h0_list,
                hr,
                method,
                out,
            } => {
                let h0s: Vec<f64> = parse_list("h0-list", h0_list)?;
                let axis = parse_axis("hr", hr)?;
                let method = self.registry.get(method)?;
                let curves =
                    radial_projection(&self.model()?, &h0s, &axis, method.as_ref(), &self.context()?, self.config.jobs)?;
                self.emit(out.as_deref(), "radial.csv", &projection_csv(&curves)?)
            }
        }
    }

    fn berry(&self, point: &NvPoint, out: Option<&Path>) -> Result<()> {
        let model = self.model()?;
        let ctx = self.context()?;
        let p = NormalizedPoint::new(point.hr, point.h0)?;
        let sweep = sweep_from_normalized(p, ctx.alpha, model.a_par())?;
        let trace = run_nv_sweep(&model, &sweep, ctx.init, &ctx.settings)?;
        let curvature = curvature_from_trace(&trace, &sweep)?;
        let result = integrate_chern(&curvature);
        if out.is_some() || self.config.out_dir.is_some() {
            self.emit(out, "berry.csv", &curvature_csv(&curvature)?)?;
        }
        eprintln!(
            "refinement delta {:.3e}, norm drift {:.3e}",
            result.diagnostics.refinement_delta.unwrap_or(f64::NAN),
            trace.norm_drift
        );
        println!("C = {:.4} (dynamic, alpha={})", result.value, format_f64(ctx.alpha));
        Ok(())
    }

    fn chern(&self, point: &NvPoint, method: &str) -> Result<()> {
        let method = self.registry.get(method)?;
        let ctx = self.context()?;
        let system = SystemPoint::Nv {
            model: self.model()?,
            point: NormalizedPoint::new(point.hr, point.h0)?,
        };
        let result = method.compute(&system, &ctx)?;
        match result.method {
            MethodKind::Dynamic => {
                println!("C = {:.4} (dynamic, alpha={})", result.value, format_f64(ctx.alpha))
            }
            kind => println!("C = {} ({kind})", format_f64(result.value)),
        }
        println!("{}", serde_json::to_string(&result)?);
        Ok(())
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<nvchern::error::Error>() {
            return if e.is_input_error() { 2 } else { 1 };
        }
        if cause.is::<ConfigError>() || cause.is::<UsageError>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match Session::from_cli(&cli).and_then(|s| s.run(&cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
