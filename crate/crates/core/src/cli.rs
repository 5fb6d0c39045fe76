//! Command-line front end.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::batch::{eval_grid, EvalMode, Execution, GridRow, GridSpec, GridStatus};
use crate::checks::{run_suite, Suite, SuiteOptions, SuiteReport};
use crate::error::Error;
use crate::forward::Constants;
use crate::geometry::OmegaBoundary;
use crate::inverse::{EvalConfig, InverseMap};
use crate::params::Params;
use crate::series::{radius_estimate, s_series, MIN_RADIUS_TERMS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Numerics(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config error: {0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerics(e) if e.is_numerical() => EXIT_NUMERICAL,
            // The request itself does not fit the parameters.
            CliError::Numerics(
                Error::InvalidParams(_)
                | Error::InvalidArgument(_)
                | Error::NotApplicable(_)
                | Error::InsufficientCoefficients(_),
            ) => EXIT_USAGE,
            CliError::Config(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gentrig", version, about = "Generalized trigonometric functions S_{n,k} on their domains of univalence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Integer n >= 2.
    #[arg(long)]
    pub n: u32,
    /// Real k with 0 < k < n.
    #[arg(long)]
    pub k: f64,
    /// Emit JSON (the default, except `check`, which prints text).
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV.
    #[arg(long)]
    pub csv: bool,
    /// Write output to FILE instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Target tolerance; overrides the Newton and quadrature tolerances.
    #[arg(long, env = "GENTRIG_TOL", value_name = "X")]
    pub tol: Option<f64>,
    /// TOML file with evaluation settings.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Sym,
    Direct,
    Periodic,
}

impl From<ModeArg> for EvalMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sym => EvalMode::Sym,
            ModeArg::Direct => EvalMode::Direct,
            ModeArg::Periodic => EvalMode::Periodic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Identities,
    Rotation,
    Roundtrip,
    Radius,
    Periodicity,
    Pole,
    Boundary,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Identities => Suite::Identities,
            SuiteArg::Rotation => Suite::Rotation,
            SuiteArg::Roundtrip => Suite::Roundtrip,
            SuiteArg::Radius => Suite::Radius,
            SuiteArg::Periodicity => Suite::Periodicity,
            SuiteArg::Pole => Suite::Pole,
            SuiteArg::Boundary => Suite::Boundary,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// phi, the edge integral, the axis integral and the vertex P.
    Constants {
        #[command(flatten)]
        common: Common,
    },
    /// F(z) on the closed fundamental sector.
    EvalF {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        re: f64,
        #[arg(long, allow_negative_numbers = true)]
        im: f64,
    },
    /// S(w).
    EvalS {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        re: f64,
        #[arg(long, allow_negative_numbers = true)]
        im: f64,
        #[arg(long, value_enum, default_value = "sym")]
        mode: ModeArg,
    },
    /// S over a rectangular grid, rows `re,im,status,s_re,s_im`.
    Grid {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        re_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        re_max: f64,
        #[arg(long, allow_negative_numbers = true)]
        im_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        im_max: f64,
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long, value_enum, default_value = "sym")]
        mode: ModeArg,
        /// Evaluate on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Maclaurin coefficients of S and the radius estimate.
    Series {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 64)]
        order: usize,
    },
    /// The region and the boundary of the domain of univalence.
    Domain {
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        /// Series order for the radius suite.
        #[arg(long, default_value_t = 1000)]
        order: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CommandKind {
    Constants,
    EvalF,
    EvalS,
    Grid,
    Series,
    Domain,
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Fully resolved invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: Params,
    pub tolerances: EvalConfig,
    pub output: OutputFormat,
    pub out: Option<PathBuf>,
    pub point: Option<Complex64>,
    pub mode: EvalMode,
    pub grid_spec: Option<GridSpec>,
    pub exec: Execution,
    pub suite: Option<Suite>,
    /// `check` prints PASS/FAIL lines unless `--json` was given explicitly.
    pub report_json: bool,
    pub order: usize,
    pub seed: u64,
    pub samples: usize,
}

fn load_eval_config(common: &Common) -> Result<EvalConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?
        }
        None => EvalConfig::default(),
    };
    if let Some(tol) = common.tol {
        if tol.is_nan() || tol <= 0.0 || !tol.is_finite() {
            return Err(CliError::Config(format!("tolerance must be positive, got {tol}")));
        }
        cfg = cfg.with_tolerance(tol);
    }
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let (kind, common) = match &cli.command {
            Command::Constants { common } => (CommandKind::Constants, common),
            Command::EvalF { common, .. } => (CommandKind::EvalF, common),
            Command::EvalS { common, .. } => (CommandKind::EvalS, common),
            Command::Grid { common, .. } => (CommandKind::Grid, common),
            Command::Series { common, .. } => (CommandKind::Series, common),
            Command::Domain { common } => (CommandKind::Domain, common),
            Command::Check { common, .. } => (CommandKind::Check, common),
        };
        let mut cfg = RunConfig {
            command: kind,
            params: Params::new(common.n, common.k)?,
            tolerances: load_eval_config(common)?,
            output: if common.csv { OutputFormat::Csv } else { OutputFormat::Json },
            out: common.out.clone(),
            point: None,
            mode: EvalMode::Sym,
            grid_spec: None,
            exec: Execution::Parallel,
            suite: None,
            report_json: common.json,
            order: 64,
            seed: 42,
            samples: 500,
        };
        match cli.command {
            Command::EvalF { re, im, .. } => cfg.point = Some(Complex64::new(re, im)),
            Command::EvalS { re, im, mode, .. } => {
                cfg.point = Some(Complex64::new(re, im));
                cfg.mode = mode.into();
            }
            Command::Grid {
                re_min,
                re_max,
                im_min,
                im_max,
                nx,
                ny,
                mode,
                sequential,
                ..
            } => {
                let spec = GridSpec {
                    re_min,
                    re_max,
                    im_min,
                    im_max,
                    nx,
                    ny,
                };
                spec.validate()?;
                cfg.grid_spec = Some(spec);
                cfg.mode = mode.into();
                if sequential {
                    cfg.exec = Execution::Sequential;
                }
            }
            Command::Series { order, .. } => cfg.order = order,
            Command::Check {
                suite,
                seed,
                samples,
                order,
                ..
            } => {
                cfg.suite = Some(suite.into());
                cfg.seed = seed;
                cfg.samples = samples;
                cfg.order = order;
            }
            Command::Constants { .. } | Command::Domain { .. } => {}
        }
        Ok(cfg)
    }
}

/// CSV number with 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::from("re,im,status,s_re,s_im\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(r.re),
            num(r.im),
            r.status.as_str(),
            opt_num(r.s_re),
            opt_num(r.s_im)
        );
    }
    out
}

fn constants_csv(c: &Constants) -> String {
    let mut out = String::from("key,value\n");
    let _ = writeln!(out, "n,{}", c.params.n);
    let _ = writeln!(out, "k,{}", num(c.params.k));
    let _ = writeln!(out, "phi,{}", num(c.phi));
    let _ = writeln!(out, "tail,{}", opt_num(c.tail));
    let _ = writeln!(out, "axis,{}", opt_num(c.axis));
    let _ = writeln!(out, "P_re,{}", opt_num(c.p.map(|p| p.re)));
    let _ = writeln!(out, "P_im,{}", opt_num(c.p.map(|p| p.im)));
    let _ = writeln!(out, "err,{}", num(c.err));
    out
}

fn report_text(report: &SuiteReport) -> String {
    let mut out = format!(
        "# gentrig check suite={:?} n={} k={} seed={} samples={}\n",
        report.suite, report.n, report.k, report.seed, report.samples
    )
    .to_lowercase();
    for line in &report.lines {
        let _ = writeln!(
            out,
            "{} {}: measured={:.3e} tolerance={:.3e}",
            if line.pass { "PASS" } else { "FAIL" },
            line.name,
            line.measured,
            line.tolerance
        );
    }
    let _ = writeln!(out, "{}", if report.passed() { "ALL PASS" } else { "SUITE FAILED" });
    out
}

/// Runs the command; returns the rendered output and whether a check suite
/// passed.
pub fn execute(cfg: &RunConfig) -> Result<(String, bool), CliError> {
    let csv = cfg.output == OutputFormat::Csv;
    if cfg.command == CommandKind::Series {
        let series = s_series(&cfg.params, cfg.order)?;
        let nonzero = series.b.iter().filter(|b| **b != 0.0).count();
        let radius = if nonzero >= MIN_RADIUS_TERMS {
            Some(radius_estimate(&series)?)
        } else {
            None
        };
        let text = if csv {
            let mut out = String::from("j,m,b\n");
            for (j, b) in series.b.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", j, series.exponent(j), num(*b));
            }
            if let Some(r) = radius {
                let _ = writeln!(out, "# radius={} quality={} method={:?}", num(r.radius), num(r.quality), r.method);
            }
            out
        } else {
            let rows: Vec<_> = series
                .b
                .iter()
                .enumerate()
                .map(|(j, b)| json!({"j": j, "m": series.exponent(j), "b": b}))
                .collect();
            to_json(&json!({
                "n": cfg.params.n,
                "k": cfg.params.k,
                "order": series.order,
                "coefficients": rows,
                "radius": radius,
            }))
        };
        return Ok((text, true));
    }

    let inv = InverseMap::new(cfg.params, cfg.tolerances)?;
    let text = match cfg.command {
        CommandKind::Constants => {
            let c = &inv.forward.constants;
            if csv {
                constants_csv(c)
            } else {
                to_json(c)
            }
        }
        CommandKind::EvalF => {
            let z = cfg.point.expect("eval-f has a point");
            let r = inv.forward.eval_with_error(z)?;
            let value = r.into_result()?;
            if csv {
                format!(
                    "re,im,f_re,f_im,err_estimate\n{},{},{},{},{}\n",
                    num(z.re),
                    num(z.im),
                    num(value.re),
                    num(value.im),
                    num(r.err_estimate)
                )
            } else {
                to_json(&json!({
                    "z": {"re": z.re, "im": z.im},
                    "value": {"re": value.re, "im": value.im},
                    "err_estimate": r.err_estimate,
                    "evaluations": r.evaluations,
                }))
            }
        }
        CommandKind::EvalS => {
            let w = cfg.point.expect("eval-s has a point");
            let (s, status) = match cfg.mode {
                EvalMode::Sym => (inv.s_eval(w)?, GridStatus::Ok),
                EvalMode::Direct => (inv.s_direct(w)?, GridStatus::Ok),
                EvalMode::Periodic => {
                    let v = inv.s_periodic(w)?;
                    (v.value, if v.seam { GridStatus::Seam } else { GridStatus::Ok })
                }
            };
            let row = GridRow {
                re: w.re,
                im: w.im,
                status,
                s_re: Some(s.re),
                s_im: Some(s.im),
            };
            if csv {
                grid_csv(&[row])
            } else {
                to_json(&json!({
                    "w": {"re": w.re, "im": w.im},
                    "s": {"re": s.re, "im": s.im},
                    "status": row.status,
                    "mode": cfg.mode,
                }))
            }
        }
        CommandKind::Grid => {
            let spec = cfg.grid_spec.expect("grid has a spec");
            let rows = eval_grid(&inv, &spec, cfg.mode, cfg.exec)?;
            if csv {
                grid_csv(&rows)
            } else {
                to_json(&rows)
            }
        }
        CommandKind::Domain => {
            let region = inv.region();
            let boundary = region.omega_boundary();
            if csv {
                let mut out = String::from("kind,start_re,start_im,dir_re,dir_im\n");
                match boundary {
                    OmegaBoundary::Polygon(v) => {
                        for p in v {
                            let _ = writeln!(out, "vertex,{},{},,", num(p.re), num(p.im));
                        }
                    }
                    OmegaBoundary::Rays(rays) => {
                        for r in rays {
                            let _ = writeln!(
                                out,
                                "ray,{},{},{},{}",
                                num(r.start.re),
                                num(r.start.im),
                                num(r.direction.re),
                                num(r.direction.im)
                            );
                        }
                    }
                }
                out
            } else {
                to_json(&json!({"region": region, "omega_boundary": boundary}))
            }
        }
        CommandKind::Check => {
            let opts = SuiteOptions {
                seed: cfg.seed,
                samples: cfg.samples,
                order: cfg.order,
                exec: cfg.exec,
            };
            let report = run_suite(&inv, cfg.suite.expect("check has a suite"), &opts)?;
            let passed = report.passed();
            let text = if cfg.report_json {
                to_json(&report)
            } else {
                report_text(&report)
            };
            return Ok((text, passed));
        }
        CommandKind::Series => unreachable!("handled above"),
    };
    Ok((text, true))
}

/// Parses `args`, runs the command, writes its output and returns the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| {
        let (text, passed) = execute(&cfg)?;
        match &cfg.out {
            Some(path) => std::fs::write(path, text)?,
            None => stdout.write_all(text.as_bytes())?,
        }
        Ok(passed)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
