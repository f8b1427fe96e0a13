//! Argument handling and output for the `hgate` executable.

use std::f64::consts::{FRAC_PI_6, PI};
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::Config;
use crate::error::Error;
use crate::holonomy::{characterize_gate, gate, GateResult, MixingReport};
use crate::linalg::{ComplexMat4, DIM};
use crate::oracle::IntegratorConfig;
use crate::spin::ModelParams;
use crate::sweep::{self, AxisSpec, Point, SweepSpec};
use crate::verify::{self, VerifyOptions};
use crate::errata;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_OMEGA0: f64 = 1.0;
pub const DEFAULT_OMEGA1: f64 = 0.5;
pub const DEFAULT_THETA: f64 = FRAC_PI_6;
pub const DEFAULT_T: f64 = 4.0 * PI;

pub const GATE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "hgate", version, about = "Holonomic spin-3/2 gate: evaluate, sweep, verify")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the gate at one parameter point.
    Gate {
        #[command(flatten)]
        common: Common,
        /// Also print the geometric and dynamical factors and the frame.
        #[arg(long)]
        factors: bool,
    },
    /// Evaluate a parameter grid and emit one row per point.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Axis as name:start:stop:count[:log]; repeat for more axes, first varies slowest.
        #[arg(long = "axis", value_name = "SPEC")]
        axes: Vec<String>,
        /// Compare every row against the time-stepping oracle.
        #[arg(long)]
        verify: bool,
        /// Add a wall_ms column (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
        /// Largest grid accepted.
        #[arg(long, value_name = "N")]
        grid_cap: Option<usize>,
    },
    /// Run the invariant suite and print a pass/fail table.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Print the reconciliation report for the published formulas.
    Errata {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args, Default)]
pub struct Common {
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub omega0: Option<f64>,
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub omega1: Option<f64>,
    /// Tilt in radians.
    #[arg(long, value_name = "RAD", conflicts_with = "theta_deg", allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Tilt in degrees.
    #[arg(long, value_name = "DEG", allow_negative_numbers = true)]
    pub theta_deg: Option<f64>,
    /// Evolution time.
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(long)]
    pub json: bool,
    /// Write output here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Override every residual tolerance in verify.
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    /// Integrator step scale (0, 0.1].
    #[arg(long, value_name = "X")]
    pub step_scale: Option<f64>,
    /// key = value settings; flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

/// Reason a command could not produce its normal result.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { name, .. } => Failure::Usage(format!("--{}: {e}", flag_name(name))),
            Error::Sweep(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn flag_name(name: &str) -> String {
    name.replace('_', "-")
}

/// Flag values merged over the config file.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub point: Point,
    pub json: bool,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub integrator: IntegratorConfig,
    pub grid_cap: Option<usize>,
}

fn resolve(c: &Common) -> Result<Resolved, Failure> {
    let cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("--config {}: {e}", path.display())))?;
            Config::parse(&text).map_err(|e| Failure::Usage(format!("--config: {e}")))?
        }
        None => Config::default(),
    };
    let get = |key: &str| cfg.get::<f64>(key).map_err(|e| Failure::Usage(format!("--config: {e}")));

    let theta = match (c.theta, c.theta_deg) {
        (Some(r), _) => r,
        (None, Some(d)) => d.to_radians(),
        (None, None) => match (get("theta")?, get("theta-deg")?) {
            (Some(r), _) => r,
            (None, Some(d)) => d.to_radians(),
            (None, None) => DEFAULT_THETA,
        },
    };
    let params = ModelParams {
        omega0: c.omega0.or(get("omega0")?).unwrap_or(DEFAULT_OMEGA0),
        omega1: c.omega1.or(get("omega1")?).unwrap_or(DEFAULT_OMEGA1),
        theta,
    };
    params.validate().map_err(|e| match e {
        Error::Domain { name: "theta", .. } if c.theta.is_none() && c.theta_deg.is_some() => {
            Failure::Usage(format!("--theta-deg: {e}"))
        }
        other => other.into(),
    })?;
    let t = c.t.or(get("t")?).unwrap_or(DEFAULT_T);
    if !(t.is_finite() && t >= 0.0) {
        return Err(Failure::Usage(format!("--t: t = {t} must be finite and >= 0")));
    }

    let seed = match c.seed {
        Some(s) => s,
        None => cfg
            .get::<u64>("seed")
            .map_err(|e| Failure::Usage(format!("--config: {e}")))?
            .unwrap_or(verify::DEFAULT_SEED),
    };
    let tol = c.tol.or(get("tol")?);
    if let Some(x) = tol {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Failure::Usage(format!("--tol: {x} must be finite and >= 0")));
        }
    }
    let mut integrator = IntegratorConfig::default();
    if let Some(s) = c.step_scale.or(get("step-scale")?) {
        integrator.step_scale = s;
    }
    integrator
        .validate()
        .map_err(|e| Failure::Usage(format!("--step-scale: {e}")))?;
    let json = c.json
        || cfg
            .get::<bool>("json")
            .map_err(|e| Failure::Usage(format!("--config: {e}")))?
            .unwrap_or(false);
    let out = c.out.clone().or_else(|| cfg.raw("out").map(PathBuf::from));
    let grid_cap = cfg
        .get::<usize>("grid-cap")
        .map_err(|e| Failure::Usage(format!("--config: {e}")))?;

    Ok(Resolved {
        point: Point { params, t },
        json,
        out,
        seed,
        tol,
        integrator,
        grid_cap,
    })
}

type Pair = [f64; 2];

fn pairs(m: &ComplexMat4) -> [[Pair; DIM]; DIM] {
    std::array::from_fn(|i| std::array::from_fn(|j| [m[(i, j)].re, m[(i, j)].im]))
}

#[derive(Serialize)]
struct GateJson {
    schema_version: u32,
    params: ModelParams,
    t: f64,
    u_gate: [[Pair; DIM]; DIM],
    #[serde(skip_serializing_if = "Option::is_none")]
    u_geometric: Option<[[Pair; DIM]; DIM]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u_dynamic: Option<[[Pair; DIM]; DIM]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    frame: Option<[[Pair; DIM]; DIM]>,
    h_d: [f64; DIM],
    connection: crate::holonomy::ConnectionForm,
    connection_matrix: [[Pair; DIM]; DIM],
    mixing: MixingReport,
}

fn format_matrix(s: &mut String, name: &str, m: &ComplexMat4) {
    let _ = writeln!(s, "{name} =");
    for i in 0..DIM {
        let row: Vec<String> = (0..DIM)
            .map(|j| {
                let z = m[(i, j)];
                format!("{:+.10} {} {:.10}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
            })
            .collect();
        let _ = writeln!(s, "  [{}]", row.join(", "));
    }
}

pub fn render_gate(g: &GateResult, factors: bool, json: bool) -> String {
    let mix = characterize_gate(g);
    if json {
        let out = GateJson {
            schema_version: GATE_SCHEMA_VERSION,
            params: g.params,
            t: g.t,
            u_gate: pairs(&g.u_gate),
            u_geometric: factors.then(|| pairs(&g.u_geometric)),
            u_dynamic: factors.then(|| pairs(&g.u_dynamic)),
            frame: factors.then(|| pairs(&g.frame)),
            h_d: g.h_d,
            connection: g.connection,
            connection_matrix: pairs(&g.connection.a_full),
            mixing: mix,
        };
        let mut s = serde_json::to_string_pretty(&out).expect("gate serializes");
        s.push('\n');
        return s;
    }
    let mut s = String::new();
    let p = g.params;
    let _ = writeln!(
        s,
        "omega0 = {}, omega1 = {}, theta = {}, t = {}",
        p.omega0, p.omega1, p.theta, g.t
    );
    let _ = writeln!(s, "basis order: |3/2>, |-3/2>, |1/2>, |-1/2>");
    format_matrix(&mut s, "u_gate", &g.u_gate);
    if factors {
        format_matrix(&mut s, "u_geometric = exp(-i omega1 t A)", &g.u_geometric);
        format_matrix(&mut s, "u_dynamic = exp(-i h_d t)", &g.u_dynamic);
        format_matrix(&mut s, "frame", &g.frame);
        format_matrix(&mut s, "A", &g.connection.a_full);
    }
    let _ = writeln!(s, "h_d = {:?}", g.h_d);
    let _ = writeln!(
        s,
        "participation = {:?}, transfer norm = {:.6e}",
        mix.participation, mix.transfer_norm
    );
    s
}

fn emit(r: &Resolved, text: &[u8], stdout: &mut dyn Write) -> Result<(), Failure> {
    match &r.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Runtime(format!("--out {}: {e}", path.display()))),
        None => stdout
            .write_all(text)
            .map_err(|e| Failure::Runtime(e.to_string())),
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Gate { common, factors } => {
            let r = resolve(&common)?;
            let g = gate(&r.point.params, r.point.t)?;
            emit(&r, render_gate(&g, factors, r.json).as_bytes(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Sweep {
            common,
            axes,
            verify,
            timing,
            grid_cap,
        } => {
            let r = resolve(&common)?;
            let mut spec = SweepSpec::new(r.point);
            spec.axes = axes
                .iter()
                .map(|a| a.parse::<AxisSpec>())
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::Usage(format!("--axis: {e}")))?;
            spec.verify = verify;
            spec.timing = timing;
            spec.integrator = r.integrator;
            if let Some(cap) = grid_cap.or(r.grid_cap) {
                spec.grid_cap = cap;
            }
            let rows = sweep::run_sweep(&spec)?;
            let mut buf = Vec::new();
            if r.json {
                sweep::write_json_lines(&rows, &mut buf)?;
            } else {
                sweep::write_csv(&rows, &mut buf)?;
            }
            emit(&r, &buf, stdout)?;
            let failed = rows.iter().any(|row| row.verify_pass == Some(false));
            Ok(if failed { EXIT_VERIFY_FAILED } else { EXIT_OK })
        }
        Command::Verify { common } => {
            let r = resolve(&common)?;
            let checks = verify::run_verify(&VerifyOptions {
                seed: r.seed,
                tol: r.tol,
                integrator: r.integrator,
            });
            let text = if r.json {
                let mut s = serde_json::to_string_pretty(&checks).expect("checks serialize");
                s.push('\n');
                s
            } else {
                verify::render_table(&checks)
            };
            emit(&r, text.as_bytes(), stdout)?;
            Ok(if verify::all_pass(&checks) {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
        Command::Errata { common } => {
            let r = resolve(&common)?;
            let report = errata::build_report()?;
            let text = if r.json {
                errata::render_json(&report)
            } else {
                errata::render_text(&report)
            };
            emit(&r, text.as_bytes(), stdout)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_VERIFY_FAILED
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("hgate").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn theta_near_right_angle_is_rejected() {
        let (code, _, err) = call(&["gate", "--theta", "1.5707963"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--theta") && err.contains("theta < pi/2"), "{err}");
    }

    #[test]
    fn degrees_and_radians_conflict() {
        let (code, _, _) = call(&["gate", "--theta", "0.1", "--theta-deg", "5"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, err) = call(&["gate", "--theta-deg", "95"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--theta-deg"), "{err}");
    }

    #[test]
    fn negative_frequency_names_flag() {
        let (code, _, err) = call(&["gate", "--omega0", "-1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--omega0"), "{err}");
        let (code, _, err) = call(&["gate", "--t", "-1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--t"), "{err}");
    }

    #[test]
    fn bad_axis_is_usage_error() {
        let (code, _, err) = call(&["sweep", "--axis", "phi:0:1:2"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--axis"), "{err}");
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, _) = call(&["gate", "--frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("errata"));
    }
}
