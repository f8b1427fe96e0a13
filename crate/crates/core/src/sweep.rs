//! Parameter grids evaluated in parallel, emitted in declared order.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::diagonalize;
use crate::error::{Error, Result};
use crate::holonomy::{characterize_gate, gate_from_chain};
use crate::oracle::{integrate_lab, IntegratorConfig};
use crate::spin::{ModelParams, SpinOps};

/// Bumped whenever a column is added, removed or renamed.
pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_GRID_CAP: usize = 1_000_000;

/// Oracle fidelity a verified row must reach.
pub const VERIFY_FIDELITY: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Omega0,
    Omega1,
    Theta,
    T,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega0" => Ok(Axis::Omega0),
            "omega1" => Ok(Axis::Omega1),
            "theta" => Ok(Axis::Theta),
            "t" => Ok(Axis::T),
            other => Err(Error::Sweep(format!(
                "unknown axis '{other}' (expected omega0, omega1, theta or t)"
            ))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Omega0 => "omega0",
            Axis::Omega1 => "omega1",
            Axis::Theta => "theta",
            Axis::T => "t",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl AxisSpec {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Sweep(format!("axis {}: count must be >= 1", self.axis)));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Sweep(format!("axis {}: bounds must be finite", self.axis)));
        }
        if self.spacing == Spacing::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(Error::Sweep(format!(
                "axis {}: log spacing needs a positive range",
                self.axis
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    return self.stop;
                }
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + f * (self.stop - self.start),
                    Spacing::Log => (self.start.ln() + f * (self.stop / self.start).ln()).exp(),
                }
            })
            .collect()
    }
}

/// `name:start:stop:count[:log|:linear]`, e.g. `theta:0.1:1.5:15`.
impl FromStr for AxisSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(Error::Sweep(format!(
                "axis '{s}' must look like name:start:stop:count[:log]"
            )));
        }
        let num = |x: &str| -> Result<f64> {
            x.trim()
                .parse()
                .map_err(|_| Error::Sweep(format!("axis '{s}': '{x}' is not a number")))
        };
        let spacing = match parts.get(4).map(|x| x.trim()) {
            None | Some("linear") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(other) => {
                return Err(Error::Sweep(format!(
                    "axis '{s}': spacing '{other}' is not linear or log"
                )))
            }
        };
        let spec = AxisSpec {
            axis: parts[0].trim().parse()?,
            start: num(parts[1])?,
            stop: num(parts[2])?,
            count: parts[3]
                .trim()
                .parse()
                .map_err(|_| Error::Sweep(format!("axis '{s}': count must be an integer")))?,
            spacing,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// One grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub params: ModelParams,
    pub t: f64,
}

impl Point {
    fn set(&mut self, axis: Axis, v: f64) {
        match axis {
            Axis::Omega0 => self.params.omega0 = v,
            Axis::Omega1 => self.params.omega1 = v,
            Axis::Theta => self.params.theta = v,
            Axis::T => self.t = v,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// First axis varies slowest.
    pub axes: Vec<AxisSpec>,
    /// Values for every parameter not on an axis.
    pub fixed: Point,
    /// Run the oracle at every point.
    pub verify: bool,
    pub integrator: IntegratorConfig,
    /// Record per-row wall time. Off by default so output is reproducible.
    pub timing: bool,
    pub grid_cap: usize,
}

impl SweepSpec {
    pub fn new(fixed: Point) -> Self {
        SweepSpec {
            axes: Vec::new(),
            fixed,
            verify: false,
            integrator: IntegratorConfig::default(),
            timing: false,
            grid_cap: DEFAULT_GRID_CAP,
        }
    }

    pub fn grid_size(&self) -> usize {
        self.axes
            .iter()
            .fold(1usize, |n, a| n.saturating_mul(a.count))
    }

    /// Grid points in lexicographic order over the declared axes.
    pub fn grid(&self) -> Result<Vec<Point>> {
        for (i, a) in self.axes.iter().enumerate() {
            a.validate()?;
            if self.axes[..i].iter().any(|b| b.axis == a.axis) {
                return Err(Error::Sweep(format!("axis {} declared twice", a.axis)));
            }
        }
        let size = self.grid_size();
        if size > self.grid_cap {
            return Err(Error::Sweep(format!(
                "grid has {size} points, above the cap of {}",
                self.grid_cap
            )));
        }
        let mut points = vec![self.fixed];
        for a in &self.axes {
            let values = a.values();
            points = points
                .iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = *p;
                        q.set(a.axis, v);
                        q
                    })
                })
                .collect();
        }
        for p in &points {
            p.params.validate()?;
            if !(p.t.is_finite() && p.t >= 0.0) {
                return Err(Error::Domain {
                    name: "t",
                    value: p.t,
                    requirement: "t must be finite and >= 0",
                });
            }
        }
        Ok(points)
    }
}

/// One output row. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub omega0: f64,
    pub omega1: f64,
    pub theta: f64,
    pub t: f64,
    pub hd_0: f64,
    pub hd_1: f64,
    pub hd_2: f64,
    pub hd_3: f64,
    pub a32_a: f64,
    pub a32_b: f64,
    pub a32_c: f64,
    pub a12_a: f64,
    pub a12_b: f64,
    pub a12_c: f64,
    /// Frobenius norm of the connection's transfer block.
    pub a_tr_norm: f64,
    pub participation_0: usize,
    pub participation_1: usize,
    pub participation_2: usize,
    pub participation_3: usize,
    /// Frobenius norm of the gate's 3/2 ↔ 1/2 blocks.
    pub gate_transfer_norm: f64,
    pub fidelity: Option<f64>,
    pub verify_pass: Option<bool>,
    pub oracle_error: Option<String>,
    pub wall_ms: Option<f64>,
}

pub fn evaluate(point: &Point, spec: &SweepSpec, ops: &SpinOps) -> Result<RunRecord> {
    let start = Instant::now();
    let p = point.params;
    let chain = diagonalize(&p, ops)?;
    let g = gate_from_chain(&chain, ops, point.t)?;
    let mix = characterize_gate(&g);
    let a = &g.connection;

    let (fidelity, verify_pass, oracle_error) = if spec.verify {
        match integrate_lab(&p, point.t, &spec.integrator) {
            Ok(r) => {
                let f = r.fidelity_vs(&g.u_gate);
                (Some(f), Some(f >= VERIFY_FIDELITY), None)
            }
            Err(e) => (None, Some(false), Some(e.to_string())),
        }
    } else {
        (None, None, None)
    };

    Ok(RunRecord {
        schema_version: SCHEMA_VERSION,
        omega0: p.omega0,
        omega1: p.omega1,
        theta: p.theta,
        t: point.t,
        hd_0: g.h_d[0],
        hd_1: g.h_d[1],
        hd_2: g.h_d[2],
        hd_3: g.h_d[3],
        a32_a: a.a32.a,
        a32_b: a.a32.b,
        a32_c: a.a32.c,
        a12_a: a.a12.a,
        a12_b: a.a12.b,
        a12_c: a.a12.c,
        a_tr_norm: a.transfer_norm(),
        participation_0: mix.participation[0],
        participation_1: mix.participation[1],
        participation_2: mix.participation[2],
        participation_3: mix.participation[3],
        gate_transfer_norm: mix.transfer_norm,
        fidelity,
        verify_pass,
        oracle_error,
        wall_ms: spec.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

/// Evaluates every grid point on the rayon pool; rows come back in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<RunRecord>> {
    let points = spec.grid()?;
    let ops = SpinOps::new();
    points.par_iter().map(|p| evaluate(p, spec, &ops)).collect()
}

pub fn write_csv<W: Write>(rows: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        return Ok(());
    }
    for r in rows {
        w.serialize(r).map_err(|e| Error::Sweep(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Sweep(e.to_string()))
}

pub fn write_json_lines<W: Write>(rows: &[RunRecord], mut out: W) -> Result<()> {
    for r in rows {
        serde_json::to_writer(&mut out, r).map_err(|e| Error::Sweep(e.to_string()))?;
        out.write_all(b"\n").map_err(|e| Error::Sweep(e.to_string()))?;
    }
    Ok(())
}
