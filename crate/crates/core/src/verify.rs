//! Invariant checks across every module, reported as a pass/fail table.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, TAU};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{alpha_of_theta, diagonalize, DiagChain};
use crate::error::Result;
use crate::holonomy::{
    characterize_gate, composed_propagator, connection_derived, direct_propagator,
    energy_block_leakage, gate, gate_from_chain, wilczek_zee_offdiagonal, Level,
};
use crate::linalg::{expm_i_hermitian, hermitian_eig, Complex, ComplexMat4, DIM};
use crate::oracle::{convergence_order, integrate_lab, rotating_frame_check, IntegratorConfig};
use crate::spin::{h0, h_lab, h_rot, lab_rotation, ModelParams, SpinOps, CASIMIR};

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const RANDOM_POINTS: usize = 200;
pub const RANDOM_ORACLE_DRAWS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    /// Module whose invariant this exercises.
    pub module: &'static str,
    /// Worst value over the sampled points.
    pub value: f64,
    pub relation: Relation,
    pub tolerance: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.value <= self.tolerance,
            Relation::AtLeast => self.value >= self.tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Replaces the tolerance of every residual (at-most) check.
    pub tol: Option<f64>,
    pub integrator: IntegratorConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: DEFAULT_SEED,
            tol: None,
            integrator: IntegratorConfig::default(),
        }
    }
}

struct Table {
    checks: Vec<Check>,
    tol: Option<f64>,
}

impl Table {
    fn at_most(&mut self, module: &'static str, name: &'static str, value: f64, tolerance: f64) {
        self.checks.push(Check {
            name,
            module,
            value,
            relation: Relation::AtMost,
            tolerance: self.tol.unwrap_or(tolerance),
        });
    }

    fn at_least(&mut self, module: &'static str, name: &'static str, value: f64, threshold: f64) {
        self.checks.push(Check {
            name,
            module,
            value,
            relation: Relation::AtLeast,
            tolerance: threshold,
        });
    }
}

/// Failures to evaluate count as an infinitely bad residual.
fn or_inf(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::INFINITY)
}

fn worst<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

pub fn random_hermitian(rng: &mut impl Rng) -> ComplexMat4 {
    let mut m = ComplexMat4::zeros();
    for i in 0..DIM {
        m[(i, i)] = Complex::new(rng.random_range(-5.0..5.0), 0.0);
        for j in i + 1..DIM {
            let z = Complex::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// ω₀ ∈ [0.1, 10], ω₁ ∈ [0, 10], θ ∈ [0, 1.4].
pub fn random_params(rng: &mut impl Rng) -> ModelParams {
    ModelParams {
        omega0: rng.random_range(0.1..=10.0),
        omega1: rng.random_range(0.0..=10.0),
        theta: rng.random_range(0.0..=1.4),
    }
}

/// The 3×3×3 oracle grid: ω₁/ω₀ ∈ {0.1, 1, 10}, θ ∈ {π/6, π/4, π/3},
/// t ∈ {1, 5, 10} rotation periods, ω₀ = 1.
pub fn oracle_grid() -> Vec<(ModelParams, f64)> {
    let mut g = Vec::new();
    for omega1 in [0.1, 1.0, 10.0] {
        for theta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
            for periods in [1.0, 5.0, 10.0] {
                let p = ModelParams {
                    omega0: 1.0,
                    omega1,
                    theta,
                };
                g.push((p, periods * TAU / omega1));
            }
        }
    }
    g
}

fn linalg_checks(t: &mut Table, rng: &mut ChaCha8Rng) {
    let mats: Vec<ComplexMat4> = (0..RANDOM_POINTS).map(|_| random_hermitian(rng)).collect();
    let mut recon: f64 = 0.0;
    let mut orth: f64 = 0.0;
    let mut group: f64 = 0.0;
    let mut unit: f64 = 0.0;
    for m in &mats {
        match hermitian_eig(m) {
            Ok(e) => {
                recon = recon.max((e.reconstruct() - *m).frobenius_norm() / m.frobenius_norm());
                orth = orth.max(e.vectors.unitarity_residual());
            }
            Err(_) => recon = f64::INFINITY,
        }
        let (t1, t2) = (0.37, 1.91);
        let r = (|| -> Result<(f64, f64)> {
            let a = expm_i_hermitian(m, t1)?;
            let b = expm_i_hermitian(m, t2)?;
            let ab = expm_i_hermitian(m, t1 + t2)?;
            Ok(((a.mat_mul(&b) - ab).frobenius_norm(), ab.unitarity_residual()))
        })();
        let (g, u) = r.unwrap_or((f64::INFINITY, f64::INFINITY));
        group = group.max(g);
        unit = unit.max(u);
    }
    t.at_most("core-linalg", "eig_reconstruction", recon, 1e-12);
    t.at_most("core-linalg", "eig_vectors_unitary", orth, 1e-12);
    t.at_most("core-linalg", "expm_group_law", group, 1e-11);
    t.at_most("core-linalg", "expm_unitary", unit, 1e-12);
}

fn spin_checks(t: &mut Table, rng: &mut ChaCha8Rng, ops: &SpinOps) {
    let i = Complex::new(0.0, 1.0);
    let su2 = worst([
        (ops.j1.commutator(&ops.j2) - ops.j3.scale(i)).max_abs(),
        (ops.j2.commutator(&ops.j3) - ops.j1.scale(i)).max_abs(),
        (ops.j3.commutator(&ops.j1) - ops.j2.scale(i)).max_abs(),
    ]);
    t.at_most("spin-model", "su2_commutators", su2, 1e-14);
    let casimir = (ops.casimir() - ComplexMat4::identity().scale_real(CASIMIR)).max_abs();
    t.at_most("spin-model", "casimir", casimir, 1e-14);
    let j3 = (ops.j3 - ComplexMat4::from_diag_real([1.5, -1.5, 0.5, -0.5])).max_abs();
    t.at_most("spin-model", "j3_diagonal", j3, 1e-14);
    let herm = worst([&ops.j1, &ops.j2, &ops.j3].map(|j| j.hermiticity_residual()));
    t.at_most("spin-model", "spin_ops_hermitian", herm, 1e-15);

    let mut rot: f64 = 0.0;
    for _ in 0..100 {
        let p = random_params(rng);
        let time = rng.random_range(0.0..10.0);
        let r = lab_rotation(time, &p, ops);
        let want = r.mat_mul(&h0(&p, ops)).mat_mul(&r.adjoint());
        let scale = 1.0f64.max(p.omega0);
        rot = rot.max((h_lab(time, &p, ops) - want).frobenius_norm() / scale);
    }
    t.at_most("spin-model", "h_lab_is_rotated_h0", rot, 1e-12);
}

fn chain_checks(t: &mut Table, points: &[ModelParams], chains: &[Result<DiagChain>], ops: &SpinOps) {
    let ok: Vec<&DiagChain> = chains.iter().filter_map(|c| c.as_ref().ok()).collect();
    let failures = (chains.len() - ok.len()) as f64;
    t.at_most("diag-chain", "diagonalize_failures", failures, 0.0);

    let tan = worst(points.iter().filter(|p| p.theta > 0.0).map(|p| {
        let a = or_inf(alpha_of_theta(p.theta));
        let want = 2.0 * p.theta.tan();
        (a.tan() - want).abs() / want
    }));
    t.at_most("diag-chain", "tan_alpha_relative", tan, 1e-14);

    let mixing: Vec<_> = ok.iter().filter_map(|c| c.mixing.map(|m| (c, m))).collect();
    let unitarity = worst(mixing.iter().flat_map(|(_, m)| m.betas.unitarity_residual()));
    t.at_most("diag-chain", "beta_unitarity", unitarity, 1e-12);
    let condition = worst(ok.iter().flat_map(|c| c.condition_residual()));
    t.at_most("diag-chain", "diagonalization_condition", condition, 1e-10);
    let ratio = worst(mixing.iter().flat_map(|(_, m)| {
        [0, 1].map(|i| (m.betas.beta2[i] - m.mu[i] * m.betas.beta1[i]).abs())
    }));
    t.at_most("diag-chain", "beta2_equals_mu_beta1", ratio, 1e-12);
    let mu_positive = mixing
        .iter()
        .flat_map(|(_, m)| m.mu)
        .fold(f64::INFINITY, f64::min);
    t.at_least("diag-chain", "mu_positive_min", mu_positive, f64::MIN_POSITIVE);
    let first_step = worst(ok.iter().map(|c| {
        let h = c.after_first_step(ops);
        h[(2, 3)].norm() / h.frobenius_norm()
    }));
    t.at_most("diag-chain", "first_step_removes_sigma1", first_step, 1e-12);

    let two_step = worst(ok.iter().map(|c| c.two_step_residual));
    t.at_most("diag-chain", "two_step_offdiag_relative", two_step, 1e-10);
    let exact = worst(ok.iter().map(|c| c.residual));
    t.at_most("diag-chain", "diagonalizer_offdiag_relative", exact, 1e-10);
    let w_unitary = worst(ok.iter().map(|c| c.w.unitarity_residual()));
    t.at_most("diag-chain", "diagonalizer_unitary", w_unitary, 1e-12);
    let spectrum = worst(ok.iter().map(|c| {
        let e = hermitian_eig(&h_rot(&c.params, ops));
        let mut hd = c.h_d;
        hd.sort_by(f64::total_cmp);
        match e {
            Ok(e) => worst((0..DIM).map(|k| (e.values[k] - hd[k]).abs()))
                / 1.0f64.max(e.values[DIM - 1].abs().max(e.values[0].abs())),
            Err(_) => f64::INFINITY,
        }
    }));
    t.at_most("diag-chain", "spectrum_preserved", spectrum, 1e-10);

    let cont = (|| -> Result<f64> {
        let base = ModelParams::new(1.0, 0.4, 0.0)?;
        let eps = ModelParams { theta: 1e-6, ..base };
        let a = diagonalize(&base, ops)?;
        let b = diagonalize(&eps, ops)?;
        Ok(worst([
            (a.w - b.w).max_abs(),
            worst((0..DIM).map(|k| (a.h_d[k] - b.h_d[k]).abs())),
            (a.alpha - b.alpha).abs(),
            (a.lambdas.xi - b.lambdas.xi).abs(),
        ]))
    })();
    t.at_most("diag-chain", "theta_zero_continuity", or_inf(cont), 1e-4);
}

fn holonomy_checks(t: &mut Table, chains: &[Result<DiagChain>], ops: &SpinOps) {
    let ok: Vec<&DiagChain> = chains.iter().filter_map(|c| c.as_ref().ok()).collect();
    let conns: Vec<_> = ok.iter().map(|c| connection_derived(c, ops)).collect();
    t.at_most(
        "holonomy",
        "connection_hermitian",
        worst(conns.iter().map(|a| a.a_full.hermiticity_residual())),
        1e-12,
    );
    t.at_most(
        "holonomy",
        "connection_traceless",
        worst(conns.iter().map(|a| a.a_full.trace().norm())),
        1e-10,
    );
    t.at_most(
        "holonomy",
        "connection_spectrum",
        worst(conns.iter().map(|a| match hermitian_eig(&a.a_full) {
            Ok(e) => worst((0..DIM).map(|k| (e.values[k] - [-1.5, -0.5, 0.5, 1.5][k]).abs())),
            Err(_) => f64::INFINITY,
        })),
        1e-10,
    );
    let untilted = (|| -> Result<f64> {
        let c = diagonalize(&ModelParams::new(1.0, 0.5, 0.0)?, ops)?;
        Ok((connection_derived(&c, ops).a_full - ops.j3).max_abs())
    })();
    t.at_most("holonomy", "untilted_connection_is_j3", or_inf(untilted), 0.0);

    let nonadiabatic = (|| -> Result<f64> {
        let c = diagonalize(&ModelParams::new(1.0, 1.0, FRAC_PI_4)?, ops)?;
        Ok(connection_derived(&c, ops).a32.c.abs())
    })();
    t.at_least("holonomy", "nonadiabatic_a32_offdiag", nonadiabatic.unwrap_or(0.0), 1e-3);

    let times = [0.0, 0.7, 4.0 * std::f64::consts::PI, 31.0];
    let mut factor_unitary: f64 = 0.0;
    let mut a_form: f64 = 0.0;
    let mut group: f64 = 0.0;
    for c in ok.iter().take(50) {
        for &time in &times {
            let r = (|| -> Result<(f64, f64, f64)> {
                let g = gate_from_chain(c, ops, time)?;
                let u = worst([
                    g.u_gate.unitarity_residual(),
                    g.u_geometric.unitarity_residual(),
                    g.u_dynamic.unitarity_residual(),
                ]);
                let scale = 1.0f64.max(time * (c.params.omega0 + 1.5 * c.params.omega1));
                let direct = (g.u_gate - direct_propagator(&c.params, time)?).frobenius_norm() / scale;
                let w1 = c.params.omega1;
                let a = &g.connection.a_full;
                let split = expm_i_hermitian(a, w1 * 0.3 * time)?
                    .mat_mul(&expm_i_hermitian(a, w1 * 0.7 * time)?);
                Ok((u, direct, (split - g.u_geometric).frobenius_norm()))
            })();
            let (u, d, gl) = r.unwrap_or((f64::INFINITY, f64::INFINITY, f64::INFINITY));
            factor_unitary = factor_unitary.max(u);
            a_form = a_form.max(d);
            group = group.max(gl);
        }
    }
    t.at_most("holonomy", "gate_factors_unitary", factor_unitary, 1e-12);
    t.at_most("holonomy", "connection_form_equals_direct", a_form, 1e-12);
    t.at_most("holonomy", "geometric_group_law", group, 1e-11);

    let no_t_order = worst(
        [
            (1.0, 0.5, FRAC_PI_6, 12.566_370_614_359_172),
            (1.0, 1.0, FRAC_PI_4, 6.0),
            (2.0, 0.3, 0.2, 9.0),
            (0.5, 3.0, 1.2, 2.5),
            (1.0, 10.0, FRAC_PI_3, 1.3),
        ]
        .into_iter()
        .flat_map(|(w0, w1, th, time)| {
            [2usize, 10, 100].map(move |n| {
                or_inf((|| -> Result<f64> {
                    let p = ModelParams::new(w0, w1, th)?;
                    let single = gate(&p, time)?.u_gate;
                    Ok((composed_propagator(&p, time, n)? - single).frobenius_norm())
                })())
            })
        }),
    );
    t.at_most("holonomy", "composition_needs_no_time_ordering", no_t_order, 1e-11);

    let untilted_transfer = worst([0.0, 1.0, 17.3, 250.0].map(|time| {
        or_inf((|| -> Result<f64> {
            Ok(characterize_gate(&gate(&ModelParams::new(1.0, 0.7, 0.0)?, time)?).transfer_norm)
        })())
    }));
    t.at_most("holonomy", "untilted_gate_transfer", untilted_transfer, 0.0);

    let slow = or_inf(ModelParams::new(1.0, 1e-3, FRAC_PI_4).and_then(|p| energy_block_leakage(&p)));
    t.at_most("holonomy", "adiabatic_leakage_slow", slow, 1e-2);
    let fast = ModelParams::new(1.0, 1.0, FRAC_PI_4)
        .and_then(|p| energy_block_leakage(&p))
        .unwrap_or(0.0);
    t.at_least("holonomy", "nonadiabatic_leakage_fast", fast, 0.05);

    let wz = (|| -> Result<(f64, f64)> {
        let p = ModelParams::new(1.0, 1e-3, FRAC_PI_4)?;
        Ok((
            wilczek_zee_offdiagonal(&p, Level::ThreeHalves)?,
            (wilczek_zee_offdiagonal(&p, Level::OneHalf)? - p.theta.sin()).abs(),
        ))
    })();
    let (wz32, wz12) = wz.unwrap_or((f64::INFINITY, f64::INFINITY));
    t.at_most("holonomy", "adiabatic_connection_32_offdiag", wz32, 1e-6);
    t.at_most("holonomy", "adiabatic_connection_12_offdiag_vs_sin_theta", wz12, 1e-6);

    let mixing = ModelParams::new(1.0, 1.0, FRAC_PI_4)
        .and_then(|p| gate(&p, p.period()))
        .map(|g| *characterize_gate(&g).participation.iter().max().unwrap_or(&0) as f64)
        .unwrap_or(0.0);
    t.at_least("holonomy", "gate_max_participation", mixing, 2.0);
}

fn oracle_checks(t: &mut Table, rng: &mut ChaCha8Rng, opts: &VerifyOptions) {
    let cfg = opts.integrator;
    let grid = oracle_grid();
    let results: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|(p, time)| {
            let closed = gate(p, *time);
            let numeric = integrate_lab(p, *time, &cfg);
            match (closed, numeric) {
                (Ok(g), Ok(r)) => (1.0 - r.fidelity_vs(&g.u_gate), r.norm_drift),
                _ => (f64::INFINITY, f64::INFINITY),
            }
        })
        .collect();
    t.at_most("oracle-propagation", "grid_infidelity", worst(results.iter().map(|r| r.0)), 1e-6);
    t.at_most("oracle-propagation", "grid_norm_drift", worst(results.iter().map(|r| r.1)), 1e-8);

    let draws: Vec<(ModelParams, f64)> = (0..RANDOM_ORACLE_DRAWS)
        .map(|_| {
            let omega0 = 1.0;
            let ratio = 10f64.powf(rng.random_range(-2.0..=1.0));
            let p = ModelParams {
                omega0,
                omega1: ratio * omega0,
                theta: rng.random_range(0.0..=1.4),
            };
            (p, rng.random_range(0.0..=20.0))
        })
        .collect();
    let frame = worst(
        draws
            .par_iter()
            .map(|(p, time)| 1.0 - or_inf(rotating_frame_check(p, *time, &cfg)))
            .collect::<Vec<_>>(),
    );
    t.at_most("oracle-propagation", "rotating_frame_infidelity", frame, 1e-6);

    let slope = convergence_order(
        &ModelParams {
            omega0: 1.0,
            omega1: 0.7,
            theta: 0.6,
        },
        20.0,
        &[0.02, 0.01, 0.005],
    )
    .map(|f| (f.slope - 4.0).abs())
    .unwrap_or(f64::INFINITY);
    t.at_most("oracle-propagation", "convergence_order_minus_4", slope, 0.5);
}

pub fn run_verify(opts: &VerifyOptions) -> Vec<Check> {
    let ops = SpinOps::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut table = Table {
        checks: Vec::new(),
        tol: opts.tol,
    };
    linalg_checks(&mut table, &mut rng);
    spin_checks(&mut table, &mut rng, &ops);
    let points: Vec<ModelParams> = (0..RANDOM_POINTS).map(|_| random_params(&mut rng)).collect();
    let chains: Vec<Result<DiagChain>> = points.iter().map(|p| diagonalize(p, &ops)).collect();
    chain_checks(&mut table, &points, &chains, &ops);
    holonomy_checks(&mut table, &chains, &ops);
    oracle_checks(&mut table, &mut rng, opts);
    table.checks
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(Check::pass)
}

pub fn render_table(checks: &[Check]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<20} {:<44} {:>14}     {:>11}  status",
        "module", "check", "value", "tolerance"
    );
    for c in checks {
        let rel = match c.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        let _ = writeln!(
            s,
            "{:<20} {:<44} {:>14.6e} {:>3} {:>11.3e}  {}",
            c.module,
            c.name,
            c.value,
            rel,
            c.tolerance,
            if c.pass() { "PASS" } else { "FAIL" }
        );
    }
    let failed = checks.iter().filter(|c| !c.pass()).count();
    let _ = writeln!(s, "{} checks, {} passed, {} failed", checks.len(), checks.len() - failed, failed);
    s
}
