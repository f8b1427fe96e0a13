//! Reconciliation of the published closed-form expressions with what the
//! implementation computes.
//!
//! Everything here is deterministic: fixed grid, fixed parameter points, no
//! timing or randomness, so the rendered report is byte-stable.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};
use std::fmt::Write as _;

use serde::Serialize;

use crate::chain::{build_u2, conjugate, diagonalize, lambdas_xi, mu_k, betas, xi_floor};
use crate::error::Result;
use crate::holonomy::{
    adiabatic_frame, connection_derived, connection_printed, connection_two_step, printed_connection,
    ConnectionForm,
};
use crate::linalg::{expm_i_hermitian, Complex, ComplexMat4};
use crate::spin::{h0, h_lab, h_rot, ModelParams, SpinOps};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub label: String,
    pub value: f64,
}

fn ev(label: &str, value: f64) -> Evidence {
    Evidence {
        label: label.to_string(),
        value,
    }
}

/// A printed expression that is wrong as written and has an unambiguous fix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Typo {
    pub id: &'static str,
    pub location: &'static str,
    pub as_printed: &'static str,
    pub corrected: &'static str,
    pub evidence: Vec<Evidence>,
}

/// A disagreement that is not a misprint: the construction itself differs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub id: &'static str,
    pub summary: &'static str,
    pub handling: &'static str,
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaRow {
    pub omega0: f64,
    pub omega1: f64,
    pub theta: f64,
    pub quantity: &'static str,
    pub printed: f64,
    pub two_step: f64,
    pub derived: f64,
    /// `printed − derived`.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixDelta {
    pub omega0: f64,
    pub omega1: f64,
    pub theta: f64,
    /// Frobenius distances between the full 4×4 connections.
    pub printed_vs_derived: f64,
    pub two_step_vs_derived: f64,
    pub printed_vs_two_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrataReport {
    pub schema_version: u32,
    pub typos: Vec<Typo>,
    pub findings: Vec<Finding>,
    pub deltas: Vec<DeltaRow>,
    pub matrix_deltas: Vec<MatrixDelta>,
}

pub const GRID_OMEGA0: f64 = 1.0;
pub const GRID_OMEGA1: [f64; 2] = [0.1, 1.0];
pub const GRID_THETA: [f64; 5] = [0.0, PI / 12.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3];

/// Representative point for the single-number evidence entries.
fn probe() -> ModelParams {
    ModelParams::new(1.0, 0.5, FRAC_PI_6).expect("valid probe point")
}

/// Second spin component with the entries exactly as printed.
fn j2_as_printed() -> ComplexMat4 {
    let h = 0.75f64.sqrt();
    let r = |x: f64| Complex::new(x, 0.0);
    let i = Complex::new(0.0, 1.0);
    let z = r(0.0);
    ComplexMat4([
        [z, z, z, r(-h)],
        [z, z, r(h), z],
        [z, r(h), z, -i],
        [r(-h), z, i, z],
    ])
}

fn typos(ops: &SpinOps) -> Result<Vec<Typo>> {
    let i = Complex::new(0.0, 1.0);
    let comm = ops.j3.commutator(&ops.j1);
    let j2p = j2_as_printed();

    let p = probe();
    let t = 1.0;
    let phi = p.omega1 * t;
    let h_0 = h0(&p, ops);
    let printed_lab = expm_i_hermitian(&ops.j3, phi)?
        .mat_mul(&expm_i_hermitian(&ops.j2, p.theta)?)
        .mat_mul(&h_0)
        .mat_mul(&expm_i_hermitian(&ops.j2, -phi)?)
        .mat_mul(&expm_i_hermitian(&ops.j3, -p.theta)?);
    let lab = h_lab(t, &p, ops);

    let h = h_rot(&p, ops);
    let printed_coupling = p.omega1 * 0.75f64.sqrt();

    let alpha = crate::chain::alpha_of_theta(p.theta)?;
    let phase = |s: f64| Complex::new(0.0, s * alpha).exp();
    let printed_u2 = ComplexMat4::from_diag([
        Complex::new(1.0, 0.0),
        Complex::new(1.0, 0.0),
        phase(-1.0),
        phase(1.0),
    ]);
    let lower_off = |m: &ComplexMat4| m[(2, 3)].norm();

    Ok(vec![
        Typo {
            id: "j2-hermiticity",
            location: "element-wise matrix of the second spin component",
            as_printed: "real entries -sqrt(3)/2, +sqrt(3)/2 on the anti-diagonal of the \
                         3/2-1/2 coupling blocks; disagrees with its own block form \
                         -i(sqrt(3)/2)sigma3 and with [J3, J1] = i J2",
            corrected: "J2 = (J+ - J-)/(2i): coupling entries -i sqrt(3)/2 at (3/2, 1/2) and \
                        +i sqrt(3)/2 at (-3/2, -1/2), matching the block form",
            evidence: vec![
                ev("|[J3,J1] - i*J2_printed|_F", (comm - j2p.scale(i)).frobenius_norm()),
                ev("|[J3,J1] - i*J2_implemented|_F", (comm - ops.j2.scale(i)).frobenius_norm()),
            ],
        },
        Typo {
            id: "lab-rotation-order",
            location: "lab-frame Hamiltonian written as a conjugated static Hamiltonian",
            as_printed: "exp(-i phi J3) exp(-i theta J2) H0 exp(i phi J2) exp(i theta J3): the \
                         right-hand factor swaps the angles between generators and is not the \
                         inverse of the left-hand factor",
            corrected: "R H0 R^dagger with R = exp(-i phi J3) exp(-i theta J2), \
                        R^dagger = exp(i theta J2) exp(i phi J3)",
            evidence: vec![
                ev("|H_printed - H_lab|_F at (1, 0.5, pi/6), t = 1", (printed_lab - lab).frobenius_norm()),
                ev("|printed - printed^dagger|_F", printed_lab.hermiticity_residual()),
            ],
        },
        Typo {
            id: "offdiag-sin-theta",
            location: "rotating-frame Hamiltonian in 2x2 block form, 3/2-1/2 coupling block",
            as_printed: "omega1 sqrt(3)/2, without the sin(theta) factor",
            corrected: "omega1 (sqrt(3)/2) sin(theta), which is the coupling xi used later and \
                        vanishes for an untilted field",
            evidence: vec![
                ev("printed coupling at (1, 0.5, pi/6)", printed_coupling),
                ev("computed coupling h_rot[3/2, 1/2]", h[(0, 2)].re),
            ],
        },
        Typo {
            id: "u2-generator",
            location: "first block transformation of the two-step diagonalization",
            as_printed: "diag(1, exp(-i alpha sigma3)): commutes with sigma3, so it turns the \
                         sigma1 term into a sigma1/sigma2 mix instead of removing it",
            corrected: "real rotation exp(-i (alpha/2) sigma2) on the |m| = 1/2 block, which takes \
                        cos(alpha) sigma3 - sin(alpha) sigma1 to sigma3",
            evidence: vec![
                ev("|off-diagonal of 1/2 block| after printed transform", lower_off(&conjugate(&printed_u2, &h))),
                ev("|off-diagonal of 1/2 block| after implemented transform", lower_off(&conjugate(&build_u2(alpha), &h))),
            ],
        },
        Typo {
            id: "stray-dphi",
            location: "block formulas for the 3/2 and 1/2 diagonal blocks of the connection",
            as_printed: "each block written as (a + b sigma3 + c sigma1) d(phi), although the \
                         connection matrix is already defined as the coefficient of d(phi)",
            corrected: "blocks are a + b sigma3 + c sigma1 with no d(phi) factor",
            evidence: vec![],
        },
    ])
}

fn findings(ops: &SpinOps) -> Result<Vec<Finding>> {
    let mut worst_two_step: f64 = 0.0;
    let mut worst_mirror: f64 = 0.0;
    let mut worst_tilt: f64 = 0.0;
    for &omega1 in &GRID_OMEGA1 {
        for &theta in &GRID_THETA {
            let p = ModelParams::new(GRID_OMEGA0, omega1, theta)?;
            let chain = diagonalize(&p, ops)?;
            worst_two_step = worst_two_step.max(chain.two_step_residual);
            let mirrored = printed_connection(-chain.alpha, &chain.betas());
            let two_step = connection_two_step(&chain, ops);
            worst_mirror = worst_mirror.max((mirrored.a_full - two_step.a_full).max_abs());
            let untilted = conjugate(&chain.w, &ops.j3);
            let tilted = conjugate(&adiabatic_frame(&chain, ops), &ops.j3);
            worst_tilt = worst_tilt.max((untilted - tilted).frobenius_norm());
        }
    }

    let generic = ModelParams::new(1.0, 1.0, FRAC_PI_4)?;
    let generic_chain = diagonalize(&generic, ops)?;

    let slow = ModelParams::new(1.0, 1e-3, FRAC_PI_4)?;
    let lam = lambdas_xi(&slow, crate::chain::alpha_of_theta(slow.theta)?);
    let slow_betas = betas(mu_k(lam.lambda1, lam.lambda2, lam.xi, xi_floor(&slow))?.k);

    Ok(vec![
        Finding {
            id: "two-step-inexact",
            summary: "After the first rotation the 3/2-1/2 coupling block becomes xi times a \
                      rotation matrix, not xi times the identity; the printed intermediate \
                      Hamiltonian drops its off-diagonal part. A second step with diagonal beta \
                      blocks cannot remove it, so the two-step product leaves off-diagonal mass \
                      whenever theta > 0.",
            handling: "Gates use the exact constant diagonalizer from the Hermitian \
                       eigendecomposition, with eigenvectors assigned to basis slots by overlap. \
                       The two-step product is still built and its residual reported.",
            evidence: vec![
                ev("relative off-diagonal mass at (1, 1, pi/4)", generic_chain.two_step_residual),
                ev("worst relative off-diagonal mass on the table grid", worst_two_step),
                ev("exact diagonalizer residual at (1, 1, pi/4)", generic_chain.residual),
            ],
        },
        Finding {
            id: "connection-missing-tilt",
            summary: "The block matrix being diagonalized lives in the frame tilted by \
                      exp(-i theta J2), but the connection is built from U1 U2 U3 alone. The \
                      frame that actually follows the solution is U1 T w, giving \
                      A = (T w)^dagger J3 (T w).",
            handling: "The derived connection includes the tilt; the closed-form gate built from \
                       it matches the time-stepping oracle.",
            evidence: vec![ev(
                "worst |w^dagger J3 w - (T w)^dagger J3 (T w)|_F on the table grid",
                worst_tilt,
            )],
        },
        Finding {
            id: "coefficient-rotation-sense",
            summary: "The printed block coefficients are exactly the connection of the two-step \
                      product once alpha is replaced by -alpha, i.e. with the first rotation \
                      taken in the opposite sense. The (3 - cos alpha) factor of the transfer \
                      block is therefore consistent with the two-step construction.",
            handling: "Reported only; the printed coefficients are evaluated literally in the \
                       delta table.",
            evidence: vec![ev(
                "worst |printed(-alpha) - two-step connection|_max on the table grid",
                worst_mirror,
            )],
        },
        Finding {
            id: "root-branch-swap",
            summary: "With mu = k + sqrt(1 + k^2), a vanishing rotation rate at fixed tilt sends \
                      k to +infinity and beta2 to 1: the second step becomes a block swap \
                      rather than the identity, so the two-step chain does not connect to the \
                      untilted branch.",
            handling: "Continuity in theta is checked on the exact diagonalizer and its \
                       diagonal Hamiltonian, which are continuous.",
            evidence: vec![
                ev("beta2 (i = 1) at (1, 1e-3, pi/4)", slow_betas.beta2[0]),
                ev("beta2 (i = 2) at (1, 1e-3, pi/4)", slow_betas.beta2[1]),
            ],
        },
    ])
}

fn coefficient_rows(a: &ConnectionForm) -> [(&'static str, f64); 7] {
    [
        ("a32", a.a32.a),
        ("b32", a.a32.b),
        ("c32", a.a32.c),
        ("a12", a.a12.a),
        ("b12", a.a12.b),
        ("c12", a.a12.c),
        ("tr_norm", a.transfer_norm()),
    ]
}

fn delta_tables(ops: &SpinOps) -> Result<(Vec<DeltaRow>, Vec<MatrixDelta>)> {
    let mut rows = Vec::new();
    let mut matrices = Vec::new();
    for &omega1 in &GRID_OMEGA1 {
        for &theta in &GRID_THETA {
            let p = ModelParams::new(GRID_OMEGA0, omega1, theta)?;
            let chain = diagonalize(&p, ops)?;
            let printed = connection_printed(&chain);
            let two_step = connection_two_step(&chain, ops);
            let derived = connection_derived(&chain, ops);
            let pr = coefficient_rows(&printed);
            let ts = coefficient_rows(&two_step);
            let de = coefficient_rows(&derived);
            for k in 0..pr.len() {
                rows.push(DeltaRow {
                    omega0: GRID_OMEGA0,
                    omega1,
                    theta,
                    quantity: pr[k].0,
                    printed: pr[k].1,
                    two_step: ts[k].1,
                    derived: de[k].1,
                    delta: pr[k].1 - de[k].1,
                });
            }
            matrices.push(MatrixDelta {
                omega0: GRID_OMEGA0,
                omega1,
                theta,
                printed_vs_derived: (printed.a_full - derived.a_full).frobenius_norm(),
                two_step_vs_derived: (two_step.a_full - derived.a_full).frobenius_norm(),
                printed_vs_two_step: (printed.a_full - two_step.a_full).frobenius_norm(),
            });
        }
    }
    Ok((rows, matrices))
}

pub fn build_report() -> Result<ErrataReport> {
    let ops = SpinOps::new();
    let (deltas, matrix_deltas) = delta_tables(&ops)?;
    Ok(ErrataReport {
        schema_version: SCHEMA_VERSION,
        typos: typos(&ops)?,
        findings: findings(&ops)?,
        deltas,
        matrix_deltas,
    })
}

fn num(x: f64) -> String {
    // Print −0 as +0 so exact agreement reads as zero.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:+.9e}")
}

pub fn render_text(r: &ErrataReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "hgate errata report (schema {})", r.schema_version);
    let _ = writeln!(s);
    let _ = writeln!(s, "== Typographical discrepancies ({}) ==", r.typos.len());
    for (n, t) in r.typos.iter().enumerate() {
        let _ = writeln!(s);
        let _ = writeln!(s, "[{}] {}", n + 1, t.id);
        let _ = writeln!(s, "  location:   {}", t.location);
        let _ = writeln!(s, "  as printed: {}", t.as_printed);
        let _ = writeln!(s, "  corrected:  {}", t.corrected);
        for e in &t.evidence {
            let _ = writeln!(s, "  evidence:   {} = {}", e.label, num(e.value));
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "== Structural findings ({}) ==", r.findings.len());
    for f in &r.findings {
        let _ = writeln!(s);
        let _ = writeln!(s, "- {}", f.id);
        let _ = writeln!(s, "  {}", f.summary);
        let _ = writeln!(s, "  handling: {}", f.handling);
        for e in &f.evidence {
            let _ = writeln!(s, "  evidence: {} = {}", e.label, num(e.value));
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "== Connection coefficients: printed vs derived (omega0 = {}) ==",
        GRID_OMEGA0
    );
    let _ = writeln!(
        s,
        "{:>7} {:>12} {:>8} {:>17} {:>17} {:>17} {:>17}",
        "omega1", "theta", "coeff", "printed", "two_step", "derived", "printed-derived"
    );
    for d in &r.deltas {
        let _ = writeln!(
            s,
            "{:>7} {:>12.10} {:>8} {:>17} {:>17} {:>17} {:>17}",
            d.omega1,
            d.theta,
            d.quantity,
            num(d.printed),
            num(d.two_step),
            num(d.derived),
            num(d.delta)
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "== Full-matrix Frobenius distances ==");
    let _ = writeln!(
        s,
        "{:>7} {:>12} {:>17} {:>17} {:>17}",
        "omega1", "theta", "printed-derived", "two_step-derived", "printed-two_step"
    );
    for m in &r.matrix_deltas {
        let _ = writeln!(
            s,
            "{:>7} {:>12.10} {:>17} {:>17} {:>17}",
            m.omega1,
            m.theta,
            num(m.printed_vs_derived),
            num(m.two_step_vs_derived),
            num(m.printed_vs_two_step)
        );
    }
    s
}

pub fn render_json(r: &ErrataReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}
