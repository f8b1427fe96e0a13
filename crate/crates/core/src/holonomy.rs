//! Effective gauge potential and the closed-form gate.
//!
//! With `T = exp(−iθJ₂)` and `w` the constant diagonalizer of `h_rot`, the full
//! frame `U(φ) = exp(−iφJ₃)·T·w` gives the connection
//! `A = i·U†·dU/dφ = (T·w)†·J₃·(T·w)`, which does not depend on time. The lab
//! propagator then factors without time ordering:
//!
//! ```text
//! U_lab(t) = (T·w) · exp(−iω₁t·A) · exp(−i·h_d·t) · (T·w)†
//! ```

use serde::Serialize;

use crate::chain::{conjugate, diagonalize, Betas, DiagChain};
use crate::error::{Error, Result};
use crate::linalg::{expm_i_diagonal, expm_i_hermitian, Complex, ComplexMat4, Mat2, DIM};
use crate::spin::{frame_rotation, h_lab, h_rot, tilt, ModelParams, SpinOps};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionSource {
    /// `(T·w)†·J₃·(T·w)` with the exact diagonalizer.
    Derived,
    /// `(u₂·u₃)†·J₃·(u₂·u₃)`: the two-step product, without the tilt.
    TwoStep,
    /// Closed-form block coefficients evaluated from α and β.
    PrintedLiteral,
}

/// Coefficients of a 2×2 block on `{I, σ₃, σ₁, σ₂}`, each `½·tr(σ·block)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PauliCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl PauliCoeffs {
    pub fn project(m: &Mat2) -> Self {
        let [i, s3, s1, s2] = pauli_project(m);
        PauliCoeffs {
            a: i.re,
            b: s3.re,
            c: s1.re,
            d: s2.re,
        }
    }

    pub fn to_block(&self) -> Mat2 {
        let r = |x: f64| Complex::new(x, 0.0);
        let i = Complex::new(0.0, 1.0);
        [
            [r(self.a + self.b), r(self.c) - i * self.d],
            [r(self.c) + i * self.d, r(self.a - self.b)],
        ]
    }
}

/// Complex projections `½·tr(σ·m)` for σ in (I, σ₃, σ₁, σ₂).
pub fn pauli_project(m: &Mat2) -> [Complex; 4] {
    let i = Complex::new(0.0, 1.0);
    [
        0.5 * (m[0][0] + m[1][1]),
        0.5 * (m[0][0] - m[1][1]),
        0.5 * (m[0][1] + m[1][0]),
        0.5 * (i * m[0][1] - i * m[1][0]),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConnectionForm {
    #[serde(skip)]
    pub a_full: ComplexMat4,
    /// |m| = 3/2 diagonal block.
    pub a32: PauliCoeffs,
    /// |m| = 1/2 diagonal block.
    pub a12: PauliCoeffs,
    /// Upper-right transfer block coupling the two subspaces.
    #[serde(skip)]
    pub a_tr: Mat2,
    pub source: ConnectionSource,
}

impl ConnectionForm {
    pub fn from_matrix(a_full: ComplexMat4, source: ConnectionSource) -> Self {
        ConnectionForm {
            a_full,
            a32: PauliCoeffs::project(&a_full.block(0, 0)),
            a12: PauliCoeffs::project(&a_full.block(2, 2)),
            a_tr: a_full.block(0, 2),
            source,
        }
    }

    pub fn transfer_norm(&self) -> f64 {
        self.a_tr.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Pauli projections of the transfer block (I, σ₃, σ₁, σ₂).
    pub fn transfer_coeffs(&self) -> [Complex; 4] {
        pauli_project(&self.a_tr)
    }
}

/// `(T·w)`: maps slot states of `h_d` to lab states at t = 0.
pub fn adiabatic_frame(chain: &DiagChain, ops: &SpinOps) -> ComplexMat4 {
    tilt(chain.params.theta, ops).mat_mul(&chain.w)
}

pub fn connection_derived(chain: &DiagChain, ops: &SpinOps) -> ConnectionForm {
    let frame = adiabatic_frame(chain, ops);
    ConnectionForm::from_matrix(conjugate(&frame, &ops.j3), ConnectionSource::Derived)
}

pub fn connection_two_step(chain: &DiagChain, ops: &SpinOps) -> ConnectionForm {
    ConnectionForm::from_matrix(
        conjugate(&chain.two_step, &ops.j3),
        ConnectionSource::TwoStep,
    )
}

pub fn connection_printed(chain: &DiagChain) -> ConnectionForm {
    printed_connection(chain.alpha, &chain.betas())
}

/// Block coefficients written out in terms of α, β₁ = diag(β₁₁, β₁₂),
/// β₂ = diag(β₂₁, β₂₂), assembled into a 4×4 matrix with the transposed
/// transfer block below the diagonal.
pub fn printed_connection(alpha: f64, b: &Betas) -> ConnectionForm {
    let (sa, ca) = alpha.sin_cos();
    let [b11, b12] = b.beta1;
    let [b21, b22] = b.beta2;

    let a32 = PauliCoeffs {
        a: 0.25 * (3.0 * b11 * b11 - 3.0 * b12 * b12 + ca * (b21 * b21 - b22 * b22)),
        b: 0.25 * (3.0 * b11 * b11 + 3.0 * b12 * b12 + ca * (b21 * b21 + b22 * b22)),
        c: -0.5 * sa * b21 * b22,
        d: 0.0,
    };
    let a12 = PauliCoeffs {
        a: 0.25 * (3.0 * b21 * b21 - 3.0 * b22 * b22 + ca * (b11 * b11 - b12 * b12)),
        b: 0.25 * (3.0 * b21 * b21 + 3.0 * b22 * b22 + ca * (b11 * b11 + b12 * b12)),
        c: -0.5 * sa * b11 * b12,
        d: 0.0,
    };
    // ½β₁β₂(3 − cos α)σ₃ + ½ sin α·β₂σ₁β₁
    let diag = 0.5 * (3.0 - ca);
    let r = |x: f64| Complex::new(x, 0.0);
    let a_tr: Mat2 = [
        [r(diag * b11 * b21), r(0.5 * sa * b21 * b12)],
        [r(0.5 * sa * b22 * b11), r(-diag * b12 * b22)],
    ];
    let tr_t: Mat2 = [[a_tr[0][0], a_tr[1][0]], [a_tr[0][1], a_tr[1][1]]];
    let a_full = ComplexMat4::from_blocks(a32.to_block(), a_tr, tr_t, a12.to_block());
    ConnectionForm {
        a_full,
        a32,
        a12,
        a_tr,
        source: ConnectionSource::PrintedLiteral,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GateResult {
    /// Lab-frame propagator from 0 to `t`.
    pub u_gate: ComplexMat4,
    /// `exp(−iω₁t·A)`.
    pub u_geometric: ComplexMat4,
    /// `exp(−i·h_d·t)`, diagonal.
    pub u_dynamic: ComplexMat4,
    /// `T·w`, the constant change of basis both factors act in.
    pub frame: ComplexMat4,
    pub connection: ConnectionForm,
    pub h_d: [f64; DIM],
    pub t: f64,
    pub params: ModelParams,
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "t",
            value: t,
            requirement: "t must be finite and >= 0",
        })
    }
}

pub fn gate(p: &ModelParams, t: f64) -> Result<GateResult> {
    let ops = SpinOps::new();
    let chain = diagonalize(p, &ops)?;
    gate_from_chain(&chain, &ops, t)
}

pub fn gate_from_chain(chain: &DiagChain, ops: &SpinOps, t: f64) -> Result<GateResult> {
    check_time(t)?;
    let p = chain.params;
    let connection = connection_derived(chain, ops);
    let u_geometric = expm_i_hermitian(&connection.a_full, p.omega1 * t)?;
    let u_dynamic = expm_i_diagonal(chain.h_d, t);
    let frame = adiabatic_frame(chain, ops);
    let u_gate = frame
        .mat_mul(&u_geometric)
        .mat_mul(&u_dynamic)
        .mat_mul(&frame.adjoint());
    Ok(GateResult {
        u_gate,
        u_geometric,
        u_dynamic,
        frame,
        connection,
        h_d: chain.h_d,
        t,
        params: p,
    })
}

/// `U₁(t)·T·exp(−i·h_rot·t)·T†`, exponentiating `h_rot` directly.
pub fn direct_propagator(p: &ModelParams, t: f64) -> Result<ComplexMat4> {
    check_time(t)?;
    p.validate()?;
    let ops = SpinOps::new();
    let tl = tilt(p.theta, &ops);
    let inner = expm_i_hermitian(&h_rot(p, &ops), t)?;
    Ok(frame_rotation(t, p)
        .mat_mul(&tl)
        .mat_mul(&inner)
        .mat_mul(&tl.adjoint()))
}

/// Lab propagator from `t0` to `t0 + dt`, each factor evaluated afresh.
pub fn step_propagator(p: &ModelParams, ops: &SpinOps, t0: f64, dt: f64) -> Result<ComplexMat4> {
    let tl = tilt(p.theta, ops);
    let inner = expm_i_hermitian(&h_rot(p, ops), dt)?;
    Ok(frame_rotation(t0 + dt, p)
        .mat_mul(&tl)
        .mat_mul(&inner)
        .mat_mul(&tl.adjoint())
        .mat_mul(&frame_rotation(t0, p).adjoint()))
}

/// Product of `n` equal sub-interval propagators covering `[0, t]`.
pub fn composed_propagator(p: &ModelParams, t: f64, n: usize) -> Result<ComplexMat4> {
    check_time(t)?;
    p.validate()?;
    let ops = SpinOps::new();
    let dt = t / n as f64;
    let mut u = ComplexMat4::identity();
    for k in 0..n {
        u = step_propagator(p, &ops, k as f64 * dt, dt)?.mat_mul(&u);
    }
    Ok(u)
}

/// Amplitude threshold `|a|² > PARTICIPATION_THRESHOLD` for counting an output
/// state as populated.
pub const PARTICIPATION_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingReport {
    /// For each input basis state, how many output amplitudes exceed the
    /// threshold.
    pub participation: [usize; DIM],
    /// Frobenius norm of the 3/2 ↔ 1/2 off-diagonal blocks of the gate.
    pub transfer_norm: f64,
}

pub fn characterize_gate(g: &GateResult) -> MixingReport {
    characterize_unitary(&g.u_gate)
}

pub fn characterize_unitary(u: &ComplexMat4) -> MixingReport {
    let participation = std::array::from_fn(|col| {
        (0..DIM)
            .filter(|&row| u[(row, col)].norm_sqr() > PARTICIPATION_THRESHOLD)
            .count()
    });
    MixingReport {
        participation,
        transfer_norm: u.transfer_norm(),
    }
}

/// Off-block Frobenius norm of the one-period lab propagator, written in the
/// instantaneous eigenbasis of the field (`T†·U_lab(2π/ω₁)·T`). Small when
/// the |m| = 3/2 and |m| = 1/2 levels follow the field adiabatically.
pub fn energy_block_leakage(p: &ModelParams) -> Result<f64> {
    if !(p.omega1 > 0.0) {
        return Err(Error::Domain {
            name: "omega1",
            value: p.omega1,
            requirement: "a rotation period needs omega1 > 0",
        });
    }
    let ops = SpinOps::new();
    let u = gate(p, p.period())?.u_gate;
    let tl = tilt(p.theta, &ops);
    Ok(conjugate(&tl, &u).transfer_norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// The |m| = 3/2 doublet, energy +ω₀.
    ThreeHalves,
    /// The |m| = 1/2 doublet, energy −ω₀.
    OneHalf,
}

/// Modulus of the off-diagonal element of the adiabatic (degenerate-subspace)
/// connection `−i⟨φ_b|∂_φ φ_a⟩` for one doublet, computed numerically from
/// eigenvectors of `h_lab` by central differences in the field azimuth.
///
/// States inside the doublet are labelled by the spin projection on the field
/// axis; the off-diagonal modulus does not depend on their phases.
pub fn wilczek_zee_offdiagonal(p: &ModelParams, level: Level) -> Result<f64> {
    p.validate()?;
    if !(p.omega1 > 0.0) {
        return Err(Error::Domain {
            name: "omega1",
            value: p.omega1,
            requirement: "the field azimuth must move (omega1 > 0)",
        });
    }
    let ops = SpinOps::new();
    // h_lab depends on t only through φ = ω₁t.
    let states = |phi: f64| -> Result<[[Complex; DIM]; 2]> {
        let t = phi / p.omega1;
        let h = h_lab(t, p, &ops);
        let eig = crate::linalg::hermitian_eig(&h)?;
        let cols = match level {
            Level::OneHalf => [0, 1],
            Level::ThreeHalves => [2, 3],
        };
        let basis = cols.map(|c| eig.vectors.column(c));
        let n = ops.along(crate::spin::field_direction(t, p));
        Ok(label_by_projection(&basis, &n))
    };

    let delta = 1e-4;
    let centre = states(0.0)?;
    let plus = align(&centre, states(delta)?);
    let minus = align(&centre, states(-delta)?);
    let deriv: [[Complex; DIM]; 2] = std::array::from_fn(|a| {
        std::array::from_fn(|i| (plus[a][i] - minus[a][i]) / (2.0 * delta))
    });
    Ok(inner(&centre[1], &deriv[0]).norm())
}

fn inner(a: &[Complex; DIM], b: &[Complex; DIM]) -> Complex {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Re-express a 2-vector basis in the eigenbasis of `op` restricted to its span.
fn label_by_projection(basis: &[[Complex; DIM]; 2], op: &ComplexMat4) -> [[Complex; DIM]; 2] {
    let m: Mat2 = std::array::from_fn(|i| {
        std::array::from_fn(|j| inner(&basis[i], &op.mat_vec(&basis[j])))
    });
    let vecs = eig2(&m);
    // Larger projection first.
    std::array::from_fn(|k| {
        std::array::from_fn(|i| vecs[k][0] * basis[0][i] + vecs[k][1] * basis[1][i])
    })
}

/// Eigenvectors of a 2×2 Hermitian matrix, larger eigenvalue first.
fn eig2(m: &Mat2) -> [[Complex; 2]; 2] {
    let a = m[0][0].re;
    let d = m[1][1].re;
    let b = m[0][1];
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
    [mean + rad, mean - rad].map(|l| {
        let v1 = [b, Complex::new(l - a, 0.0)];
        let v2 = [Complex::new(l - d, 0.0), b.conj()];
        let n1 = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
        let n2 = (v2[0].norm_sqr() + v2[1].norm_sqr()).sqrt();
        if n1 == 0.0 && n2 == 0.0 {
            return if l == mean + rad {
                [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]
            } else {
                [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)]
            };
        }
        let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        [v[0] / n, v[1] / n]
    })
}

/// Phase each state so its overlap with the reference is real and positive.
fn align(reference: &[[Complex; DIM]; 2], mut states: [[Complex; DIM]; 2]) -> [[Complex; DIM]; 2] {
    for (r, s) in reference.iter().zip(states.iter_mut()) {
        let o = inner(r, s);
        let phase = o.conj() / o.norm();
        s.iter_mut().for_each(|z| *z *= phase);
    }
    states
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, trace_fidelity};
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, TAU};

    fn p(omega0: f64, omega1: f64, theta: f64) -> ModelParams {
        ModelParams::new(omega0, omega1, theta).unwrap()
    }

    #[test]
    fn pauli_round_trip() {
        let c = PauliCoeffs {
            a: 0.3,
            b: -1.2,
            c: 0.7,
            d: 0.05,
        };
        let back = PauliCoeffs::project(&c.to_block());
        for (x, y) in [(back.a, c.a), (back.b, c.b), (back.c, c.c), (back.d, c.d)] {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn untilted_connection_is_j3() {
        let ops = SpinOps::new();
        let chain = diagonalize(&p(1.0, 0.4, 0.0), &ops).unwrap();
        let a = connection_derived(&chain, &ops);
        assert_eq!(a.a_full, ops.j3);
    }

    #[test]
    fn derived_connection_is_isospectral_and_traceless() {
        let ops = SpinOps::new();
        let chain = diagonalize(&p(1.0, 1.0, FRAC_PI_4), &ops).unwrap();
        let a = connection_derived(&chain, &ops);
        assert!(a.a_full.is_hermitian(1e-12));
        assert!(a.a_full.trace().norm() < 1e-12);
        let e = hermitian_eig(&a.a_full).unwrap();
        for (g, w) in e.values.iter().zip([-1.5, -0.5, 0.5, 1.5]) {
            assert!((g - w).abs() < 1e-10);
        }
    }

    #[test]
    fn printed_coefficients_at_balanced_mixing() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let b = Betas {
            beta1: [h, h],
            beta2: [h, h],
        };
        let a = printed_connection(0.7, &b);
        assert!(a.a32.a.abs() < 1e-15);
        assert!(a.a12.a.abs() < 1e-15);
        assert!(a.a_full.is_hermitian(1e-15));
    }

    #[test]
    fn printed_coefficients_untilted() {
        let ops = SpinOps::new();
        let chain = diagonalize(&p(1.0, 0.5, 0.0), &ops).unwrap();
        let a = connection_printed(&chain);
        assert_eq!(a.a32.c, 0.0);
        assert_eq!(a.a12.c, 0.0);
        // With β₁ = 1, β₂ = 0 and α = 0 every route gives J₃.
        assert!((a.a_full - ops.j3).max_abs() < 1e-15);
    }

    #[test]
    fn closed_form_coefficients_are_the_two_step_connection_mirrored() {
        let ops = SpinOps::new();
        for th in [0.2, FRAC_PI_4, 1.3] {
            let chain = diagonalize(&p(1.0, 0.7, th), &ops).unwrap();
            let two_step = connection_two_step(&chain, &ops);
            let mirrored = printed_connection(-chain.alpha, &chain.betas());
            assert!((two_step.a_full - mirrored.a_full).max_abs() < 1e-14);
            let literal = connection_printed(&chain);
            assert!((two_step.a_full - literal.a_full).max_abs() > 1e-2);
        }
    }

    #[test]
    fn gate_trivial_cases() {
        let g = gate(&p(1.0, 0.5, 0.4), 0.0).unwrap();
        assert!((g.u_gate - ComplexMat4::identity()).max_abs() < 1e-14);

        let q = p(1.0, 0.0, 0.3);
        let g = gate(&q, 1.7).unwrap();
        assert!((g.u_geometric - ComplexMat4::identity()).max_abs() < 1e-15);
        let ops = SpinOps::new();
        let want = expm_i_hermitian(&h_lab(0.0, &q, &ops), 1.7).unwrap();
        assert!((g.u_gate - want).max_abs() < 1e-12);

        assert!(gate(&q, -1.0).is_err());
    }

    #[test]
    fn gate_factors_are_unitary() {
        let g = gate(&p(1.0, 0.5, FRAC_PI_6), 4.0 * std::f64::consts::PI).unwrap();
        for u in [g.u_gate, g.u_geometric, g.u_dynamic, g.frame] {
            assert!(u.unitarity_residual() < 1e-12);
        }
        assert!(g.u_dynamic.is_diagonal(0.0));
    }

    #[test]
    fn factored_equals_direct() {
        for &(w0, w1, th, t) in &[(1.0, 0.5, FRAC_PI_6, 12.0), (0.7, 3.0, 1.2, 2.5), (2.0, 0.05, 0.3, 40.0)] {
            let q = p(w0, w1, th);
            let g = gate(&q, t).unwrap();
            let d = direct_propagator(&q, t).unwrap();
            assert!((g.u_gate - d).max_abs() < 1e-11);
        }
    }

    #[test]
    fn geometric_group_law() {
        let ops = SpinOps::new();
        let q = p(1.0, 0.8, 0.9);
        let chain = diagonalize(&q, &ops).unwrap();
        let (t1, t2) = (1.3, 2.9);
        let a = gate_from_chain(&chain, &ops, t1).unwrap().u_geometric;
        let b = gate_from_chain(&chain, &ops, t2).unwrap().u_geometric;
        let ab = gate_from_chain(&chain, &ops, t1 + t2).unwrap().u_geometric;
        assert!((a.mat_mul(&b) - ab).max_abs() < 1e-11);
    }

    #[test]
    fn untilted_gate_is_diagonal() {
        for t in [0.5, 3.0, 17.0] {
            let g = gate(&p(1.0, 0.9, 0.0), t).unwrap();
            assert!(g.u_gate.is_diagonal(1e-15));
            assert_eq!(characterize_gate(&g).transfer_norm, 0.0);
        }
    }

    #[test]
    fn identity_mixing_report() {
        let r = characterize_unitary(&ComplexMat4::identity());
        assert_eq!(r.participation, [1; 4]);
        assert_eq!(r.transfer_norm, 0.0);
    }

    #[test]
    fn tilted_gate_mixes() {
        let q = p(1.0, 1.0, FRAC_PI_4);
        let g = gate(&q, TAU).unwrap();
        let r = characterize_gate(&g);
        assert!(r.participation.iter().any(|&n| n >= 2));
        assert!(r.transfer_norm > 0.1);
    }

    #[test]
    fn composition_needs_no_time_ordering() {
        let q = p(1.0, 0.7, 0.5);
        let t = 9.0;
        let g = gate(&q, t).unwrap().u_gate;
        for n in [2, 10, 100] {
            let c = composed_propagator(&q, t, n).unwrap();
            assert!((c - g).max_abs() < 1e-11, "n = {n}");
        }
    }

    #[test]
    fn leakage_small_when_slow() {
        let slow = energy_block_leakage(&p(1.0, 1e-3, FRAC_PI_4)).unwrap();
        let fast = energy_block_leakage(&p(1.0, 1.0, FRAC_PI_4)).unwrap();
        assert!(slow < 1e-2, "{slow}");
        assert!(fast > 0.05, "{fast}");
    }

    #[test]
    fn wilczek_zee_doublets() {
        let q = p(1.0, 0.3, 0.6);
        let top = wilczek_zee_offdiagonal(&q, Level::ThreeHalves).unwrap();
        let low = wilczek_zee_offdiagonal(&q, Level::OneHalf).unwrap();
        assert!(top < 1e-7, "{top}");
        assert!((low - 0.6f64.sin()).abs() < 1e-6, "{low}");
    }

    #[test]
    fn derived_upper_block_offdiagonal_vanishes_adiabatically() {
        let ops = SpinOps::new();
        let c32 = |w1: f64| {
            let chain = diagonalize(&p(1.0, w1, FRAC_PI_4), &ops).unwrap();
            connection_derived(&chain, &ops).a32.c.abs()
        };
        assert!(c32(1e-4) < 1e-3);
        assert!(c32(1.0) > 0.05);
    }

    #[test]
    fn derived_connection_generates_frame_motion() {
        // (T·w)†·U₁(t)·(T·w) = exp(−iω₁t·A)
        let ops = SpinOps::new();
        let q = p(1.4, 0.6, 0.8);
        let chain = diagonalize(&q, &ops).unwrap();
        let frame = adiabatic_frame(&chain, &ops);
        let a = connection_derived(&chain, &ops);
        let t = 3.3;
        let lhs = conjugate(&frame, &frame_rotation(t, &q));
        let rhs = expm_i_hermitian(&a.a_full, q.omega1 * t).unwrap();
        assert!(trace_fidelity(&lhs, &rhs) > 1.0 - 1e-14);
        assert!((lhs - rhs).max_abs() < 1e-12);
    }
}
