//! Two-step block diagonalization of the rotating-frame Hamiltonian.
//!
//! Step one rotates the |m| = 1/2 block by α/2 about σ₂ (with tan α = 2 tan θ),
//! which removes its σ₁ component. Step two mixes the slots (3/2, 1/2) and
//! (−3/2, −1/2) with real diagonal blocks β₁, β₂ chosen from
//! `ξ(β₁² − β₂²) + Δλ·β₁β₂ = 0`.
//!
//! The two steps do not produce an exact diagonalizer once θ > 0: after the
//! first rotation the coupling block becomes `ξ·R(α/2)`, which is no longer
//! diagonal, and a β-mixing with diagonal blocks cannot remove its
//! off-diagonal part. [`DiagChain`] therefore carries both the two-step product
//! with its measured residual, and the exact constant diagonalizer `w`
//! (eigenvectors of `h_rot` assigned to basis slots by overlap). Gates are
//! built from `w`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, Complex, ComplexMat4, DIM};
use crate::spin::{h_rot, ModelParams, SpinOps};

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// Relative floor on ξ below which the β-mixing is skipped.
pub const XI_FLOOR_REL: f64 = 1e-12;

/// `α = atan(2 tan θ)`.
pub fn alpha_of_theta(theta: f64) -> Result<f64> {
    if !(theta.is_finite() && (0.0..FRAC_PI_2).contains(&theta)) {
        return Err(Error::Domain {
            name: "theta",
            value: theta,
            requirement: "theta must satisfy 0 <= theta < pi/2",
        });
    }
    Ok((2.0 * theta.tan()).atan())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambdas {
    pub lambda1: [f64; 2],
    pub lambda2: [f64; 2],
    pub xi: f64,
}

impl Lambdas {
    pub fn delta(&self) -> [f64; 2] {
        [
            self.lambda1[0] - self.lambda2[0],
            self.lambda1[1] - self.lambda2[1],
        ]
    }
}

/// Diagonal entries of the two blocks after the first rotation, and the
/// block coupling ξ.
pub fn lambdas_xi(p: &ModelParams, alpha: f64) -> Lambdas {
    let (s, c) = p.theta.sin_cos();
    let upper = 1.5 * p.omega1 * c;
    let lower = 0.5 * p.omega1 * c / alpha.cos();
    Lambdas {
        lambda1: [p.omega0 - upper, p.omega0 + upper],
        lambda2: [-p.omega0 - lower, -p.omega0 + lower],
        xi: p.omega1 * SQRT3_2 * s,
    }
}

pub fn xi_floor(p: &ModelParams) -> f64 {
    XI_FLOOR_REL * p.omega0.max(p.omega1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuK {
    pub k: [f64; 2],
    pub mu: [f64; 2],
}

/// `kᵢ = Δλᵢ/(2ξ)` and the positive root `μᵢ = kᵢ + √(1 + kᵢ²)`.
pub fn mu_k(lambda1: [f64; 2], lambda2: [f64; 2], xi: f64, floor: f64) -> Result<MuK> {
    if !(xi.abs() > floor) {
        return Err(Error::DegenerateCoupling { xi, floor });
    }
    let k = [0, 1].map(|i| (lambda1[i] - lambda2[i]) / (2.0 * xi));
    Ok(MuK { k, mu: k.map(mu_of_k) })
}

fn mu_of_k(k: f64) -> f64 {
    let r = 1f64.hypot(k);
    // k + r cancels for large negative k; 1/(r − k) is the same number.
    if k >= 0.0 {
        k + r
    } else {
        1.0 / (r - k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Betas {
    pub beta1: [f64; 2],
    pub beta2: [f64; 2],
}

impl Betas {
    pub const IDENTITY: Betas = Betas {
        beta1: [1.0, 1.0],
        beta2: [0.0, 0.0],
    };

    pub fn unitarity_residual(&self) -> [f64; 2] {
        [0, 1].map(|i| (self.beta1[i].powi(2) + self.beta2[i].powi(2) - 1.0).abs())
    }
}

/// Positive roots of
/// `β₁² = ½(1 + k²)^(−1/2)(k + √(1 + k²))^(−1)` and `β₂² = ½(1 + k/√(1 + k²))`.
///
/// Evaluated as `β₁² = 1/(2rμ)`, `β₂² = μ/(2r)` with `r = √(1 + k²)`, which is
/// algebraically identical and free of cancellation at either sign of k.
pub fn betas(k: [f64; 2]) -> Betas {
    let pair = |k: f64| {
        let r = 1f64.hypot(k);
        let mu = mu_of_k(k);
        ((0.5 / (r * mu)).sqrt(), (0.5 * mu / r).sqrt())
    };
    let (a0, b0) = pair(k[0]);
    let (a1, b1) = pair(k[1]);
    Betas {
        beta1: [a0, a1],
        beta2: [b0, b1],
    }
}

/// First rotation: identity on the |m| = 3/2 block, rotation by α/2 on the
/// |m| = 1/2 block taking `cos α·σ₃ − sin α·σ₁` to `σ₃`.
pub fn build_u2(alpha: f64) -> ComplexMat4 {
    let (s, c) = (0.5 * alpha).sin_cos();
    ComplexMat4::from_real([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, c, s],
        [0.0, 0.0, -s, c],
    ])
}

/// Second rotation `[[β₁, β₂], [−β₂, β₁]]` with diagonal 2×2 blocks.
pub fn build_u3(b: &Betas) -> Result<ComplexMat4> {
    let residual = b.unitarity_residual().into_iter().fold(0.0, f64::max);
    if !(residual <= 1e-10) {
        return Err(Error::UnitarityViolation { residual });
    }
    let [p, q] = b.beta1;
    let [r, s] = b.beta2;
    Ok(ComplexMat4::from_real([
        [p, 0.0, r, 0.0],
        [0.0, q, 0.0, s],
        [-r, 0.0, p, 0.0],
        [0.0, -s, 0.0, q],
    ]))
}

/// k, μ and β for a non-degenerate coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mixing {
    pub k: [f64; 2],
    pub mu: [f64; 2],
    pub betas: Betas,
}

#[derive(Debug, Clone, Copy)]
pub struct DiagChain {
    pub params: ModelParams,
    pub alpha: f64,
    pub lambdas: Lambdas,
    /// `None` when |ξ| is below the floor; the second rotation is then the
    /// identity.
    pub mixing: Option<Mixing>,
    pub u2: ComplexMat4,
    pub u3: ComplexMat4,
    /// `u2·u3`.
    pub two_step: ComplexMat4,
    /// Off-diagonal Frobenius mass of `two_step†·h_rot·two_step`, relative to
    /// `‖h_rot‖_F`.
    pub two_step_residual: f64,
    /// Exact constant diagonalizer of `h_rot`; column j is the eigenvector
    /// that overlaps basis slot j most.
    pub w: ComplexMat4,
    /// Diagonal of `w†·h_rot·w`, in slot order.
    pub h_d: [f64; DIM],
    /// Off-diagonal mass of `w†·h_rot·w` relative to `‖h_rot‖_F`.
    pub residual: f64,
}

impl DiagChain {
    pub fn betas(&self) -> Betas {
        self.mixing.map(|m| m.betas).unwrap_or(Betas::IDENTITY)
    }

    pub fn h_d_matrix(&self) -> ComplexMat4 {
        ComplexMat4::from_diag_real(self.h_d)
    }

    /// `u2†·h_rot·u2` should leave the |m| = 1/2 block diagonal.
    pub fn after_first_step(&self, ops: &SpinOps) -> ComplexMat4 {
        conjugate(&self.u2, &h_rot(&self.params, ops))
    }

    /// Residual of `ξ(β₁ᵢ² − β₂ᵢ²) + Δλᵢβ₁ᵢβ₂ᵢ = 0`, divided by
    /// `max(|ξ|, |Δλᵢ|)`. Zero for the degenerate branch.
    pub fn condition_residual(&self) -> [f64; 2] {
        let Some(m) = self.mixing else {
            return [0.0; 2];
        };
        let xi = self.lambdas.xi;
        let delta = self.lambdas.delta();
        [0, 1].map(|i| {
            let (b1, b2) = (m.betas.beta1[i], m.betas.beta2[i]);
            let r = xi * (b1 * b1 - b2 * b2) + delta[i] * b1 * b2;
            r.abs() / xi.abs().max(delta[i].abs())
        })
    }
}

/// `u†·h·u`.
pub fn conjugate(u: &ComplexMat4, h: &ComplexMat4) -> ComplexMat4 {
    u.adjoint().mat_mul(h).mat_mul(u)
}

pub fn diagonalize(p: &ModelParams, ops: &SpinOps) -> Result<DiagChain> {
    p.validate()?;
    let h = h_rot(p, ops);
    let scale = h.frobenius_norm();

    let alpha = alpha_of_theta(p.theta)?;
    let lambdas = lambdas_xi(p, alpha);
    let mixing = match mu_k(lambdas.lambda1, lambdas.lambda2, lambdas.xi, xi_floor(p)) {
        Ok(MuK { k, mu }) => Some(Mixing {
            k,
            mu,
            betas: betas(k),
        }),
        Err(Error::DegenerateCoupling { .. }) => None,
        Err(e) => return Err(e),
    };
    let u2 = build_u2(alpha);
    let u3 = build_u3(&mixing.map(|m| m.betas).unwrap_or(Betas::IDENTITY))?;
    let two_step = u2.mat_mul(&u3);
    let two_step_residual = conjugate(&two_step, &h).off_diagonal_norm() / scale;

    let w = slot_diagonalizer(&h)?;
    let d = conjugate(&w, &h);
    let h_d = std::array::from_fn(|i| d[(i, i)].re);
    let residual = d.off_diagonal_norm() / scale;

    Ok(DiagChain {
        params: *p,
        alpha,
        lambdas,
        mixing,
        u2,
        u3,
        two_step,
        two_step_residual,
        w,
        h_d,
        residual,
    })
}

/// Eigenvectors of `h` arranged so that column j overlaps basis slot j
/// most (maximum total weight over all 24 slot assignments), each phased so
/// its slot component is real and positive.
pub fn slot_diagonalizer(h: &ComplexMat4) -> Result<ComplexMat4> {
    let eig = hermitian_eig(h)?;
    let v = eig.vectors;
    let weight = |slot: usize, col: usize| v[(slot, col)].norm_sqr();

    let mut best = [0, 1, 2, 3];
    let mut best_score = f64::NEG_INFINITY;
    for perm in permutations4() {
        let score: f64 = (0..DIM).map(|slot| weight(slot, perm[slot])).sum();
        if score > best_score + 1e-14 {
            best_score = score;
            best = perm;
        }
    }

    let mut w = ComplexMat4::zeros();
    for (slot, &col) in best.iter().enumerate() {
        let pivot = v[(slot, col)];
        let phase = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            Complex::new(1.0, 0.0)
        };
        for i in 0..DIM {
            w[(i, slot)] = v[(i, col)] * phase;
        }
    }
    Ok(w)
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in (0..4).filter(|&b| b != a) {
            for c in (0..4).filter(|&c| c != a && c != b) {
                let d = 6 - a - b - c;
                out.push([a, b, c, d]);
            }
        }
    }
    out
}
