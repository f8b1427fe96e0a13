//! Spin-3/2 operators and the quadrupole Hamiltonians.
//!
//! Units are ħ = 1; frequencies are angular (rad per unit time).

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Complex, ComplexMat4, DIM};

/// Spin quantum number.
pub const SPIN_J: f64 = 1.5;

/// `j(j + 1)` for j = 3/2.
pub const CASIMIR: f64 = SPIN_J * (SPIN_J + 1.0);

/// Magnetic quantum number of each basis slot.
pub const BASIS_M: [f64; DIM] = [1.5, -1.5, 0.5, -0.5];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinOps {
    pub j1: ComplexMat4,
    pub j2: ComplexMat4,
    pub j3: ComplexMat4,
}

impl SpinOps {
    /// Builds J₁, J₂, J₃ from the ladder operator `J₊|m⟩ = √(j(j+1) − m(m+1))|m+1⟩`
    /// laid out in the slot order of [`BASIS_M`].
    pub fn new() -> Self {
        let slot = |m: f64| BASIS_M.iter().position(|&x| x == m);
        let mut raise = ComplexMat4::zeros();
        for (col, &m) in BASIS_M.iter().enumerate() {
            if let Some(row) = slot(m + 1.0) {
                raise[(row, col)] = Complex::new((CASIMIR - m * (m + 1.0)).sqrt(), 0.0);
            }
        }
        let lower = raise.adjoint();
        let j1 = (raise + lower).scale_real(0.5);
        let j2 = (raise - lower).scale(Complex::new(0.0, -0.5));
        let j3 = ComplexMat4::from_diag_real(BASIS_M);
        SpinOps { j1, j2, j3 }
    }

    /// `J·n` for a unit vector `n`.
    pub fn along(&self, n: [f64; 3]) -> ComplexMat4 {
        self.j1.scale_real(n[0]) + self.j2.scale_real(n[1]) + self.j3.scale_real(n[2])
    }

    pub fn casimir(&self) -> ComplexMat4 {
        self.j1.mat_mul(&self.j1) + self.j2.mat_mul(&self.j2) + self.j3.mat_mul(&self.j3)
    }
}

impl Default for SpinOps {
    fn default() -> Self {
        Self::new()
    }
}

pub fn build_spin_ops() -> SpinOps {
    SpinOps::new()
}

/// Physical inputs: quadrupole frequency, field rotation frequency, tilt angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega0: f64,
    pub omega1: f64,
    pub theta: f64,
}

impl ModelParams {
    pub fn new(omega0: f64, omega1: f64, theta: f64) -> Result<Self> {
        let p = ModelParams {
            omega0,
            omega1,
            theta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::Domain {
                name: "omega0",
                value: self.omega0,
                requirement: "omega0 must be finite and > 0",
            });
        }
        if !(self.omega1.is_finite() && self.omega1 >= 0.0) {
            return Err(Error::Domain {
                name: "omega1",
                value: self.omega1,
                requirement: "omega1 must be finite and >= 0",
            });
        }
        validate_theta(self.theta)
    }

    /// Period of the field rotation, `2π/ω₁`. Infinite for a static field.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega1
    }
}

/// Tilts closer than this to π/2 are rejected: a seven-digit π/2 typed on the
/// command line (1.5707963) must not slip through as a legal, nearly
/// transverse field.
pub const THETA_MARGIN: f64 = 1e-6;

pub fn validate_theta(theta: f64) -> Result<()> {
    if (0.0..=FRAC_PI_2 - THETA_MARGIN).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "theta",
            value: theta,
            requirement: "theta must satisfy 0 <= theta < pi/2 (radians, with a 1e-6 margin)",
        })
    }
}

/// Field direction at time `t`.
pub fn field_direction(t: f64, p: &ModelParams) -> [f64; 3] {
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = (p.omega1 * t).sin_cos();
    [st * cp, st * sp, ct]
}

/// `ω₀(J₃² − j(j+1)/3)`.
pub fn h0(p: &ModelParams, ops: &SpinOps) -> ComplexMat4 {
    quadrupole(p.omega0, &ops.j3)
}

fn quadrupole(omega0: f64, jn: &ComplexMat4) -> ComplexMat4 {
    (jn.mat_mul(jn) - ComplexMat4::identity().scale_real(CASIMIR / 3.0)).scale_real(omega0)
}

/// Laboratory-frame Hamiltonian `ω₀((J·n(t))² − j(j+1)/3)` with the field
/// tilted by θ from z and rotating about z at ω₁.
pub fn h_lab(t: f64, p: &ModelParams, ops: &SpinOps) -> ComplexMat4 {
    quadrupole(p.omega0, &ops.along(field_direction(t, p)))
}

/// Rotating-frame Hamiltonian in the tilted basis:
/// `ω₀(J₃² − 5/4) − ω₁(cos θ·J₃ − sin θ·J₁)`.
///
/// Time independent. The lab propagator is
/// `U₁(t)·T·exp(−i·h_rot·t)·T†` with `U₁(t) = exp(−iω₁tJ₃)` and `T = tilt(θ)`.
pub fn h_rot(p: &ModelParams, ops: &SpinOps) -> ComplexMat4 {
    let (s, c) = p.theta.sin_cos();
    let field = ops.j3.scale_real(c) - ops.j1.scale_real(s);
    h0(p, ops) - field.scale_real(p.omega1)
}

/// `T = exp(−iθJ₂)`: rotates ẑ onto the tilted field axis at t = 0.
///
/// Built from the Wigner small-d matrix, so `tilt(0)` is exactly the identity.
pub fn tilt(theta: f64, _ops: &SpinOps) -> ComplexMat4 {
    let mut t = ComplexMat4::zeros();
    for (row, &mr) in BASIS_M.iter().enumerate() {
        for (col, &mc) in BASIS_M.iter().enumerate() {
            t[(row, col)] = Complex::new(wigner_small_d(SPIN_J, mr, mc, theta), 0.0);
        }
    }
    t
}

/// `⟨j m'|exp(−iβJ₂)|j m⟩`.
pub fn wigner_small_d(j: f64, m_prime: f64, m: f64, beta: f64) -> f64 {
    let fact = |n: f64| -> f64 { (1..=n.round() as u64).map(|k| k as f64).product() };
    let (s, c) = (0.5 * beta).sin_cos();
    let pre = (fact(j + m) * fact(j - m) * fact(j + m_prime) * fact(j - m_prime)).sqrt();
    let k_min = (m - m_prime).max(0.0).round() as i64;
    let k_max = (j + m).min(j - m_prime).round() as i64;
    (k_min..=k_max)
        .map(|k| {
            let k = k as f64;
            let sign = if ((k - m + m_prime).round() as i64) % 2 == 0 { 1.0 } else { -1.0 };
            let den = fact(j + m - k) * fact(k) * fact(j - k - m_prime) * fact(k - m + m_prime);
            let cos_pow = (2.0 * j - 2.0 * k + m - m_prime).round() as i32;
            let sin_pow = (2.0 * k - m + m_prime).round() as i32;
            sign * pre / den * c.powi(cos_pow) * s.powi(sin_pow)
        })
        .sum()
}

/// `U₁(t) = exp(−iω₁tJ₃)`, diagonal.
pub fn frame_rotation(t: f64, p: &ModelParams) -> ComplexMat4 {
    ComplexMat4::from_diag(BASIS_M.map(|m| Complex::from_polar(1.0, -p.omega1 * t * m)))
}

/// `R(t) = U₁(t)·T`, which carries `h0` onto `h_lab(t)`.
pub fn lab_rotation(t: f64, p: &ModelParams, ops: &SpinOps) -> ComplexMat4 {
    frame_rotation(t, p).mat_mul(&tilt(p.theta, ops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm_i_hermitian, hermitian_eig};
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

    #[test]
    fn tilt_matches_exponential() {
        let ops = SpinOps::new();
        assert_eq!(tilt(0.0, &ops), ComplexMat4::identity());
        for th in [0.1, FRAC_PI_4, 1.3, 1.57] {
            let via_eig = expm_i_hermitian(&ops.j2, th).unwrap();
            assert!((tilt(th, &ops) - via_eig).max_abs() < 1e-14, "theta = {th}");
        }
    }

    const S3_2: f64 = 0.866_025_403_784_438_6;

    fn p(omega0: f64, omega1: f64, theta: f64) -> ModelParams {
        ModelParams::new(omega0, omega1, theta).unwrap()
    }

    #[test]
    fn j3_exact() {
        let ops = SpinOps::new();
        assert_eq!(ops.j3, ComplexMat4::from_diag_real([1.5, -1.5, 0.5, -0.5]));
    }

    #[test]
    fn j1_entries() {
        let ops = SpinOps::new();
        let mut want = [[0.0; 4]; 4];
        for (i, j, v) in [(0, 2, S3_2), (1, 3, S3_2), (2, 3, 1.0)] {
            want[i][j] = v;
            want[j][i] = v;
        }
        let diff = ops.j1 - ComplexMat4::from_real(want);
        assert!(diff.max_abs() < 1e-15, "{:?}", ops.j1);
    }

    #[test]
    fn su2_algebra_and_casimir() {
        let ops = SpinOps::new();
        let i = Complex::new(0.0, 1.0);
        let c12 = ops.j1.commutator(&ops.j2) - ops.j3.scale(i);
        let c23 = ops.j2.commutator(&ops.j3) - ops.j1.scale(i);
        let c31 = ops.j3.commutator(&ops.j1) - ops.j2.scale(i);
        for c in [c12, c23, c31] {
            assert!(c.max_abs() < 1e-14);
        }
        let cas = ops.casimir() - ComplexMat4::identity().scale_real(3.75);
        assert!(cas.max_abs() < 1e-14);
        for j in [ops.j1, ops.j2, ops.j3] {
            assert_eq!(j, j.adjoint());
        }
    }

    #[test]
    fn h0_cases() {
        let ops = SpinOps::new();
        let h = h0(&p(1.0, 0.0, 0.0), &ops);
        assert!((h - ComplexMat4::from_diag_real([1.0, 1.0, -1.0, -1.0])).max_abs() < 1e-15);
        let zero = ModelParams {
            omega0: 0.0,
            omega1: 0.0,
            theta: 0.0,
        };
        assert_eq!(h0(&zero, &ops).max_abs(), 0.0);
        assert!(h0(&p(3.7, 0.0, 0.0), &ops).trace().norm() < 1e-14);
    }

    #[test]
    fn h_lab_untilted_equals_h0() {
        let ops = SpinOps::new();
        let q = p(1.3, 0.7, 0.0);
        for t in [0.0, 0.4, 5.0] {
            assert!((h_lab(t, &q, &ops) - h0(&q, &ops)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn h_lab_isospectral_and_periodic() {
        let ops = SpinOps::new();
        let q = p(1.0, 0.5, FRAC_PI_6);
        for t in [0.0, 0.3, 2.0, 11.0] {
            let e = hermitian_eig(&h_lab(t, &q, &ops)).unwrap();
            for (got, want) in e.values.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
                assert!((got - want).abs() < 1e-12);
            }
        }
        let a = h_lab(0.0, &q, &ops);
        let b = h_lab(q.period(), &q, &ops);
        assert!((a - b).max_abs() < 1e-12);
    }

    #[test]
    fn h_lab_is_rotated_h0() {
        let ops = SpinOps::new();
        let q = p(0.8, 1.7, 1.1);
        let t = 0.93;
        let r = lab_rotation(t, &q, &ops);
        let rotated = r.mat_mul(&h0(&q, &ops)).mat_mul(&r.adjoint());
        assert!((rotated - h_lab(t, &q, &ops)).max_abs() < 1e-12);
    }

    #[test]
    fn h_rot_untilted_diagonal() {
        let ops = SpinOps::new();
        let h = h_rot(&p(1.0, 0.4, 0.0), &ops);
        let want = ComplexMat4::from_diag_real([1.0 - 0.6, 1.0 + 0.6, -1.0 - 0.2, -1.0 + 0.2]);
        assert!((h - want).max_abs() < 1e-15);
    }

    #[test]
    fn h_rot_static_field_is_h0() {
        let ops = SpinOps::new();
        let q = p(2.0, 0.0, 0.9);
        assert!((h_rot(&q, &ops) - h0(&q, &ops)).max_abs() < 1e-15);
    }

    #[test]
    fn h_rot_block_entries() {
        let ops = SpinOps::new();
        let (w0, w1, th) = (1.2, 0.9, FRAC_PI_4);
        let h = h_rot(&p(w0, w1, th), &ops);
        assert!((h[(2, 3)].re - w1 * th.sin()).abs() < 1e-15);
        assert!((h[(3, 2)].re - w1 * th.sin()).abs() < 1e-15);
        let xi = w1 * S3_2 * th.sin();
        assert!((h[(0, 2)].re - xi).abs() < 1e-15);
        assert!((h[(1, 3)].re - xi).abs() < 1e-15);
        assert!((h[(0, 0)].re - (w0 - 1.5 * w1 * th.cos())).abs() < 1e-15);
        assert!((h[(3, 3)].re - (-w0 + 0.5 * w1 * th.cos())).abs() < 1e-15);
        assert!(h.is_hermitian(1e-15));
    }

    #[test]
    fn h_rot_generates_lab_dynamics() {
        // U₁†·h_lab·U₁ − ω₁J₃, brought back through the tilt, is h_rot.
        let ops = SpinOps::new();
        let q = p(1.0, 0.6, 0.7);
        let t = 2.3;
        let u1 = frame_rotation(t, &q);
        let tl = tilt(q.theta, &ops);
        let frame = u1.adjoint().mat_mul(&h_lab(t, &q, &ops)).mat_mul(&u1)
            - ops.j3.scale_real(q.omega1);
        let back = tl.adjoint().mat_mul(&frame).mat_mul(&tl);
        assert!((back - h_rot(&q, &ops)).max_abs() < 1e-13);
    }

    // Typed-in decimals near the right angle, not the constant.
    #[allow(clippy::approx_constant)]
    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1.0, 0.5, PI / 2.0).is_err());
        assert!(ModelParams::new(1.0, 0.5, -0.1).is_err());
        assert!(ModelParams::new(0.0, 0.5, 0.1).is_err());
        assert!(ModelParams::new(1.0, -0.5, 0.1).is_err());
        assert!(ModelParams::new(f64::NAN, 0.5, 0.1).is_err());
        assert!(ModelParams::new(1.0, 0.0, 1.5707963).is_err());
        assert!(ModelParams::new(1.0, 0.0, 1.5707).is_ok());
    }
}
