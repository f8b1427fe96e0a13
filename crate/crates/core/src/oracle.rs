//! Time-stepping reference for the lab-frame Schrödinger equation.
//!
//! Classic fixed-step RK4 applied to the whole propagator `i·dU/dt = H(t)·U`,
//! so one run covers all four initial states. Every run is repeated at half
//! the step and the two results must agree; column norms are reported and
//! never renormalized.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::holonomy::direct_propagator;
use crate::linalg::{trace_fidelity, Complex, ComplexMat4, DIM};
use crate::spin::{h_lab, ModelParams, SpinOps, SPIN_J};

/// Column-norm drift above which a run is rejected.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Steps are sized so that `rate·h ≤ step_scale`, `rate` being the
    /// generator bound from [`frequency_bound`].
    pub step_scale: f64,
    /// Budget for the finer (verification) pass.
    pub max_steps: usize,
    /// Allowed disagreement between the full- and half-step runs, in units
    /// of `tolerance`.
    pub convergence_factor: f64,
    /// Target Frobenius accuracy of the propagator.
    pub tolerance: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            step_scale: 0.01,
            max_steps: 20_000_000,
            convergence_factor: 10.0,
            tolerance: 1e-7,
        }
    }
}

impl IntegratorConfig {
    pub fn with_step_scale(step_scale: f64) -> Self {
        IntegratorConfig {
            step_scale,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_scale > 0.0 && self.step_scale <= 0.1) {
            return Err(Error::Domain {
                name: "step_scale",
                value: self.step_scale,
                requirement: "step_scale must lie in (0, 0.1]",
            });
        }
        if self.max_steps == 0 {
            return Err(Error::Domain {
                name: "max_steps",
                value: 0.0,
                requirement: "max_steps must be positive",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropagationResult {
    #[serde(skip)]
    pub u_numeric: ComplexMat4,
    /// Largest `| ‖column‖ − 1 |`.
    pub norm_drift: f64,
    pub steps_taken: usize,
    /// `‖U_h − U_{h/2}‖_F` from the verification pass.
    pub halving_disagreement: f64,
}

impl PropagationResult {
    pub fn fidelity_vs(&self, other: &ComplexMat4) -> f64 {
        trace_fidelity(other, &self.u_numeric)
    }
}

/// Upper bound on the fastest frequency in the lab-frame solution:
/// `‖h_rot‖₂ ≤ ω₀ + j·ω₁`.
pub fn frequency_bound(p: &ModelParams) -> f64 {
    p.omega0 + SPIN_J * p.omega1
}

pub fn steps_for(p: &ModelParams, t: f64, step_scale: f64) -> usize {
    ((t * frequency_bound(p) / step_scale).ceil() as usize).max(1)
}

/// Fixed-step RK4 with exactly `steps` steps over `[0, t]`.
pub fn integrate_fixed(p: &ModelParams, t: f64, steps: usize) -> ComplexMat4 {
    let ops = SpinOps::new();
    let h = t / steps as f64;
    let minus_i = Complex::new(0.0, -1.0);
    let rhs = |time: f64, u: &ComplexMat4| h_lab(time, p, &ops).mat_mul(u).scale(minus_i);

    let mut u = ComplexMat4::identity();
    for n in 0..steps {
        let t0 = n as f64 * h;
        let k1 = rhs(t0, &u);
        let k2 = rhs(t0 + 0.5 * h, &(u + k1.scale_real(0.5 * h)));
        let k3 = rhs(t0 + 0.5 * h, &(u + k2.scale_real(0.5 * h)));
        let k4 = rhs(t0 + h, &(u + k3.scale_real(h)));
        u = u + (k1 + k2.scale_real(2.0) + k3.scale_real(2.0) + k4).scale_real(h / 6.0);
    }
    u
}

pub fn norm_drift(u: &ComplexMat4) -> f64 {
    (0..DIM)
        .map(|j| {
            let n: f64 = (0..DIM).map(|i| u[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            (n - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Propagator of the lab Hamiltonian over `[0, t]`, returned from the
/// half-step pass once it agrees with the full-step pass.
pub fn integrate_lab(p: &ModelParams, t: f64, cfg: &IntegratorConfig) -> Result<PropagationResult> {
    p.validate()?;
    cfg.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain {
            name: "t",
            value: t,
            requirement: "t must be finite and >= 0",
        });
    }
    if t == 0.0 {
        return Ok(PropagationResult {
            u_numeric: ComplexMat4::identity(),
            norm_drift: 0.0,
            steps_taken: 0,
            halving_disagreement: 0.0,
        });
    }

    let coarse_steps = steps_for(p, t, cfg.step_scale);
    let fine_steps = coarse_steps.saturating_mul(2);
    if fine_steps > cfg.max_steps {
        return Err(Error::StepBudgetExceeded {
            required: fine_steps,
            budget: cfg.max_steps,
        });
    }
    let coarse = integrate_fixed(p, t, coarse_steps);
    let fine = integrate_fixed(p, t, fine_steps);

    let disagreement = (coarse - fine).frobenius_norm();
    let limit = cfg.convergence_factor * cfg.tolerance;
    if !(disagreement <= limit) {
        return Err(Error::NoConvergence {
            disagreement,
            limit,
            steps: fine_steps,
        });
    }
    let drift = norm_drift(&fine);
    if !(drift <= NORM_DRIFT_LIMIT) {
        return Err(Error::NormDrift {
            drift,
            limit: NORM_DRIFT_LIMIT,
        });
    }
    Ok(PropagationResult {
        u_numeric: fine,
        norm_drift: drift,
        steps_taken: fine_steps,
        halving_disagreement: disagreement,
    })
}

/// Fidelity between the integrated lab propagator and
/// `U₁(t)·T·exp(−i·h_rot·t)·T†`.
pub fn rotating_frame_check(p: &ModelParams, t: f64, cfg: &IntegratorConfig) -> Result<f64> {
    let numeric = integrate_lab(p, t, cfg)?;
    let closed = direct_propagator(p, t)?;
    Ok(numeric.fidelity_vs(&closed))
}

/// Least-squares slope of `log(error)` against `log(step)`, where error is the
/// Frobenius distance of a single fixed-step run from the closed form.
pub fn convergence_order(p: &ModelParams, t: f64, step_scales: &[f64]) -> Result<ConvergenceFit> {
    let exact = direct_propagator(p, t)?;
    let points: Vec<(f64, f64)> = step_scales
        .iter()
        .map(|&s| {
            let steps = steps_for(p, t, s);
            let err = (integrate_fixed(p, t, steps) - exact).frobenius_norm();
            (t / steps as f64, err)
        })
        .collect();
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(h, e)| (a + h.ln(), b + e.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), &(h, e)| {
        let dx = h.ln() - mx;
        (a + dx * (e.ln() - my), b + dx * dx)
    });
    Ok(ConvergenceFit {
        slope: num / den,
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceFit {
    pub slope: f64,
    /// `(step, error)` pairs.
    pub points: Vec<(f64, f64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm_i_hermitian;
    use crate::spin::h0;

    fn p(omega0: f64, omega1: f64, theta: f64) -> ModelParams {
        ModelParams::new(omega0, omega1, theta).unwrap()
    }

    #[test]
    fn zero_time() {
        let r = integrate_lab(&p(1.0, 0.5, 0.3), 0.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(r.u_numeric, ComplexMat4::identity());
        assert_eq!(r.steps_taken, 0);
    }

    #[test]
    fn static_field_matches_exponential() {
        let q = p(1.0, 0.0, 0.0);
        let r = integrate_lab(&q, 10.0, &IntegratorConfig::default()).unwrap();
        let exact = expm_i_hermitian(&h0(&q, &SpinOps::new()), 10.0).unwrap();
        assert!((r.u_numeric - exact).frobenius_norm() < 1e-8);
        assert!(r.norm_drift < 1e-8);
    }

    #[test]
    fn untilted_frame_check() {
        let f = rotating_frame_check(&p(1.0, 2.0, 0.0), 5.0, &IntegratorConfig::default()).unwrap();
        assert!(f >= 1.0 - 1e-9);
    }

    #[test]
    fn budget_and_domain_errors() {
        let cfg = IntegratorConfig {
            max_steps: 10,
            ..Default::default()
        };
        assert!(matches!(
            integrate_lab(&p(1.0, 0.5, 0.3), 5.0, &cfg),
            Err(Error::StepBudgetExceeded { .. })
        ));
        assert!(IntegratorConfig::with_step_scale(0.5).validate().is_err());
        assert!(integrate_lab(&p(1.0, 0.5, 0.3), -1.0, &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn coarse_steps_fail_halving_check() {
        let cfg = IntegratorConfig {
            step_scale: 0.1,
            tolerance: 1e-12,
            ..Default::default()
        };
        assert!(matches!(
            integrate_lab(&p(1.0, 0.5, 0.3), 20.0, &cfg),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn fourth_order() {
        let fit = convergence_order(&p(1.0, 0.7, 0.6), 20.0, &[0.02, 0.01, 0.005]).unwrap();
        assert!((fit.slope - 4.0).abs() < 0.5, "{fit:?}");
    }
}
