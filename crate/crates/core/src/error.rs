use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (residual {residual:.3e} exceeds {tolerance:.1e})")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("{name} = {value} is outside its domain: {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("transverse coupling xi = {xi:.3e} is below the floor {floor:.3e}")]
    DegenerateCoupling { xi: f64, floor: f64 },

    #[error("beta blocks violate unitarity (residual {residual:.3e})")]
    UnitarityViolation { residual: f64 },

    #[error("step-halving disagreement {disagreement:.3e} exceeds {limit:.3e} after {steps} steps")]
    NoConvergence {
        disagreement: f64,
        limit: f64,
        steps: usize,
    },

    #[error("integration needs {required} steps, budget is {budget}")]
    StepBudgetExceeded { required: usize, budget: usize },

    #[error("column norm drift {drift:.3e} exceeds {limit:.1e}")]
    NormDrift { drift: f64, limit: f64 },

    #[error("invalid sweep: {0}")]
    Sweep(String),
}
