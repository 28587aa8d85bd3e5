use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: pole at non-positive integer argument {arg}")]
    Pole { func: &'static str, arg: String },

    #[error("{func}: argument outside domain ({msg})")]
    Domain { func: &'static str, msg: String },

    #[error("{func}: branch cut at arg z = ±π")]
    BranchCut { func: &'static str },

    #[error("{func}: zero argument")]
    ZeroArgument { func: &'static str },

    #[error("{func}: no convergence after {iterations} iterations")]
    NoConvergence { func: &'static str, iterations: usize },

    #[error("{func}: overflow (|exponent| = {exponent:.3e})")]
    Overflow { func: &'static str, exponent: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sector error: arg = {theta:.6} outside {region}")]
    Sector { theta: f64, region: &'static str },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("ODE integration failed: {0}")]
    Ode(String),

    #[error("need {needed} asymptotic coefficients, have {available}")]
    InsufficientCoefficients { needed: usize, available: usize },

    #[error("integration path passes through the origin")]
    PathThroughOrigin,

    #[error("seeding error estimate {estimate:.3e} exceeds tolerance {tolerance:.1e}")]
    Seeding { estimate: f64, tolerance: f64 },

    #[error("division guard: |P(zeta)| = {0:.3e} too small")]
    SmallDenominator(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
