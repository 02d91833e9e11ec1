use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("nome |q| = {0} is outside the unit disk; the q-series diverge")]
    NomeOutsideDisk(f64),
    #[error("truncation order must be at least 1")]
    ZeroTruncation,
    #[error("argument {re}+{im}i is within {tol} of a lattice point (pole)")]
    PoleProximity { re: f64, im: f64, tol: f64 },
    #[error("series in the argument diverge: |q^2 exp(2 pi |Im x|)| = {0} >= 1")]
    ConvergenceLoss(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("near-singular Jacobian ({0:e})")]
    SingularJacobian(f64),
    #[error("radius fit needs at least 5 nonzero coefficients, found {0}")]
    TooFewCoefficients(usize),
    #[error("quadrature did not converge (estimated error {0:e})")]
    QuadratureFailure(f64),
    #[error("branch point -e_{index} lies on the integration path")]
    BranchPointOnPath { index: usize },
    #[error("sheet parity mismatch: eigenvalue index {index} but sheet m = {sheet}")]
    ParityMismatch { index: usize, sheet: i64 },
    #[error("continuation stalled at q = {re}+{im}i after {halvings} step halvings")]
    ContinuationStall { re: f64, im: f64, halvings: u32 },
    #[error("could not match final state: {0}")]
    UnmatchedState(String),
    #[error("ODE integration failed: {0}")]
    Integrator(String),
}

pub type Result<T> = std::result::Result<T, Error>;
