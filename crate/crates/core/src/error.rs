//! Error types shared across the library.

use thiserror::Error;

/// Construction and validation failures for problem instances.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("EmptyConfiguration: at least one emitter point is required")]
    EmptyConfiguration,
    #[error("NonFiniteCoordinate: point {index} has a non-finite coordinate")]
    NonFiniteCoordinate { index: usize },
    #[error("ExponentOutOfRange: m = {m} is outside (3, 4); use an override constructor for fixtures")]
    ExponentOutOfRange { m: f64 },
    #[error("InvalidState: ({x}, {y}, {h}) requires finite coordinates and h > 0")]
    InvalidState { x: f64, y: f64, h: f64 },
    #[error("SemiAngleOutOfRange: {deg} deg is outside (0, 90)")]
    SemiAngleOutOfRange { deg: f64 },
    #[error("SourceIndexOutOfRange: index {index} for {len} points")]
    SourceIndexOutOfRange { index: usize, len: usize },
}

/// Newton-solver failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("SingularHessian: |det DF| = {det:e} fell below the rank threshold at ({x}, {y})")]
    SingularHessian { x: f64, y: f64, det: f64 },
    #[error("MaxIterations: no convergence after {max_iter} iterations (residual {residual:e})")]
    MaxIterations { max_iter: usize, residual: f64 },
    #[error("Diverged: iterate ({x}, {y}) left the inflated bounding rectangle")]
    Diverged { x: f64, y: f64 },
    #[error("DampingExhausted: residual would not decrease after {halvings} step halvings")]
    DampingExhausted { halvings: usize },
    #[error("StateOutsideRectangle: ({x}, {y}) is inside the bounding rectangle")]
    StateInsideRectangle { x: f64, y: f64 },
}

/// Path-following and event-localization failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContinuationError {
    #[error("RankDeficientTangent: the 2x3 system [DF | dF/dh] has no unique null direction")]
    RankDeficientTangent,
    #[error("StartResidualTooLarge: start point residual {residual:e} exceeds {tol:e}")]
    StartResidualTooLarge { residual: f64, tol: f64 },
    #[error("ImmediateCorrectorFailure: first corrector step failed: {0}")]
    ImmediateCorrectorFailure(String),
    #[error("NoCrossingInBracket: no eigenvalue sign change between h = {h_lo} and h = {h_hi}")]
    NoCrossingInBracket { h_lo: f64, h_hi: f64 },
    #[error("AllSeedsTrivial: every branch-switch seed converged back to the trivial branch")]
    AllSeedsTrivial,
    #[error("TargetEqualsStart: h_target must differ from the start height")]
    TargetEqualsStart,
    #[error("Solve: {0}")]
    Solve(#[from] SolveError),
}

/// Symmetry-certification failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("EquivarianceNotCertified: residual {residual:e} exceeds {tol:e} times gradient scale")]
    EquivarianceNotCertified { residual: f64, tol: f64 },
    #[error("Solve: {0}")]
    Solve(#[from] SolveError),
}
