use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid symbol parameters: {0}")]
    InvalidSymbol(String),

    #[error("degenerate characteristic roots at rho = {rho}: |delta| = {delta:e}")]
    DegenerateRoots { rho: Complex64, delta: f64 },

    #[error("ambiguous sign for root {root} at rho = {rho}: it lies on the imaginary axis")]
    AmbiguousSign { rho: Complex64, root: Complex64 },

    #[error("root tracking failed at node {node} (rho = {rho}): nearest-neighbour match is ambiguous, refine the path")]
    TrackingFailure { node: usize, rho: Complex64 },

    #[error("degenerate Cramer system: |delta| = {delta:e} below {tol:e}")]
    DegenerateSystem { delta: f64, tol: f64 },

    #[error("representation mismatch: expected {expected}, found {found}")]
    RepresentationMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("quadrature did not converge: {0}")]
    NonconvergentQuadrature(String),

    #[error("oscillatory tail too large: tail/accumulated = {ratio:e} at mu_max = {mu_max}")]
    TailTooFat { mu_max: f64, ratio: f64 },

    #[error("scaled data leave the grid window: {0}")]
    ResampleOutOfWindow(String),

    #[error("Picard iteration is not contracting (ratios {ratios:?}); try a larger lambda")]
    NoContraction { iteration: usize, ratios: Vec<f64> },

    #[error("Picard iteration did not reach the tolerance in {0} iterations")]
    MaxIterExceeded(usize),

    #[error("no lambda up to {0} gave a contracting iteration")]
    LambdaExhausted(f64),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("leading coefficient must be nonzero")]
    ZeroLeadingCoefficient,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// The module whose check produced the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidSymbol(_)
            | Error::DegenerateRoots { .. }
            | Error::AmbiguousSign { .. }
            | Error::TrackingFailure { .. }
            | Error::DegenerateSystem { .. } => "symbols",
            Error::RepresentationMismatch { .. } | Error::GridMismatch(_) => "grids_norms",
            Error::NonconvergentQuadrature(_) | Error::TailTooFat { .. } => "boundary_op",
            Error::ResampleOutOfWindow(_)
            | Error::NoContraction { .. }
            | Error::MaxIterExceeded(_)
            | Error::LambdaExhausted(_) => "solver",
            Error::InvalidExponent(_) | Error::ZeroLeadingCoefficient => "estimates",
            Error::InvalidConfig(_) => "config",
            Error::Io(_) => "io",
        }
    }

    /// Failures of the numerics, as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(self.module(), "symbols" | "boundary_op" | "solver")
            && !matches!(self, Error::InvalidSymbol(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
