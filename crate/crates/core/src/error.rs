use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Gamma has a pole at {0}")]
    GammaPole(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("step size underflow at x = {x}")]
    StepUnderflow { x: f64 },

    #[error("solution overflow at x = {x} (|y| > 1e150); rescale the initial data")]
    Overflow { x: f64 },

    #[error("near-zero Wronskian W = {w:e} at alpha = {alpha}: 0 is (numerically) an eigenvalue")]
    NearZeroWronskian { alpha: f64, w: f64 },

    #[error("det(T_0) vanishes: W(0) = {w0:e} is numerically zero")]
    VanishingUnperturbedDeterminant { w0: f64 },

    #[error("numerical W(0) = {numeric} disagrees with the closed form {closed}")]
    UnperturbedWronskianMismatch { numeric: f64, closed: f64 },

    #[error("determinant routes disagree: {integer_beta} vs {normalized}")]
    RouteMismatch { integer_beta: f64, normalized: f64 },

    #[error("closed form {form} not valid here: {reason}")]
    ClosedFormDomain { form: &'static str, reason: String },

    #[error("truncation too small: lambda_N = {lambda_n} but w(L)/2 = {half_wall}; increase L")]
    TruncationTooSmall { lambda_n: f64, half_wall: f64 },

    #[error("eigenvalue {index} missed: node count skipped an integer")]
    MissedEigenvalue { index: usize },

    #[error("spectrum not positive: lambda_{index} = {lambda}")]
    NonPositiveSpectrum { index: usize, lambda: f64 },

    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),
}
