use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("division breakdown: denominator magnitude {0:e} below 1e-300")]
    DivisionBreakdown(f64),

    #[error("stable configuration (rho2 <= rho1): no unstable band")]
    StableConfiguration,

    #[error("wavenumber {tau} outside the unstable band (0, {tau_star})")]
    OutOfBand { tau: f64, tau_star: f64 },

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("contour too coarse: winding residual {0} after subdivision budget")]
    ContourTooCoarse(f64),

    #[error("zero on contour boundary: min |f| = {min:e}, scale = {scale:e}")]
    ZeroOnBoundary { min: f64, scale: f64 },

    #[error("singular transmission system: condition estimate {0:e}")]
    SingularSystem(f64),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("box too small: side {side} < required {required}")]
    BoxTooSmall { side: f64, required: f64 },

    #[error("epsilon {epsilon} exceeds |xi0|/2 = {limit}")]
    EpsilonTooLarge { epsilon: f64, limit: f64 },

    #[error("spectral support reaches |xi| = {0} below the zero-frequency guard")]
    ZeroFrequencyTouched(f64),

    #[error("modal amplitude overflow; blow-up at t = {blow_up_time}")]
    OverflowGuard { blow_up_time: f64 },

    #[error("invalid config: {}", .0.join("; "))]
    ConfigInvalid(Vec<String>),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
