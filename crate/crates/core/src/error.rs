use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("divergent integral: {0}")]
    Divergence(String),

    #[error("ball too small: {nodes} grid nodes inside (need at least {min})")]
    BallTooSmall { nodes: usize, min: usize },

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("prerequisite not met: {0}")]
    Prerequisite(String),

    #[error("field has no maximum point (identically zero)")]
    NoMaximum,

    #[error("degenerate frame: {0}")]
    Degenerate(String),

    #[error("window error: {0}")]
    Window(String),

    #[error("profile error: {0}")]
    Profile(String),

    #[error("frame error: {0}")]
    Frame(String),

    #[error("time step violates CFL: dt = {dt}, limit = {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("numerical divergence: {0}")]
    NumericalBlowup(String),

    #[error("series error: {0}")]
    Series(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that come from a failed computation rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Divergence(_) | Error::Cfl { .. } | Error::NumericalBlowup(_) | Error::Degenerate(_) | Error::NoMaximum
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
