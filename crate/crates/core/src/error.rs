use thiserror::Error;

/// Errors raised by the geometric constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate {what}: {detail}")]
    Degenerate { what: &'static str, detail: String },

    #[error("point {point} lies outside the domain of {model}")]
    Domain { model: &'static str, point: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("polygon is not hyperbolically convex")]
    NonConvex,

    #[error("Klein image of the polygon is self-intersecting (edges {0} and {1} cross)")]
    SelfIntersecting(usize, usize),

    #[error("square-root branch is ambiguous at {0}")]
    Branch(String),

    #[error("cannot invert pipeline at {point}: {reason}")]
    Inversion { point: String, reason: String },

    #[error("Schwarz reflection is not defined: {0}")]
    Reflection(String),

    #[error("curve tracing failed: {reason}")]
    Tracing {
        reason: String,
        /// Last accepted points before the failure.
        last_good: Vec<(f64, f64)>,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(model: &'static str, z: num_complex::Complex64) -> Self {
        Error::Domain {
            model,
            point: format!("{z}"),
        }
    }

    pub(crate) fn inversion(z: num_complex::Complex64, reason: impl Into<String>) -> Self {
        Error::Inversion {
            point: format!("{z}"),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
