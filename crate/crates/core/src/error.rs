use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("eigensolver did not converge: worst residual {residual:e} exceeds {bound:e}")]
    SolverConvergence { residual: f64, bound: f64 },

    #[error("solver failed at gamma = {gamma}: {source}")]
    SolverAt {
        gamma: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("size limit exceeded: n = {n}, limit {limit} for {what}")]
    SizeLimit {
        n: usize,
        limit: usize,
        what: &'static str,
    },

    #[error("closure of the permutation set exceeded {limit} elements")]
    RunawayClosure { limit: usize },

    #[error(
        "irrep dimensions are ambiguous for |G| = {order} with {classes} classes: {candidates:?}"
    )]
    AmbiguousIrreps {
        order: usize,
        classes: usize,
        candidates: Vec<Vec<usize>>,
    },

    #[error("unknown model '{0}'")]
    UnknownModel(String),

    #[error("unknown figure '{0}' (expected fig2 or fig4)")]
    UnknownFigure(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn parse(location: impl AsRef<str>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.as_ref().to_string(),
            message: message.into(),
        }
    }

    /// True for errors raised by the eigensolver, directly or at a sweep point.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::SolverConvergence { .. } | Error::SolverAt { .. }
        )
    }
}
