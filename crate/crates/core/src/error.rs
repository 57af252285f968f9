use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {}", render_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("unknown firm `{0}`")]
    UnknownFirm(String),

    #[error("unknown worker `{0}`")]
    UnknownWorker(String),

    #[error("edge index {index} out of range ({edges} edges)")]
    EdgeOutOfRange { index: usize, edges: usize },

    /// The search ran out of extension steps before reaching a verdict.
    #[error("search budget of {0} steps exhausted")]
    BudgetExhausted(u64),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("bad parameters: {0}")]
    Params(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

fn render_violations(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
