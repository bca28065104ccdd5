use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("oracle not applicable: {0}")]
    OracleNotApplicable(String),
    #[error("scan budget exceeded: {count} triples requested, budget is {budget}")]
    Budget { count: u64, budget: u64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
