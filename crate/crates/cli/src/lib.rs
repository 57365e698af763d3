//! File formats, the spasm cache and the command-line front end for
//! `matchwidth-core`.

pub mod cache;
pub mod cli;
pub mod edgelist;
pub mod textfmt;

/// Problems with user-supplied input. The CLI maps these to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InputError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("truncated input: {0}")]
    Truncated(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Graph(String),
}
