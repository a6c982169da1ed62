use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::hin::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("empty graph: {0}")]
    EmptyGraph(String),

    #[error("node {0} has no neighbors")]
    NoNeighbors(NodeId),

    #[error(
        "node type `{0}` has fewer than two nodes, so no negative can be drawn for it; \
         remove the type from the input or merge it with another type"
    )]
    SingletonType(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite {what} at training step {step}")]
    NonFinite { step: u64, what: String },

    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Errors caused by bad user input (files, config values) rather than by a
    /// failure while running.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Config(_)
                | Error::EmptyGraph(_)
                | Error::SingletonType(_)
                | Error::InvalidInput(_)
        )
    }
}
