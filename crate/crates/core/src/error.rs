use std::path::PathBuf;

use thiserror::Error;

use crate::model::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("nodes {0} and {1} share a location; hyperarc gain would be infinite")]
    CoincidentNodes(NodeId, NodeId),

    #[error("negative transmit power {0}")]
    NegativePower(f64),

    #[error("hyperarc references unknown node {0}")]
    UnknownNode(NodeId),

    #[error("owning sets of sender {0} are not laminar")]
    NonLaminar(NodeId),

    #[error("hyperarcs of sender {0} do not form a nested chain")]
    NotNested(NodeId),

    #[error("session {session}: sink {sink} is unreachable from source {origin}")]
    UnreachableSink {
        session: usize,
        origin: NodeId,
        sink: NodeId,
    },

    #[error("generator could not find a feasible demand scaling after {0} attempts")]
    GeneratorExhausted(usize),

    #[error("program is infeasible")]
    Infeasible,

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}
