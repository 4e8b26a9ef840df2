use thiserror::Error;

use crate::model::{BusId, LineId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid area: {0}")]
    InvalidArea(String),

    #[error("unknown bus {0}")]
    UnknownBus(BusId),

    #[error("unknown line {0}")]
    UnknownLine(LineId),

    #[error("line {0} is out of service")]
    LineOutOfService(LineId),

    #[error("outage of line {0} islands the network")]
    Islanding(LineId),

    #[error("line {0} is not inside the area")]
    NotAreaLine(LineId),

    /// The area's internal subgraph is split, or one side is not coupled to
    /// the other through the area.
    #[error("degenerate area: {0}")]
    DegenerateArea(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("stress direction undefined: {0}")]
    UndefinedDirection(String),

    #[error("no outage results to summarize")]
    EmptyResults,

    #[error("invalid generator parameters: {0}")]
    Generator(String),
}
