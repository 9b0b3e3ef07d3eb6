use thiserror::Error;

/// Errors surfaced by the partitioning and placement pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in {path}: {reason}")]
    Parse { path: String, reason: String },

    #[error("invalid model graph: {0}")]
    Validation(String),

    #[error("position ({x}, {y}) is outside the supported signal domain")]
    Domain { x: f64, y: f64 },

    #[error("model cannot be partitioned under capacity {capacity_bytes} B: {reason}")]
    Infeasible { capacity_bytes: u64, reason: String },

    #[error("partition graph has no root-to-leaf path")]
    NoPath,

    #[error("no {k}-path found for class {class} run at slot {start_slot}")]
    MatchingFailure {
        class: usize,
        k: usize,
        start_slot: usize,
    },

    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: distinct codes per failure family.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Validation(_) => 2,
            Error::Infeasible { .. } | Error::NoPath | Error::InstanceTooLarge(_) => 3,
            Error::MatchingFailure { .. } => 4,
            _ => 1,
        }
    }
}
