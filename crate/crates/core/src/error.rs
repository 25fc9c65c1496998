use thiserror::Error;

use crate::lattice::Position;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("({0}, {1}, {2}) is not a lattice point: coordinate sum must be even")]
    InvalidPosition(i32, i32, i32),

    #[error("offset {0} is not one of the 12 neighbor offsets")]
    NotANeighbor(Position),

    #[error("configuration has no modules")]
    EmptyConfiguration,

    #[error("duplicate module at {0}")]
    DuplicateModule(Position),

    #[error("no module at {0}")]
    PositionNotInConfiguration(Position),

    #[error("configuration is not connected")]
    Disconnected,

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("illegal move: module {module} cannot reach {target} ({reason})")]
    IllegalMove {
        module: Position,
        target: Position,
        reason: String,
    },

    #[error("invalid move template: {0}")]
    InvalidTemplate(String),

    #[error("direction {0} is not an in-layer neighbor offset")]
    InvalidDirection(Position),

    #[error("configuration does not lie in a single layer")]
    InputNotSingleLayer,

    #[error("gadget modules collide: {0}")]
    Overlap(String),

    #[error("no witness superconfiguration found for module {module}: {reason}")]
    NoWitnessFound { module: Position, reason: String },

    #[error("configurations differ in size ({0} vs {1} modules)")]
    SizeMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
