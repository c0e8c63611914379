use std::path::PathBuf;

use thiserror::Error;

use crate::model::{BehaviorState, FrameError, Phase, RobotProfileKind};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(#[from] FrameError),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid session config: {0}")]
    InvalidConfig(String),

    #[error("non-finite input to cortisol update")]
    NonFiniteInput,

    #[error("behavior state {state:?} is not reachable for the {kind:?} profile")]
    ProfileStateMismatch {
        state: BehaviorState,
        kind: RobotProfileKind,
    },

    #[error("time {t}s lies outside the session")]
    OutOfSession { t: f64 },

    #[error("replay source {0} does not exist")]
    ReplaySourceMissing(PathBuf),

    #[error("phase {0:?} has no records")]
    EmptyPhase(Phase),

    #[error("all paired differences are zero")]
    InsufficientData,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("schema violation{}: {field}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    SchemaViolation { line: Option<usize>, field: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn schema(line: Option<usize>, field: impl Into<String>) -> Self {
        Error::SchemaViolation {
            line,
            field: field.into(),
        }
    }
}
