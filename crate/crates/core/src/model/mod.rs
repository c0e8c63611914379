//! Shared domain types: stimuli, robot profiles, behavioral state, session
//! configuration and traces.

mod frame;
mod profile;
mod session;
mod state;

pub use frame::{validate_frame, FrameError, StimulusFrame};
pub use profile::{
    default_params, tuning, AdultAttachmentStyle, AppraisalWeights, Level, ProfileParams, RobotProfileKind,
};
pub use session::{
    HumanProfile, ParadigmKind, Phase, PhaseDurations, PhaseSchedule, SessionConfig, SessionTrace, StimulusSource,
    TraceRecord, DEFAULT_TICK_HZ,
};
pub use state::{BehaviorState, CortisolState, RobotAction};
