//! Cortisol-inspired motivation model for a robot in the role of a toddler.
//!
//! Human stimuli (face, expression, gaze, touch) are appraised into stress and
//! comfort by one of two attachment profiles, integrated into an internal
//! R-cortisol level, and fed to a state machine that selects the robot's
//! actions. Sessions follow the Still-Face protocol (free play, paradigm,
//! reunion, free play) and can be analysed for engagement and for the match
//! between robot profile and interaction style.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what files and the CLI use.

pub mod analysis;
pub mod appraisal;
pub mod behavior;
pub mod controller;
mod error;
pub mod model;
pub mod motivation;
pub mod paradigm;
mod scalar;
pub mod stats;
pub mod trace_io;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Frame = model::StimulusFrame<f64>;
pub type Params = model::ProfileParams<f64>;
pub type Weights = model::AppraisalWeights<f64>;
pub type Config = model::SessionConfig<f64>;
pub type Trace = model::SessionTrace<f64>;
pub type Record = model::TraceRecord<f64>;
pub type Appraisal = appraisal::AppraisalResult<f64>;
pub type Metrics = analysis::InteractionMetrics<f64>;
pub type Wilcoxon = stats::WilcoxonResult<f64>;

pub type Frame32 = model::StimulusFrame<f32>;
pub type Params32 = model::ProfileParams<f32>;
pub type Trace32 = model::SessionTrace<f32>;
