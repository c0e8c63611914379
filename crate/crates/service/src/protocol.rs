//! Messages exchanged with the caretaker client, one JSON object per
//! WebSocket text frame, discriminated by a `type` field.

use hpa_sim_core::model::{BehaviorState, FrameError, Phase, RobotAction, StimulusFrame};
use hpa_sim_core::trace_io::SCHEMA_VERSION;
use hpa_sim_core::Config;
use serde::{Deserialize, Deserializer, Serialize};

/// Stimulus held by the caretaker until the next update. Omitted fields
/// fall back to "nothing perceived".
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StimulusUpdate {
    #[serde(alias = "face", deserialize_with = "flag")]
    pub face_present: bool,
    pub smile: f64,
    pub frown: f64,
    #[serde(alias = "gaze", deserialize_with = "flag")]
    pub mutual_gaze: bool,
    pub touch_taxels: u32,
    pub touch_pressure: f64,
}

/// Accepts `true`/`false` as well as `1`/`0`.
fn flag<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Flag {
        Bool(bool),
        Int(u8),
    }
    match Flag::deserialize(d)? {
        Flag::Bool(b) => Ok(b),
        Flag::Int(0) => Ok(false),
        Flag::Int(1) => Ok(true),
        Flag::Int(n) => Err(serde::de::Error::custom(format!("expected 0 or 1, got {n}"))),
    }
}

impl StimulusUpdate {
    /// The frame this update produces at session time `t`.
    pub fn frame_at(&self, t: f64) -> StimulusFrame<f64> {
        StimulusFrame {
            t,
            face_present: self.face_present,
            smile: self.smile,
            frown: self.frown,
            mutual_gaze: self.mutual_gaze,
            touch_taxels: self.touch_taxels,
            touch_pressure: self.touch_pressure,
        }
    }

    pub fn validate(&self) -> Result<(), FrameError> {
        self.frame_at(0.0).validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Stimulus(StimulusUpdate),
    PhaseOverride { phase: Phase },
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    /// The schedule ran to its last tick.
    Completed,
    /// The client sent `stop`.
    Stopped,
    /// A malformed or invalid client message.
    Aborted,
    /// The service was shut down.
    Shutdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello {
        schema_version: u32,
        config: Config,
    },
    Tick {
        t: f64,
        phase: Phase,
        stress: f64,
        comfort: f64,
        cortisol: f64,
        behavior: BehaviorState,
        action: RobotAction,
    },
    Rejected {
        reason: String,
    },
    Error {
        message: String,
    },
    SessionEnd {
        reason: EndReason,
        records: usize,
    },
}

impl ServerMessage {
    pub fn hello(config: &Config) -> Self {
        ServerMessage::Hello {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
        }
    }

    pub fn occupied() -> Self {
        ServerMessage::Rejected {
            reason: "session occupied".into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server messages always serialize")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProtocolError {
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("invalid stimulus: {0}")]
    InvalidStimulus(#[from] FrameError),
    #[error("binary frames are not part of the protocol")]
    Binary,
}

pub fn parse_client_message(text: &str) -> Result<ClientMessage, ProtocolError> {
    let msg: ClientMessage = serde_json::from_str(text).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
    if let ClientMessage::Stimulus(s) = &msg {
        s.validate()?;
    }
    Ok(msg)
}
