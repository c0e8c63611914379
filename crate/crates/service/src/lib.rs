//! Live caretaker sessions over WebSocket.
//!
//! One service instance runs one session for one caretaker. The clock starts
//! when the first client connects; the last stimulus received is held on
//! every tick until replaced, and the recorded trace is written through
//! `hpa_sim_core::trace_io` when the session ends.

pub mod engine;
pub mod protocol;
pub mod server;

pub use engine::SessionEngine;
pub use protocol::{ClientMessage, EndReason, ServerMessage, StimulusUpdate};
pub use server::{ServeOptions, ServiceError, SessionService, SessionSummary};
