//! The live session state machine. It is driven one tick at a time by the
//! server loop; client messages are queued and only take effect at the next
//! tick boundary.

use std::collections::VecDeque;

use hpa_sim_core::controller::RobotController;
use hpa_sim_core::model::{Phase, PhaseSchedule, SessionTrace, StimulusSource, TraceRecord};
use hpa_sim_core::{Config, Trace};

use crate::protocol::{ClientMessage, EndReason, ServerMessage, StimulusUpdate};

#[derive(Debug)]
pub struct SessionEngine {
    config: Config,
    controller: RobotController<f64>,
    schedule: PhaseSchedule,
    held: StimulusUpdate,
    pending: VecDeque<ClientMessage>,
    records: Vec<TraceRecord<f64>>,
    ended: Option<EndReason>,
}

impl SessionEngine {
    pub fn new(config: Config) -> hpa_sim_core::Result<Self> {
        config.validate()?;
        Ok(SessionEngine {
            controller: RobotController::new(config.robot_profile, config.tick_hz)?,
            schedule: config.schedule(),
            config,
            held: StimulusUpdate::default(),
            pending: VecDeque::new(),
            records: Vec::new(),
            ended: None,
        })
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    /// Number of ticks produced so far.
    pub fn ticks(&self) -> usize {
        self.records.len()
    }

    pub fn ended(&self) -> Option<EndReason> {
        self.ended
    }

    /// Phase the next tick falls in.
    pub fn current_phase(&self) -> Option<Phase> {
        self.schedule.phase_of_tick(self.records.len())
    }

    /// Queues a message for the next tick boundary.
    pub fn apply_client_message(&mut self, msg: ClientMessage) {
        self.pending.push_back(msg);
    }

    /// Ends the session before the schedule runs out.
    pub fn end(&mut self, reason: EndReason) {
        self.ended.get_or_insert(reason);
    }

    fn drain_pending(&mut self) -> Vec<ServerMessage> {
        let mut notices = Vec::new();
        while let Some(msg) = self.pending.pop_front() {
            match msg {
                ClientMessage::Stimulus(s) => self.held = s,
                ClientMessage::PhaseOverride { phase } => {
                    if let Err(message) = self.advance_to(phase) {
                        notices.push(ServerMessage::Error { message });
                    }
                }
                ClientMessage::Stop => {
                    self.end(EndReason::Stopped);
                    break;
                }
            }
        }
        notices
    }

    /// Starts `phase` at the next tick. Skipped phases shrink to nothing and
    /// the phases after `phase` keep their configured lengths.
    fn advance_to(&mut self, phase: Phase) -> Result<(), String> {
        let now = self.records.len();
        let current = self.current_phase().ok_or("session is over")?;
        if phase.index() <= current.index() {
            return Err(format!("cannot move from {current} back to {phase}"));
        }
        let lengths: Vec<usize> = Phase::ALL.iter().map(|&p| self.schedule.range(p).len()).collect();
        let mut starts = self.schedule.starts;
        starts[current.index() + 1..=phase.index()].fill(now);
        for k in phase.index() + 1..4 {
            starts[k] = starts[k - 1] + lengths[k - 1];
        }
        self.schedule = PhaseSchedule {
            starts,
            end: starts[3] + lengths[3],
        };
        Ok(())
    }

    /// Applies queued messages, then advances one tick. Returns the messages
    /// for the client: any notices followed by a `tick`, or nothing once the
    /// session has ended.
    pub fn tick(&mut self) -> Vec<ServerMessage> {
        if self.ended.is_some() {
            return Vec::new();
        }
        let mut out = self.drain_pending();
        if self.ended.is_some() {
            return out;
        }
        let i = self.records.len();
        let Some(phase) = self.schedule.phase_of_tick(i) else {
            self.end(EndReason::Completed);
            return out;
        };
        let t = self.config.tick_time(i);
        let frame = self.held.frame_at(t);
        let step = self
            .controller
            .step(&frame)
            .expect("held stimulus was validated on receipt");
        self.records.push(TraceRecord {
            t,
            phase,
            frame,
            stress: step.stress,
            comfort: step.comfort,
            cortisol: step.cortisol,
            behavior: step.behavior,
            action: step.action,
        });
        out.push(ServerMessage::Tick {
            t,
            phase,
            stress: step.stress,
            comfort: step.comfort,
            cortisol: step.cortisol,
            behavior: step.behavior,
            action: step.action,
        });
        if i + 1 == self.schedule.end {
            self.end(EndReason::Completed);
        }
        out
    }

    /// The recorded session. Phase durations reflect any manual overrides
    /// and the stimulus source is marked live.
    pub fn trace(&self) -> Trace {
        let mut config = self.config.clone();
        config.durations = self.schedule.durations(config.tick_hz);
        config.stimulus_source = StimulusSource::Live;
        debug_assert_eq!(config.schedule(), self.schedule);
        SessionTrace {
            config,
            records: self.records.clone(),
        }
    }
}
