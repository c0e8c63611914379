use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::frame::StimulusFrame;
use super::profile::ProfileParams;
use super::state::{BehaviorState, RobotAction};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Episodes of a session, in chronological order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    FreePlay,
    Paradigm,
    Reunion,
    #[serde(rename = "free_play2")]
    FreePlay2,
}

impl Phase {
    pub const ALL: [Phase; 4] = [Phase::FreePlay, Phase::Paradigm, Phase::Reunion, Phase::FreePlay2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::FreePlay => "free_play",
            Phase::Paradigm => "paradigm",
            Phase::Reunion => "reunion",
            Phase::FreePlay2 => "free_play2",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParadigmKind {
    /// Still-Face: no touch, neutral face.
    #[serde(rename = "sf")]
    StillFace,
    /// Still-Face with maintained touch.
    #[serde(rename = "sft")]
    StillFaceTouch,
}

impl ParadigmKind {
    pub const ALL: [ParadigmKind; 2] = [ParadigmKind::StillFace, ParadigmKind::StillFaceTouch];

    pub fn name(self) -> &'static str {
        match self {
            ParadigmKind::StillFace => "sf",
            ParadigmKind::StillFaceTouch => "sft",
        }
    }
}

impl fmt::Display for ParadigmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParadigmKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sf" => Ok(ParadigmKind::StillFace),
            "sft" => Ok(ParadigmKind::StillFaceTouch),
            other => Err(format!("unknown paradigm '{other}'")),
        }
    }
}

/// Behavioral profile of the synthetic human caretaker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HumanProfile {
    #[serde(rename = "control")]
    Control,
    #[serde(rename = "avoidant")]
    AvoidantHuman,
    #[serde(rename = "anxious")]
    AnxiousHuman,
}

impl HumanProfile {
    pub const ALL: [HumanProfile; 3] = [
        HumanProfile::Control,
        HumanProfile::AvoidantHuman,
        HumanProfile::AnxiousHuman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HumanProfile::Control => "control",
            HumanProfile::AvoidantHuman => "avoidant",
            HumanProfile::AnxiousHuman => "anxious",
        }
    }
}

impl fmt::Display for HumanProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HumanProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "control" => Ok(HumanProfile::Control),
            "avoidant" => Ok(HumanProfile::AvoidantHuman),
            "anxious" => Ok(HumanProfile::AnxiousHuman),
            other => Err(format!("unknown human profile '{other}'")),
        }
    }
}

/// Length of each phase, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDurations<T> {
    pub free_play: T,
    pub paradigm: T,
    pub reunion: T,
    pub free_play2: T,
}

impl<T: Scalar> Default for PhaseDurations<T> {
    fn default() -> Self {
        PhaseDurations {
            free_play: T::lit(20.0),
            paradigm: T::lit(20.0),
            reunion: T::lit(20.0),
            free_play2: T::lit(60.0),
        }
    }
}

impl<T: Scalar> PhaseDurations<T> {
    pub fn as_array(&self) -> [T; 4] {
        [self.free_play, self.paradigm, self.reunion, self.free_play2]
    }

    pub fn from_array(d: [T; 4]) -> Self {
        PhaseDurations {
            free_play: d[0],
            paradigm: d[1],
            reunion: d[2],
            free_play2: d[3],
        }
    }

    pub fn total(&self) -> T {
        self.as_array().into_iter().fold(T::zero(), |a, b| a + b)
    }
}

/// Where a session's stimuli come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StimulusSource {
    Synthetic { human: HumanProfile, seed: u64 },
    Replay { path: PathBuf },
    Live,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig<T> {
    pub paradigm: ParadigmKind,
    pub robot_profile: ProfileParams<T>,
    pub stimulus_source: StimulusSource,
    pub tick_hz: u32,
    pub durations: PhaseDurations<T>,
}

pub const DEFAULT_TICK_HZ: u32 = 10;

impl<T: Scalar> SessionConfig<T> {
    /// Config with the default tick rate and phase durations.
    pub fn new(paradigm: ParadigmKind, robot_profile: ProfileParams<T>, stimulus_source: StimulusSource) -> Self {
        SessionConfig {
            paradigm,
            robot_profile,
            stimulus_source,
            tick_hz: DEFAULT_TICK_HZ,
            durations: PhaseDurations::default(),
        }
    }

    pub fn dt(&self) -> T {
        T::one() / T::from_u32(self.tick_hz).expect("tick rate is representable")
    }

    /// Session clock at tick `i`.
    pub fn tick_time(&self, i: usize) -> T {
        T::from_count(i) / T::from_u32(self.tick_hz).expect("tick rate is representable")
    }

    pub fn schedule(&self) -> PhaseSchedule {
        PhaseSchedule::new(&self.durations, self.tick_hz)
    }

    pub fn total_ticks(&self) -> usize {
        self.schedule().end
    }

    pub fn validate(&self) -> Result<()> {
        if self.tick_hz == 0 {
            return Err(Error::InvalidConfig("tick_hz must be positive".into()));
        }
        for (phase, d) in Phase::ALL.iter().zip(self.durations.as_array()) {
            if !(d.is_finite() && d >= T::zero()) {
                return Err(Error::InvalidConfig(format!(
                    "duration of {phase} must be non-negative"
                )));
            }
        }
        if self.total_ticks() == 0 {
            return Err(Error::InvalidConfig("session has no ticks".into()));
        }
        self.robot_profile.validate()
    }
}

/// Phase boundaries expressed in ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseSchedule {
    /// First tick of each phase, in [`Phase::ALL`] order.
    pub starts: [usize; 4],
    /// One past the last tick of the session.
    pub end: usize,
}

impl PhaseSchedule {
    pub fn new<T: Scalar>(durations: &PhaseDurations<T>, tick_hz: u32) -> Self {
        let hz = T::from_u32(tick_hz).expect("tick rate is representable");
        let mut starts = [0usize; 4];
        let mut cumulative = T::zero();
        let mut boundary = |d: T| {
            cumulative = cumulative + d;
            (cumulative * hz).round().to_usize().unwrap_or(0)
        };
        let d = durations.as_array();
        starts[1] = boundary(d[0]);
        starts[2] = boundary(d[1]);
        starts[3] = boundary(d[2]);
        let end = boundary(d[3]);
        PhaseSchedule { starts, end }
    }

    pub fn phase_of_tick(&self, i: usize) -> Option<Phase> {
        if i >= self.end {
            return None;
        }
        Phase::ALL.into_iter().rev().find(|p| i >= self.starts[p.index()])
    }

    /// Tick range `[start, end)` covered by `phase`.
    pub fn range(&self, phase: Phase) -> std::ops::Range<usize> {
        let k = phase.index();
        let end = if k + 1 < 4 { self.starts[k + 1] } else { self.end };
        self.starts[k]..end
    }

    /// Rebuilds durations from tick boundaries.
    pub fn durations<T: Scalar>(&self, tick_hz: u32) -> PhaseDurations<T> {
        let hz = T::from_u32(tick_hz).expect("tick rate is representable");
        let mut d = [T::zero(); 4];
        for p in Phase::ALL {
            d[p.index()] = T::from_count(self.range(p).len()) / hz;
        }
        PhaseDurations::from_array(d)
    }
}

/// Everything that happened at one tick of a session.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord<T> {
    pub t: T,
    pub phase: Phase,
    pub frame: StimulusFrame<T>,
    pub stress: T,
    pub comfort: T,
    pub cortisol: T,
    pub behavior: BehaviorState,
    pub action: RobotAction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionTrace<T> {
    pub config: SessionConfig<T>,
    pub records: Vec<TraceRecord<T>>,
}

impl<T: Scalar> SessionTrace<T> {
    pub fn cortisol(&self) -> Vec<T> {
        self.records.iter().map(|r| r.cortisol).collect()
    }

    pub fn frames(&self) -> Vec<StimulusFrame<T>> {
        self.records.iter().map(|r| r.frame).collect()
    }

    /// True when every tick of the configured schedule is present.
    pub fn is_complete(&self) -> bool {
        self.records.len() == self.config.total_ticks()
    }

    /// Checks the trace invariants. Truncated traces (a live session stopped
    /// early) are accepted as long as they form a prefix of the schedule.
    pub fn validate(&self) -> Result<()> {
        self.validate_with(|_, err| err)
    }

    /// Like [`validate`](Self::validate), with `locate(record_index, error)`
    /// used to attach positional context to each failure.
    pub fn validate_with(&self, locate: impl Fn(usize, Error) -> Error) -> Result<()> {
        self.config.validate()?;
        if self.records.is_empty() {
            return Err(Error::schema(None, "no records"));
        }
        let schedule = self.config.schedule();
        if self.records.len() > schedule.end {
            return Err(Error::schema(None, "records exceed session length"));
        }
        let params = &self.config.robot_profile;
        let unit = |v: T| v >= T::zero() && v <= T::one();
        for (i, r) in self.records.iter().enumerate() {
            let field_err = |field: &str| locate(i, Error::schema(None, field));
            if r.t != self.config.tick_time(i) {
                return Err(field_err("t"));
            }
            if Some(r.phase) != schedule.phase_of_tick(i) {
                return Err(field_err("phase"));
            }
            if r.frame.t != r.t {
                return Err(field_err("frame.t"));
            }
            if let Err(e) = r.frame.validate() {
                return Err(field_err(e.field()));
            }
            if !unit(r.stress) {
                return Err(field_err("stress"));
            }
            if !unit(r.comfort) {
                return Err(field_err("comfort"));
            }
            if !(r.cortisol >= T::zero() && r.cortisol <= params.c_max) {
                return Err(field_err("cortisol"));
            }
            if !r.behavior.reachable_for(params.kind) {
                return Err(field_err("behavior"));
            }
            if !r.action.allowed_for(params.kind) {
                return Err(field_err("action"));
            }
        }
        Ok(())
    }
}
