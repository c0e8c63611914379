//! Still-Face and Still-Face+Touch sessions: phase timing, the synthetic
//! caretaker stimulus sets and complete session runs.
//!
//! Synthetic sets are built per phase segment. Outside the paradigm phase each
//! feature (touch, smile, gaze) is laid out as randomized bouts whose total
//! length hits the human profile's occupancy target to within one tick. Every
//! segment and feature draws from its own ChaCha stream, so the free-play and
//! reunion stimuli for a seed are identical under both paradigms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::controller::RobotController;
use crate::error::{Error, Result};
use crate::model::{
    HumanProfile, ParadigmKind, Phase, SessionConfig, SessionTrace, StimulusFrame, StimulusSource, TraceRecord,
};
use crate::scalar::Scalar;
use crate::trace_io;

/// Taxel count emitted for a synthetic touch.
pub const TOUCH_TAXELS: u32 = 60;
/// Pressure emitted for a synthetic touch.
pub const TOUCH_PRESSURE: f64 = 25.0;

/// Fraction of Still-Face+Touch paradigm frames that must carry touch.
pub const SFT_MIN_TOUCH_FRACTION: f64 = 0.95;

const TOUCH_BOUT_SECS: f64 = 2.0;
const SMILE_BOUT_SECS: f64 = 1.5;
const GAZE_BOUT_SECS: f64 = 2.0;

/// Fraction of non-paradigm frames in which a feature is active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupancy {
    pub touch: f64,
    pub smile: f64,
    pub gaze: f64,
}

pub fn occupancy(human: HumanProfile) -> Occupancy {
    match human {
        HumanProfile::Control => Occupancy {
            touch: 0.40,
            smile: 0.40,
            gaze: 0.60,
        },
        HumanProfile::AnxiousHuman => Occupancy {
            touch: 0.70,
            smile: 0.60,
            gaze: 0.80,
        },
        HumanProfile::AvoidantHuman => Occupancy {
            touch: 0.10,
            smile: 0.15,
            gaze: 0.30,
        },
    }
}

pub fn phase_at<T: Scalar>(t: T, config: &SessionConfig<T>) -> Result<Phase> {
    let hz = T::from_u32(config.tick_hz).expect("tick rate is representable");
    let schedule = config.schedule();
    let end = T::from_count(schedule.end) / hz;
    if !t.is_finite() || t < T::zero() || t >= end {
        return Err(Error::OutOfSession {
            t: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    let phase = Phase::ALL
        .into_iter()
        .rev()
        .find(|p| t >= T::from_count(schedule.starts[p.index()]) / hz)
        .unwrap_or(Phase::FreePlay);
    Ok(phase)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Lays out `round(occupancy * len)` active ticks as bouts with geometric
/// lengths of mean `mean_bout` ticks, separated by random gaps.
fn place_bouts(rng: &mut ChaCha8Rng, len: usize, occupancy: f64, mean_bout: f64) -> Vec<bool> {
    let on = ((occupancy * len as f64).round() as usize).min(len);
    let mut mask = vec![false; len];
    if on == 0 {
        return mask;
    }
    if on == len {
        mask.fill(true);
        return mask;
    }
    let geometric = Geometric::new(1.0 / mean_bout.max(1.0)).expect("valid bout probability");
    let mut bouts = Vec::new();
    let mut placed = 0;
    while placed < on {
        let b = (1 + geometric.sample(rng) as usize).min(on - placed);
        bouts.push(b);
        placed += b;
    }
    let off = len - on;
    while bouts.len() > off + 1 {
        let last = bouts.pop().expect("at least two bouts");
        *bouts.last_mut().expect("at least one bout") += last;
    }
    bouts.shuffle(rng);

    // b bouts need b-1 separating ticks; the rest is spread over b+1 gaps
    let spare = off - (bouts.len() - 1);
    let mut cuts: Vec<usize> = (0..bouts.len()).map(|_| rng.random_range(0..=spare)).collect();
    cuts.sort_unstable();
    let mut pos = cuts[0];
    for (i, &b) in bouts.iter().enumerate() {
        mask[pos..pos + b].fill(true);
        pos += b;
        if i + 1 < bouts.len() {
            pos += 1 + cuts[i + 1] - cuts[i];
        }
    }
    mask
}

fn touch_frame<T: Scalar>(frame: StimulusFrame<T>) -> StimulusFrame<T> {
    frame.with_touch(TOUCH_TAXELS, T::lit(TOUCH_PRESSURE))
}

/// Synthetic caretaker stimuli for one (human profile, paradigm) pair.
pub fn generate_stimuli<T: Scalar>(
    human: HumanProfile,
    paradigm: ParadigmKind,
    config: &SessionConfig<T>,
    seed: u64,
) -> Result<Vec<StimulusFrame<T>>> {
    config.validate()?;
    let schedule = config.schedule();
    let hz = config.tick_hz as f64;
    let occ = occupancy(human);
    let mut frames: Vec<StimulusFrame<T>> = (0..schedule.end)
        .map(|i| StimulusFrame::neutral_face(config.tick_time(i), false))
        .collect();

    for (segment, phase) in [Phase::FreePlay, Phase::Reunion, Phase::FreePlay2]
        .into_iter()
        .enumerate()
    {
        let range = schedule.range(phase);
        let len = range.len();
        let stream = 8 * segment as u64;
        let touch = place_bouts(&mut stream_rng(seed, stream), len, occ.touch, TOUCH_BOUT_SECS * hz);
        let smile = place_bouts(&mut stream_rng(seed, stream + 1), len, occ.smile, SMILE_BOUT_SECS * hz);
        let gaze = place_bouts(&mut stream_rng(seed, stream + 2), len, occ.gaze, GAZE_BOUT_SECS * hz);
        for (k, frame) in frames[range].iter_mut().enumerate() {
            if touch[k] {
                *frame = touch_frame(*frame);
            }
            if smile[k] {
                frame.smile = T::one();
            }
            frame.mutual_gaze = gaze[k];
        }
    }

    let range = schedule.range(Phase::Paradigm);
    let len = range.len();
    let mut rng = stream_rng(seed, 64);
    let released = match paradigm {
        ParadigmKind::StillFace => 0..len,
        ParadigmKind::StillFaceTouch => {
            // brief repositioning of the hand, within the touch budget
            let budget = ((1.0 - SFT_MIN_TOUCH_FRACTION) * len as f64).floor() as usize;
            let gap = rng.random_range(0..=budget);
            let start = rng.random_range(0..=len - gap);
            start..start + gap
        }
    };
    for (k, frame) in frames[range].iter_mut().enumerate() {
        *frame = StimulusFrame::neutral_face(frame.t, true);
        if !released.contains(&k) {
            *frame = touch_frame(*frame);
        }
    }
    Ok(frames)
}

/// Controlled stimuli for dose-response runs: a neutral face with mutual gaze
/// throughout, touched during exactly `round(fraction * blocks)` randomly
/// chosen 2-second blocks. For a fixed seed the touched blocks of a smaller
/// fraction are a subset of those of a larger one.
pub fn touch_dose_stimuli<T: Scalar>(
    config: &SessionConfig<T>,
    fraction: f64,
    seed: u64,
) -> Result<Vec<StimulusFrame<T>>> {
    config.validate()?;
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidInput(format!("touch fraction {fraction} outside [0, 1]")));
    }
    let total = config.total_ticks();
    let block = ((TOUCH_BOUT_SECS * config.tick_hz as f64) as usize).max(1);
    let blocks = total.div_ceil(block);
    let mut order: Vec<usize> = (0..blocks).collect();
    order.shuffle(&mut stream_rng(seed, 128));
    let touched_count = (fraction * blocks as f64).round() as usize;
    let mut touched = vec![false; blocks];
    for &b in &order[..touched_count] {
        touched[b] = true;
    }
    Ok((0..total)
        .map(|i| {
            let frame = StimulusFrame::neutral_face(config.tick_time(i), true);
            if touched[i / block] {
                touch_frame(frame)
            } else {
                frame
            }
        })
        .collect())
}

/// Runs the robot controller over `frames`, one record per tick. The stream
/// may be shorter than the schedule (a live session that was stopped early).
pub fn simulate<T: Scalar>(config: &SessionConfig<T>, frames: &[StimulusFrame<T>]) -> Result<SessionTrace<T>> {
    config.validate()?;
    let schedule = config.schedule();
    if frames.is_empty() || frames.len() > schedule.end {
        return Err(Error::InvalidInput(format!(
            "expected between 1 and {} frames, got {}",
            schedule.end,
            frames.len()
        )));
    }
    let mut controller = RobotController::new(config.robot_profile, config.tick_hz)?;
    let mut records = Vec::with_capacity(frames.len());
    for (i, frame) in frames.iter().enumerate() {
        let t = config.tick_time(i);
        if frame.t != t {
            return Err(Error::InvalidInput(format!(
                "frame {i} has t = {}, expected {t}",
                frame.t
            )));
        }
        let out = controller.step(frame)?;
        records.push(TraceRecord {
            t,
            phase: schedule.phase_of_tick(i).expect("tick inside schedule"),
            frame: *frame,
            stress: out.stress,
            comfort: out.comfort,
            cortisol: out.cortisol,
            behavior: out.behavior,
            action: out.action,
        });
    }
    Ok(SessionTrace {
        config: config.clone(),
        records,
    })
}

/// Resolves the config's stimulus source and simulates the session.
pub fn run_session(config: &SessionConfig<f64>) -> Result<SessionTrace<f64>> {
    config.validate()?;
    let frames = match &config.stimulus_source {
        StimulusSource::Synthetic { human, seed } => generate_stimuli(*human, config.paradigm, config, *seed)?,
        StimulusSource::Replay { path } => {
            if !path.exists() {
                return Err(Error::ReplaySourceMissing(path.clone()));
            }
            trace_io::load_frames(path)?
        }
        StimulusSource::Live => {
            return Err(Error::InvalidConfig(
                "live sessions are driven by the session service".into(),
            ));
        }
    };
    simulate(config, &frames)
}
