//! Sorting of perceived stimuli into stress and comfort signals.
//!
//! Both signals are clamped linear combinations of frame features. The
//! profiles differ only through their [`AppraisalWeights`] and in whether a
//! smile still comforts while the robot is being touched: for the anxious
//! profile it does, for the avoidant profile touch cancels it.

use serde::{Deserialize, Serialize};

use crate::model::{AppraisalWeights, ProfileParams, RobotProfileKind, StimulusFrame};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppraisalResult<T> {
    pub stress: T,
    pub comfort: T,
}

/// Normalized touch strength in `[0, 1]`: contact area times pressure, each
/// saturating at its reference value.
pub fn touch_intensity<T: Scalar>(frame: &StimulusFrame<T>, weights: &AppraisalWeights<T>) -> T {
    if !frame.touch_present() {
        return T::zero();
    }
    let area = (T::from_u32(frame.touch_taxels).expect("taxel count") / weights.taxels_ref).min(T::one());
    let pressure = (frame.touch_pressure / weights.pressure_ref).min(T::one());
    area * pressure
}

fn indicator<T: Scalar>(b: bool) -> T {
    if b {
        T::one()
    } else {
        T::zero()
    }
}

pub fn appraise<T: Scalar>(frame: &StimulusFrame<T>, params: &ProfileParams<T>) -> AppraisalResult<T> {
    let w = &params.appraisal_weights;
    let one = T::one();
    let touch = touch_intensity(frame, w);
    let touching = indicator::<T>(frame.touch_present());
    let face = indicator::<T>(frame.face_present);
    let gaze = indicator::<T>(frame.mutual_gaze);
    let untouched = one - touching;

    let smile_gate = match params.kind {
        RobotProfileKind::Anxious => one,
        RobotProfileKind::Avoidant => untouched,
    };
    let comfort = w.w_touch_comfort * touch
        + w.w_smile_comfort * frame.smile * smile_gate
        + w.w_gaze_comfort * gaze
        + w.w_neutral_comfort * face * untouched;

    let stress = w.w_noface_stress * (one - face)
        + w.w_ignored_stress * face * untouched * (one - frame.smile)
        + w.w_frown_stress * frame.frown
        + w.w_touch_stress * touch
        + w.w_gaze_stress * gaze * touching;

    AppraisalResult {
        stress: stress.clamp01(),
        comfort: comfort.clamp01(),
    }
}
