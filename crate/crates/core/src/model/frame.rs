use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// One timestamped bundle of featurized human stimuli as perceived by the
/// robot: face detection, facial action units, mutual gaze and skin contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StimulusFrame<T> {
    /// Seconds from session start.
    pub t: T,
    pub face_present: bool,
    /// Smile intensity in `[0, 1]`.
    pub smile: T,
    /// Frown intensity in `[0, 1]`.
    pub frown: T,
    pub mutual_gaze: bool,
    /// Number of active tactile elements.
    pub touch_taxels: u32,
    /// Average pressure over the touched area, in skin-sensor units.
    pub touch_pressure: T,
}

/// Reason a [`StimulusFrame`] was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("negative timestamp")]
    NegativeTime,
    #[error("{0} outside [0, 1]")]
    IntensityOutOfRange(&'static str),
    #[error("negative touch pressure")]
    NegativePressure,
    #[error("pressure without taxels")]
    PressureWithoutTaxels,
    #[error("expression without face")]
    ExpressionWithoutFace,
    #[error("gaze without face")]
    GazeWithoutFace,
    #[error("contradictory expression: smile and frown both above 0.5")]
    ContradictoryExpression,
}

impl FrameError {
    /// Name of the serialized field the violation is attributed to.
    pub fn field(&self) -> &'static str {
        match self {
            FrameError::NonFinite(f) | FrameError::IntensityOutOfRange(f) => f,
            FrameError::NegativeTime => "t",
            FrameError::NegativePressure | FrameError::PressureWithoutTaxels => "touch_pressure",
            FrameError::ExpressionWithoutFace | FrameError::ContradictoryExpression => "smile",
            FrameError::GazeWithoutFace => "mutual_gaze",
        }
    }
}

impl<T: Scalar> StimulusFrame<T> {
    /// Nobody in view, no contact.
    pub fn empty(t: T) -> Self {
        StimulusFrame {
            t,
            face_present: false,
            smile: T::zero(),
            frown: T::zero(),
            mutual_gaze: false,
            touch_taxels: 0,
            touch_pressure: T::zero(),
        }
    }

    /// A face in view holding a neutral expression.
    pub fn neutral_face(t: T, mutual_gaze: bool) -> Self {
        StimulusFrame {
            face_present: true,
            mutual_gaze,
            ..Self::empty(t)
        }
    }

    pub fn with_touch(mut self, taxels: u32, pressure: T) -> Self {
        self.touch_taxels = taxels;
        self.touch_pressure = pressure;
        self
    }

    pub fn with_smile(mut self, smile: T) -> Self {
        self.smile = smile;
        self
    }

    pub fn with_frown(mut self, frown: T) -> Self {
        self.frown = frown;
        self
    }

    pub fn touch_present(&self) -> bool {
        self.touch_taxels > 0
    }

    pub fn is_smiling(&self) -> bool {
        self.smile > T::lit(0.5)
    }

    pub fn validate(&self) -> Result<(), FrameError> {
        for (name, v) in [
            ("t", self.t),
            ("smile", self.smile),
            ("frown", self.frown),
            ("touch_pressure", self.touch_pressure),
        ] {
            if !v.is_finite() {
                return Err(FrameError::NonFinite(name));
            }
        }
        if self.t < T::zero() {
            return Err(FrameError::NegativeTime);
        }
        let unit = |v: T| v >= T::zero() && v <= T::one();
        if !unit(self.smile) {
            return Err(FrameError::IntensityOutOfRange("smile"));
        }
        if !unit(self.frown) {
            return Err(FrameError::IntensityOutOfRange("frown"));
        }
        if self.touch_pressure < T::zero() {
            return Err(FrameError::NegativePressure);
        }
        if self.touch_taxels == 0 && self.touch_pressure != T::zero() {
            return Err(FrameError::PressureWithoutTaxels);
        }
        if !self.face_present {
            if self.smile != T::zero() || self.frown != T::zero() {
                return Err(FrameError::ExpressionWithoutFace);
            }
            if self.mutual_gaze {
                return Err(FrameError::GazeWithoutFace);
            }
        }
        let half = T::lit(0.5);
        if self.smile > half && self.frown > half {
            return Err(FrameError::ContradictoryExpression);
        }
        Ok(())
    }
}

/// Returns the frame unchanged when every frame invariant holds.
pub fn validate_frame<T: Scalar>(frame: StimulusFrame<T>) -> Result<StimulusFrame<T>, FrameError> {
    frame.validate().map(|_| frame)
}
