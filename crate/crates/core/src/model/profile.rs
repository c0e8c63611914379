use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The two robot attachment profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobotProfileKind {
    Anxious,
    Avoidant,
}

impl RobotProfileKind {
    pub const ALL: [RobotProfileKind; 2] = [RobotProfileKind::Anxious, RobotProfileKind::Avoidant];

    pub fn name(self) -> &'static str {
        match self {
            RobotProfileKind::Anxious => "anxious",
            RobotProfileKind::Avoidant => "avoidant",
        }
    }

    pub fn other(self) -> Self {
        match self {
            RobotProfileKind::Anxious => RobotProfileKind::Avoidant,
            RobotProfileKind::Avoidant => RobotProfileKind::Anxious,
        }
    }
}

impl fmt::Display for RobotProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RobotProfileKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "anxious" => Ok(RobotProfileKind::Anxious),
            "avoidant" => Ok(RobotProfileKind::Avoidant),
            other => Err(format!("unknown profile '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Low,
    High,
}

/// Adult attachment prototypes on the anxiety x avoidance grid. Used only to
/// label human participants in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdultAttachmentStyle {
    Secure,
    Preoccupied,
    Dismissing,
    Fearful,
}

impl AdultAttachmentStyle {
    pub const ALL: [AdultAttachmentStyle; 4] = [
        AdultAttachmentStyle::Secure,
        AdultAttachmentStyle::Preoccupied,
        AdultAttachmentStyle::Dismissing,
        AdultAttachmentStyle::Fearful,
    ];

    pub fn anxiety(self) -> Level {
        match self {
            AdultAttachmentStyle::Secure | AdultAttachmentStyle::Dismissing => Level::Low,
            AdultAttachmentStyle::Preoccupied | AdultAttachmentStyle::Fearful => Level::High,
        }
    }

    pub fn avoidance(self) -> Level {
        match self {
            AdultAttachmentStyle::Secure | AdultAttachmentStyle::Preoccupied => Level::Low,
            AdultAttachmentStyle::Dismissing | AdultAttachmentStyle::Fearful => Level::High,
        }
    }

    pub fn from_dimensions(anxiety: Level, avoidance: Level) -> Self {
        match (anxiety, avoidance) {
            (Level::Low, Level::Low) => AdultAttachmentStyle::Secure,
            (Level::High, Level::Low) => AdultAttachmentStyle::Preoccupied,
            (Level::Low, Level::High) => AdultAttachmentStyle::Dismissing,
            (Level::High, Level::High) => AdultAttachmentStyle::Fearful,
        }
    }
}

/// Per-profile coefficients of the stimulus appraisal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppraisalWeights<T> {
    pub w_touch_comfort: T,
    pub w_smile_comfort: T,
    pub w_gaze_comfort: T,
    /// Comfort from a present face while not being touched.
    pub w_neutral_comfort: T,
    pub w_touch_stress: T,
    pub w_noface_stress: T,
    /// Stress from a present face offering neither touch nor smile.
    pub w_ignored_stress: T,
    pub w_frown_stress: T,
    /// Stress from mutual gaze while being touched.
    pub w_gaze_stress: T,
    pub taxels_ref: T,
    pub pressure_ref: T,
}

impl<T: Scalar> AppraisalWeights<T> {
    pub fn defaults(kind: RobotProfileKind) -> Self {
        let l = T::lit;
        let zero = T::zero();
        match kind {
            RobotProfileKind::Anxious => AppraisalWeights {
                w_touch_comfort: l(0.5),
                w_smile_comfort: l(0.3),
                w_gaze_comfort: l(0.2),
                w_neutral_comfort: zero,
                w_touch_stress: zero,
                w_noface_stress: l(0.6),
                w_ignored_stress: l(0.4),
                w_frown_stress: l(0.3),
                w_gaze_stress: zero,
                taxels_ref: l(60.0),
                pressure_ref: l(25.0),
            },
            RobotProfileKind::Avoidant => AppraisalWeights {
                w_touch_comfort: zero,
                w_smile_comfort: l(0.2),
                w_gaze_comfort: zero,
                w_neutral_comfort: l(0.4),
                w_touch_stress: l(0.6),
                w_noface_stress: zero,
                w_ignored_stress: zero,
                w_frown_stress: l(0.2),
                w_gaze_stress: l(0.2),
                taxels_ref: l(60.0),
                pressure_ref: l(25.0),
            },
        }
    }

    fn coefficients(&self) -> [(&'static str, T); 9] {
        [
            ("w_touch_comfort", self.w_touch_comfort),
            ("w_smile_comfort", self.w_smile_comfort),
            ("w_gaze_comfort", self.w_gaze_comfort),
            ("w_neutral_comfort", self.w_neutral_comfort),
            ("w_touch_stress", self.w_touch_stress),
            ("w_noface_stress", self.w_noface_stress),
            ("w_ignored_stress", self.w_ignored_stress),
            ("w_frown_stress", self.w_frown_stress),
            ("w_gaze_stress", self.w_gaze_stress),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in self.coefficients() {
            if !(w >= T::zero() && w <= T::one()) {
                return Err(Error::InvalidParams(format!("{name} = {w} outside [0, 1]")));
            }
        }
        for (name, r) in [("taxels_ref", self.taxels_ref), ("pressure_ref", self.pressure_ref)] {
            if !(r.is_finite() && r > T::zero()) {
                return Err(Error::InvalidParams(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Every numeric constant that defines one robot attachment profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileParams<T> {
    pub kind: RobotProfileKind,
    /// Stress reactivity gain, 1/s.
    pub rho: T,
    /// Comfort damping gain, 1/s.
    pub kappa: T,
    /// Return-to-baseline rate, 1/s.
    pub lambda: T,
    /// Baseline cortisol.
    pub c0: T,
    pub c_max: T,
    /// Stress inputs strictly below this gate are ignored.
    pub theta_s: T,
    pub appraisal_weights: AppraisalWeights<T>,
}

/// Closed intervals the default constants may be tuned within.
pub mod tuning {
    pub const RHO: (f64, f64) = (0.1, 1.5);
    pub const KAPPA: (f64, f64) = (0.1, 1.5);
    pub const LAMBDA: (f64, f64) = (0.01, 0.5);
    pub const C0: (f64, f64) = (0.05, 0.3);
    pub const THETA_S: (f64, f64) = (0.0, 0.5);
}

impl<T: Scalar> ProfileParams<T> {
    /// Checked constructor using the profile's default appraisal weights.
    #[allow(clippy::too_many_arguments)]
    pub fn new(kind: RobotProfileKind, rho: T, kappa: T, lambda: T, c0: T, c_max: T, theta_s: T) -> Result<Self> {
        let p = ProfileParams {
            kind,
            rho,
            kappa,
            lambda,
            c0,
            c_max,
            theta_s,
            appraisal_weights: AppraisalWeights::defaults(kind),
        };
        p.validate()?;
        Ok(p)
    }

    /// Cortisol level above which a record counts as over threshold.
    pub fn analysis_threshold(&self) -> T {
        self.c_max / T::lit(2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        let all = [self.rho, self.kappa, self.lambda, self.c0, self.c_max, self.theta_s];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("non-finite parameter".into());
        }
        if self.rho <= T::zero() {
            return bad(format!("rho = {} must be positive", self.rho));
        }
        if self.kappa < T::zero() {
            return bad(format!("kappa = {} must be non-negative", self.kappa));
        }
        if self.lambda <= T::zero() {
            return bad(format!("lambda = {} must be positive", self.lambda));
        }
        if self.c_max <= T::zero() {
            return bad(format!("c_max = {} must be positive", self.c_max));
        }
        if self.c0 < T::zero() || self.c0 >= self.c_max {
            return bad(format!("c0 = {} outside [0, c_max)", self.c0));
        }
        if self.analysis_threshold() <= self.c0 {
            return bad(format!("c0 = {} is not below c_max/2", self.c0));
        }
        if self.theta_s < T::zero() || self.theta_s >= T::one() {
            return bad(format!("theta_s = {} outside [0, 1)", self.theta_s));
        }
        self.appraisal_weights.validate()
    }

    /// True when the stability condition of the explicit update holds at `dt`.
    pub fn is_stable_at(&self, dt: T) -> bool {
        dt * (self.rho + self.kappa + self.lambda) < T::one()
    }
}

/// Documented default constants for each robot profile.
pub fn default_params<T: Scalar>(kind: RobotProfileKind) -> ProfileParams<T> {
    let l = T::lit;
    let (rho, kappa, lambda, c0, theta_s) = match kind {
        RobotProfileKind::Anxious => (0.8, 0.4, 0.05, 0.2, 0.1),
        RobotProfileKind::Avoidant => (0.5, 0.5, 0.15, 0.1, 0.3),
    };
    ProfileParams {
        kind,
        rho: l(rho),
        kappa: l(kappa),
        lambda: l(lambda),
        c0: l(c0),
        c_max: T::one(),
        theta_s: l(theta_s),
        appraisal_weights: AppraisalWeights::defaults(kind),
    }
}
