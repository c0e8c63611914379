use serde::{Deserialize, Serialize};

use super::profile::RobotProfileKind;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorState {
    Content,
    SeekingContact,
    Distressed,
    Withdrawn,
}

impl BehaviorState {
    pub fn reachable_for(self, kind: RobotProfileKind) -> bool {
        match self {
            BehaviorState::Content => true,
            BehaviorState::SeekingContact | BehaviorState::Distressed => kind == RobotProfileKind::Anxious,
            BehaviorState::Withdrawn => kind == RobotProfileKind::Avoidant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobotAction {
    Idle,
    TurnTorso,
    StretchArms,
    VocalCall,
    SmileExpression,
    LookAway,
    PullAway,
}

impl RobotAction {
    pub fn allowed_for(self, kind: RobotProfileKind) -> bool {
        match self {
            RobotAction::StretchArms | RobotAction::VocalCall => kind == RobotProfileKind::Anxious,
            RobotAction::LookAway | RobotAction::PullAway => kind == RobotProfileKind::Avoidant,
            RobotAction::Idle | RobotAction::TurnTorso | RobotAction::SmileExpression => true,
        }
    }
}

/// Current R-cortisol level together with the behavioral state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CortisolState<T> {
    c: T,
    behavior: BehaviorState,
    c_max: T,
}

impl<T: Scalar> CortisolState<T> {
    pub fn new(c: T, behavior: BehaviorState, c_max: T) -> Result<Self> {
        if !(c.is_finite() && c_max.is_finite() && c >= T::zero() && c <= c_max) {
            return Err(Error::InvalidInput(format!("cortisol {c} outside [0, {c_max}]")));
        }
        Ok(CortisolState { c, behavior, c_max })
    }

    pub fn level(&self) -> T {
        self.c
    }

    pub fn behavior(&self) -> BehaviorState {
        self.behavior
    }

    pub fn over_threshold(&self) -> bool {
        self.c > self.c_max / T::lit(2.0)
    }
}
