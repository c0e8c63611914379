//! One robot's perceive -> appraise -> integrate -> act loop.

use serde::{Deserialize, Serialize};

use crate::appraisal::appraise;
use crate::behavior::{next_state, select_action};
use crate::error::Result;
use crate::model::{BehaviorState, CortisolState, ProfileParams, RobotAction, StimulusFrame};
use crate::motivation::cortisol_step;
use crate::scalar::Scalar;

/// Output of one controller tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOutput<T> {
    pub stress: T,
    pub comfort: T,
    pub cortisol: T,
    pub behavior: BehaviorState,
    pub action: RobotAction,
}

/// Owns the mutable state threaded through a session. Offline simulation and
/// the live service both drive this type, so their outputs agree bit for bit.
#[derive(Debug, Clone)]
pub struct RobotController<T> {
    params: ProfileParams<T>,
    dt: T,
    cortisol: T,
    behavior: BehaviorState,
}

impl<T: Scalar> RobotController<T> {
    pub fn new(params: ProfileParams<T>, tick_hz: u32) -> Result<Self> {
        params.validate()?;
        if tick_hz == 0 {
            return Err(crate::Error::InvalidInput("tick_hz must be positive".into()));
        }
        Ok(RobotController {
            dt: T::one() / T::from_u32(tick_hz).expect("tick rate is representable"),
            cortisol: params.c0,
            behavior: BehaviorState::Content,
            params,
        })
    }

    pub fn params(&self) -> &ProfileParams<T> {
        &self.params
    }

    pub fn state(&self) -> CortisolState<T> {
        CortisolState::new(self.cortisol, self.behavior, self.params.c_max).expect("controller keeps cortisol in range")
    }

    pub fn step(&mut self, frame: &StimulusFrame<T>) -> Result<StepOutput<T>> {
        frame.validate()?;
        let appraisal = appraise(frame, &self.params);
        self.cortisol = cortisol_step(self.cortisol, appraisal, &self.params, self.dt)?;
        self.behavior = next_state(self.behavior, self.cortisol, &self.params)?;
        Ok(StepOutput {
            stress: appraisal.stress,
            comfort: appraisal.comfort,
            cortisol: self.cortisol,
            behavior: self.behavior,
            action: select_action(self.behavior, frame, &self.params),
        })
    }
}
