//! Action-selection state machine.
//!
//! Each profile climbs a ladder of behavioral states as cortisol rises:
//! anxious robots go Content -> SeekingContact -> Distressed, avoidant robots
//! go Content -> Withdrawn. Moving across a boundary in either direction
//! requires overshooting it by [`HYSTERESIS_MARGIN`].

use crate::error::{Error, Result};
use crate::model::{BehaviorState, ProfileParams, RobotAction, RobotProfileKind, StimulusFrame};
use crate::scalar::Scalar;

pub const HYSTERESIS_MARGIN: f64 = 0.05;

const ANXIOUS_LADDER: [BehaviorState; 3] = [
    BehaviorState::Content,
    BehaviorState::SeekingContact,
    BehaviorState::Distressed,
];
const ANXIOUS_BOUNDS: [f64; 2] = [0.35, 0.7];
const AVOIDANT_LADDER: [BehaviorState; 2] = [BehaviorState::Content, BehaviorState::Withdrawn];
const AVOIDANT_BOUNDS: [f64; 1] = [0.5];

fn ladder(kind: RobotProfileKind) -> (&'static [BehaviorState], &'static [f64]) {
    match kind {
        RobotProfileKind::Anxious => (&ANXIOUS_LADDER, &ANXIOUS_BOUNDS),
        RobotProfileKind::Avoidant => (&AVOIDANT_LADDER, &AVOIDANT_BOUNDS),
    }
}

/// State the robot would be in at level `c` ignoring hysteresis.
pub fn raw_state<T: Scalar>(c: T, kind: RobotProfileKind) -> BehaviorState {
    let (states, bounds) = ladder(kind);
    let k = bounds.iter().take_while(|&&b| c > T::lit(b)).count();
    states[k]
}

pub fn next_state<T: Scalar>(current: BehaviorState, c: T, params: &ProfileParams<T>) -> Result<BehaviorState> {
    let (states, bounds) = ladder(params.kind);
    let mut k = states
        .iter()
        .position(|&s| s == current)
        .ok_or(Error::ProfileStateMismatch {
            state: current,
            kind: params.kind,
        })?;
    let margin = T::lit(HYSTERESIS_MARGIN);
    while k < bounds.len() && c - T::lit(bounds[k]) >= margin {
        k += 1;
    }
    while k > 0 && T::lit(bounds[k - 1]) - c >= margin {
        k -= 1;
    }
    Ok(states[k])
}

pub fn select_action<T: Scalar>(
    state: BehaviorState,
    frame: &StimulusFrame<T>,
    params: &ProfileParams<T>,
) -> RobotAction {
    debug_assert!(state.reachable_for(params.kind));
    match state {
        BehaviorState::Content if frame.is_smiling() => RobotAction::SmileExpression,
        BehaviorState::Content if frame.face_present => RobotAction::TurnTorso,
        BehaviorState::Content => RobotAction::Idle,
        BehaviorState::SeekingContact if frame.face_present => RobotAction::StretchArms,
        BehaviorState::SeekingContact | BehaviorState::Distressed => RobotAction::VocalCall,
        BehaviorState::Withdrawn if frame.touch_present() => RobotAction::PullAway,
        BehaviorState::Withdrawn => RobotAction::LookAway,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_params;
    use BehaviorState::*;

    fn anx() -> ProfileParams<f64> {
        default_params(RobotProfileKind::Anxious)
    }

    fn avd() -> ProfileParams<f64> {
        default_params(RobotProfileKind::Avoidant)
    }

    #[test]
    fn transitions_from_content() {
        assert_eq!(next_state(Content, 0.2, &anx()).unwrap(), Content);
        assert_eq!(next_state(Content, 0.6, &anx()).unwrap(), SeekingContact);
        assert_eq!(next_state(Content, 0.6, &avd()).unwrap(), Withdrawn);
        assert_eq!(next_state(Content, 0.9, &anx()).unwrap(), Distressed);
    }

    #[test]
    fn hysteresis_holds_state_near_boundary() {
        // just above the raw boundary, not past the margin
        assert_eq!(next_state(Content, 0.38, &anx()).unwrap(), Content);
        assert_eq!(raw_state(0.38, RobotProfileKind::Anxious), SeekingContact);
        assert_eq!(next_state(Withdrawn, 0.47, &avd()).unwrap(), Withdrawn);
        assert_eq!(next_state(Withdrawn, 0.44, &avd()).unwrap(), Content);
        assert_eq!(next_state(Distressed, 0.66, &anx()).unwrap(), Distressed);
        assert_eq!(next_state(Distressed, 0.5, &anx()).unwrap(), SeekingContact);
        assert_eq!(next_state(Distressed, 0.1, &anx()).unwrap(), Content);
    }

    #[test]
    fn unreachable_state_is_an_error() {
        assert!(matches!(
            next_state(Withdrawn, 0.2, &anx()),
            Err(Error::ProfileStateMismatch {
                state: Withdrawn,
                kind: RobotProfileKind::Anxious
            })
        ));
        assert!(next_state(SeekingContact, 0.2, &avd()).is_err());
        assert!(next_state(Distressed, 0.2, &avd()).is_err());
    }

    #[test]
    fn action_table() {
        let face = StimulusFrame::neutral_face(0.0, true);
        let nobody = StimulusFrame::<f64>::empty(0.0);
        let smiling = face.with_smile(1.0);
        let touched = face.with_touch(60, 25.0);
        assert_eq!(select_action(SeekingContact, &face, &anx()), RobotAction::StretchArms);
        assert_eq!(select_action(SeekingContact, &nobody, &anx()), RobotAction::VocalCall);
        assert_eq!(select_action(Distressed, &face, &anx()), RobotAction::VocalCall);
        assert_eq!(select_action(Withdrawn, &face, &avd()), RobotAction::LookAway);
        assert_eq!(select_action(Withdrawn, &touched, &avd()), RobotAction::PullAway);
        assert_eq!(select_action(Content, &nobody, &anx()), RobotAction::Idle);
        assert_eq!(select_action(Content, &nobody, &avd()), RobotAction::Idle);
        assert_eq!(select_action(Content, &face, &avd()), RobotAction::TurnTorso);
        assert_eq!(select_action(Content, &smiling, &anx()), RobotAction::SmileExpression);
    }
}
