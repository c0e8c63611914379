use hpa_sim_core::appraisal::{appraise, AppraisalResult};
use hpa_sim_core::behavior::{next_state, raw_state, HYSTERESIS_MARGIN};
use hpa_sim_core::controller::RobotController;
use hpa_sim_core::model::{default_params, BehaviorState, ProfileParams, RobotProfileKind, StimulusFrame};
use hpa_sim_core::motivation::{cortisol_step, fixed_point, run_dynamics};
use hpa_sim_core::{Error, Frame};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KINDS: [RobotProfileKind; 2] = [RobotProfileKind::Anxious, RobotProfileKind::Avoidant];
const DT: f64 = 0.1;

fn params(kind: RobotProfileKind) -> ProfileParams<f64> {
    default_params(kind)
}

fn arb_kind() -> impl Strategy<Value = RobotProfileKind> {
    prop_oneof![Just(RobotProfileKind::Anxious), Just(RobotProfileKind::Avoidant)]
}

/// Any valid frame: expressions and gaze only with a face, pressure only with taxels.
fn arb_frame() -> impl Strategy<Value = Frame> {
    (
        any::<bool>(),
        0.0..=1.0f64,
        0.0..=1.0f64,
        any::<bool>(),
        0u32..=120,
        0.0..=50.0f64,
        any::<bool>(),
    )
        .prop_map(|(face, smile, frown, gaze, taxels, pressure, frown_wins)| {
            let mut f = StimulusFrame::empty(0.0);
            if face {
                f = StimulusFrame::neutral_face(0.0, gaze);
                if frown_wins {
                    f = f.with_frown(frown);
                } else {
                    f = f.with_smile(smile);
                }
            }
            if taxels > 0 {
                f = f.with_touch(taxels, pressure);
            }
            f
        })
}

fn random_frame(rng: &mut ChaCha8Rng) -> Frame {
    let mut f = if rng.random_bool(0.9) {
        StimulusFrame::neutral_face(0.0, rng.random_bool(0.5))
    } else {
        StimulusFrame::empty(0.0)
    };
    if f.face_present {
        match rng.random_range(0..3) {
            0 => f = f.with_smile(rng.random()),
            1 => f = f.with_frown(rng.random()),
            _ => {}
        }
    }
    if rng.random_bool(0.5) {
        f = f.with_touch(rng.random_range(1..=100), rng.random_range(0.0..40.0));
    }
    f
}

#[test]
fn fuzz_keeps_cortisol_in_range() {
    for kind in KINDS {
        let p = params(kind);
        let mut rng = ChaCha8Rng::seed_from_u64(kind as u64 + 11);
        let mut c = p.c0;
        for _ in 0..10_000 {
            let frame = random_frame(&mut rng);
            c = cortisol_step(c, appraise(&frame, &p), &p, DT).unwrap();
            assert!((0.0..=p.c_max).contains(&c), "{kind}: {c}");
        }
    }
}

#[test]
fn zero_input_decay_matches_closed_form() {
    let zero = AppraisalResult {
        stress: 0.0,
        comfort: 0.0,
    };
    for kind in KINDS {
        let p = params(kind);
        for c_init in [0.0, 0.05, 0.5, 0.93, 1.0] {
            let mut c = c_init;
            for n in 1..=2000 {
                c = cortisol_step(c, zero, &p, DT).unwrap();
                let expected = p.c0 + (c_init - p.c0) * (1.0 - p.lambda * DT).powi(n);
                assert!(
                    (c - expected).abs() <= 1e-9,
                    "{kind} c_init={c_init} n={n}: {c} vs {expected}"
                );
            }
        }
    }
}

#[test]
fn baseline_is_an_exact_fixed_point() {
    let zero = AppraisalResult {
        stress: 0.0,
        comfort: 0.0,
    };
    for kind in KINDS {
        let p = params(kind);
        let mut c = p.c0;
        for _ in 0..10_000 {
            c = cortisol_step(c, zero, &p, DT).unwrap();
            assert_eq!(c, p.c0);
        }
        assert_eq!(fixed_point(zero, &p), p.c0);
    }
}

#[test]
fn non_finite_inputs_are_rejected() {
    let p = params(RobotProfileKind::Anxious);
    let bad = AppraisalResult {
        stress: f64::NAN,
        comfort: 0.0,
    };
    assert!(matches!(cortisol_step(0.2, bad, &p, DT), Err(Error::NonFiniteInput)));
    let ok = AppraisalResult {
        stress: 0.0,
        comfort: 0.0,
    };
    assert!(matches!(
        cortisol_step(f64::INFINITY, ok, &p, DT),
        Err(Error::NonFiniteInput)
    ));
}

#[test]
fn f32_and_f64_agree_on_a_session_prefix() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let frames64: Vec<Frame> = (0..600)
        .map(|i| {
            let mut f = random_frame(&mut rng);
            f.t = i as f64 / 10.0;
            f
        })
        .collect();
    let frames32: Vec<StimulusFrame<f32>> = frames64
        .iter()
        .map(|f| StimulusFrame {
            t: f.t as f32,
            face_present: f.face_present,
            smile: f.smile as f32,
            frown: f.frown as f32,
            mutual_gaze: f.mutual_gaze,
            touch_taxels: f.touch_taxels,
            touch_pressure: f.touch_pressure as f32,
        })
        .collect();
    for kind in KINDS {
        let a = run_dynamics(&frames64, &params(kind), 10).unwrap();
        let b = run_dynamics(&frames32, &default_params::<f32>(kind), 10).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - *y as f64).abs() < 1e-3);
        }
    }
}

fn anxious_ladder_oracle(c: f64) -> usize {
    [0.35, 0.7].iter().filter(|&&b| c > b).count()
}

proptest! {
    #[test]
    fn step_stays_bounded(kind in arb_kind(), c in 0.0..=1.0f64, s in 0.0..=1.0f64, k in 0.0..=1.0f64, dt in 0.001..=0.5f64) {
        let p = params(kind);
        let next = cortisol_step(c, AppraisalResult { stress: s, comfort: k }, &p, dt).unwrap();
        prop_assert!((0.0..=p.c_max).contains(&next));
    }

    #[test]
    fn more_stress_never_lowers_cortisol(kind in arb_kind(), c in 0.0..=1.0f64, s in 0.0..=1.0f64, extra in 0.0..=1.0f64, k in 0.0..=1.0f64) {
        let p = params(kind);
        let lo = cortisol_step(c, AppraisalResult { stress: s, comfort: k }, &p, DT).unwrap();
        let hi = cortisol_step(c, AppraisalResult { stress: (s + extra).min(1.0), comfort: k }, &p, DT).unwrap();
        prop_assert!(hi >= lo);
    }

    #[test]
    fn more_comfort_never_raises_cortisol(kind in arb_kind(), c in 0.0..=1.0f64, s in 0.0..=1.0f64, k in 0.0..=1.0f64, extra in 0.0..=1.0f64) {
        let p = params(kind);
        let lo = cortisol_step(c, AppraisalResult { stress: s, comfort: (k + extra).min(1.0) }, &p, DT).unwrap();
        let hi = cortisol_step(c, AppraisalResult { stress: s, comfort: k }, &p, DT).unwrap();
        prop_assert!(hi >= lo);
    }

    #[test]
    fn stress_below_gate_acts_like_none(kind in arb_kind(), c in 0.0..=1.0f64, frac in 0.0..1.0f64, k in 0.0..=1.0f64) {
        let p = params(kind);
        let s = frac * p.theta_s;
        let gated = cortisol_step(c, AppraisalResult { stress: s, comfort: k }, &p, DT).unwrap();
        let none = cortisol_step(c, AppraisalResult { stress: 0.0, comfort: k }, &p, DT).unwrap();
        prop_assert_eq!(gated, none);
    }

    #[test]
    fn appraisal_is_bounded(kind in arb_kind(), frame in arb_frame()) {
        let a = appraise(&frame, &params(kind));
        prop_assert!((0.0..=1.0).contains(&a.stress));
        prop_assert!((0.0..=1.0).contains(&a.comfort));
    }

    #[test]
    fn touch_opposes_across_profiles(gaze in any::<bool>(), smile in 0.0..=1.0f64, taxels in 1u32..=120, pressure in 1.0..=50.0f64) {
        // adding touch to an untouched frame raises avoidant stress and never lowers anxious comfort
        let frame = StimulusFrame::neutral_face(0.0, gaze).with_smile(smile);
        let touched = frame.with_touch(taxels, pressure);
        let anx = params(RobotProfileKind::Anxious);
        let avd = params(RobotProfileKind::Avoidant);
        prop_assert!(appraise(&touched, &avd).stress > appraise(&frame, &avd).stress);
        prop_assert!(appraise(&touched, &anx).comfort >= appraise(&frame, &anx).comfort);
        prop_assert!(appraise(&touched, &anx).stress <= appraise(&frame, &anx).stress);
    }

    #[test]
    fn losing_the_face_stresses_the_anxious_profile(frame in arb_frame()) {
        prop_assume!(frame.face_present);
        let mut gone = StimulusFrame::empty(frame.t);
        gone.touch_taxels = frame.touch_taxels;
        gone.touch_pressure = frame.touch_pressure;
        let anx = params(RobotProfileKind::Anxious);
        prop_assert!(appraise(&gone, &anx).stress >= appraise(&frame, &anx).stress);
    }

    #[test]
    fn controller_is_deterministic(kind in arb_kind(), frames in prop::collection::vec(arb_frame(), 1..200)) {
        let run = || {
            let mut ctl = RobotController::new(params(kind), 10).unwrap();
            frames.iter().map(|f| ctl.step(f).unwrap()).collect::<Vec<_>>()
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn hysteresis_state_tracks_the_raw_ladder(levels in prop::collection::vec(0.0..=1.0f64, 1..300)) {
        let p = params(RobotProfileKind::Anxious);
        let mut state = BehaviorState::Content;
        let ladder = [BehaviorState::Content, BehaviorState::SeekingContact, BehaviorState::Distressed];
        for c in levels {
            let prev = ladder.iter().position(|&s| s == state).unwrap();
            state = next_state(state, c, &p).unwrap();
            let k = ladder.iter().position(|&s| s == state).unwrap();
            // never more than one margin away from where the raw ladder puts it
            let raw = anxious_ladder_oracle(c);
            let raw_dn = anxious_ladder_oracle(c - HYSTERESIS_MARGIN);
            let raw_up = anxious_ladder_oracle(c + HYSTERESIS_MARGIN);
            prop_assert!(k >= raw_dn.min(raw) && k <= raw_up.max(raw), "c={} prev={} k={}", c, prev, k);
            prop_assert_eq!(raw_state(c, RobotProfileKind::Anxious), ladder[raw]);
        }
    }
}

#[test]
fn hysteresis_suppresses_chatter() {
    for kind in KINDS {
        let p = params(kind);
        let boundary = if kind == RobotProfileKind::Anxious { 0.35 } else { 0.5 };
        let mut state = BehaviorState::Content;
        let mut changes = 0;
        for i in 0..1000 {
            let c = boundary + if i % 2 == 0 { 0.04 } else { -0.04 };
            let next = next_state(state, c, &p).unwrap();
            changes += usize::from(next != state);
            state = next;
        }
        assert_eq!(changes, 0, "{kind}");
        let up = next_state(state, boundary + 0.06, &p).unwrap();
        assert_ne!(up, BehaviorState::Content);
        assert_eq!(next_state(up, boundary - 0.04, &p).unwrap(), up);
        assert_eq!(next_state(up, boundary - 0.06, &p).unwrap(), BehaviorState::Content);
    }
}
