//! Session statistics: phase means, engagement, interactivity, over-threshold
//! time and the match/mismatch comparison between robot profile and
//! interaction style.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ParadigmKind, Phase, ProfileParams, RobotProfileKind, SessionTrace};
use crate::scalar::Scalar;
pub use crate::stats::{wilcoxon_signed_rank, WilcoxonResult};

/// Sessions whose touch + smile percentages exceed this are interactive.
pub const INTERACTIVE_THRESHOLD_PCT: f64 = 35.0;

fn mean<T: Scalar>(values: impl Iterator<Item = T>) -> Option<T> {
    let (sum, n) = values.fold((T::zero(), 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / T::from_count(n))
}

fn percent<T: Scalar>(hits: usize, total: usize) -> T {
    if total == 0 {
        return T::zero();
    }
    T::lit(100.0) * T::from_count(hits) / T::from_count(total)
}

/// Mean cortisol of each phase.
pub fn phase_means<T: Scalar>(trace: &SessionTrace<T>) -> Result<BTreeMap<Phase, T>> {
    Phase::ALL
        .into_iter()
        .map(|phase| {
            mean(trace.records.iter().filter(|r| r.phase == phase).map(|r| r.cortisol))
                .map(|m| (phase, m))
                .ok_or(Error::EmptyPhase(phase))
        })
        .collect()
}

/// Mean cortisol over the whole session.
pub fn session_mean<T: Scalar>(trace: &SessionTrace<T>) -> Result<T> {
    mean(trace.records.iter().map(|r| r.cortisol)).ok_or_else(|| Error::schema(None, "no records"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Engagement<T> {
    pub percent_touch: T,
    pub percent_smile: T,
    pub interactive: bool,
}

pub fn is_interactive<T: Scalar>(percent_touch: T, percent_smile: T) -> bool {
    percent_touch + percent_smile > T::lit(INTERACTIVE_THRESHOLD_PCT)
}

pub fn engagement<T: Scalar>(trace: &SessionTrace<T>) -> Engagement<T> {
    let n = trace.records.len();
    let touch = trace.records.iter().filter(|r| r.frame.touch_present()).count();
    let smile = trace.records.iter().filter(|r| r.frame.is_smiling()).count();
    let percent_touch = percent(touch, n);
    let percent_smile = percent(smile, n);
    Engagement {
        percent_touch,
        percent_smile,
        interactive: is_interactive(percent_touch, percent_smile),
    }
}

/// Percentage of records whose cortisol lies strictly above `c_max / 2`.
pub fn over_threshold_pct<T: Scalar>(trace: &SessionTrace<T>, params: &ProfileParams<T>) -> T {
    let threshold = params.analysis_threshold();
    let over = trace.records.iter().filter(|r| r.cortisol > threshold).count();
    percent(over, trace.records.len())
}

/// An anxious robot matches an interactive partner, an avoidant robot a
/// non-interactive one.
pub fn match_label(profile: RobotProfileKind, interactive: bool) -> bool {
    match profile {
        RobotProfileKind::Anxious => interactive,
        RobotProfileKind::Avoidant => !interactive,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionMetrics<T> {
    pub percent_touch: T,
    pub percent_smile: T,
    pub interactive: bool,
    pub phase_means: BTreeMap<Phase, T>,
    pub session_mean: T,
    pub over_threshold_pct: T,
    #[serde(rename = "match")]
    pub is_match: bool,
}

impl<T: Scalar> InteractionMetrics<T> {
    pub fn from_trace(trace: &SessionTrace<T>) -> Result<Self> {
        let params = &trace.config.robot_profile;
        let e = engagement(trace);
        Ok(InteractionMetrics {
            percent_touch: e.percent_touch,
            percent_smile: e.percent_smile,
            interactive: e.interactive,
            phase_means: phase_means(trace)?,
            session_mean: session_mean(trace)?,
            over_threshold_pct: over_threshold_pct(trace, params),
            is_match: match_label(params.kind, e.interactive),
        })
    }
}

/// A trace tagged with the stimulus set it was produced from.
#[derive(Debug, Clone, Copy)]
pub struct LabeledTrace<'a, T> {
    pub set_id: &'a str,
    pub trace: &'a SessionTrace<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow<T> {
    pub set_id: String,
    pub paradigm: ParadigmKind,
    pub profile: RobotProfileKind,
    pub percent_touch: T,
    pub percent_smile: T,
    pub interactive: bool,
    #[serde(rename = "match")]
    pub is_match: bool,
    pub over_threshold_pct: T,
    pub session_mean: T,
    /// Absent when the trace does not cover every phase.
    pub phase_means: Option<BTreeMap<Phase, T>>,
}

/// Over-threshold percentages of the two profiles on one stimulus set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetPair<T> {
    pub set_id: String,
    pub paradigm: ParadigmKind,
    pub interactive: bool,
    pub match_profile: RobotProfileKind,
    pub match_pct: T,
    pub mismatch_pct: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupMeans<T> {
    pub n_sets: usize,
    pub match_mean_pct: T,
    pub mismatch_mean_pct: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchMismatchReport<T> {
    pub rows: Vec<ReportRow<T>>,
    pub pairs: Vec<SetPair<T>>,
    pub overall: GroupMeans<T>,
    pub by_paradigm: BTreeMap<ParadigmKind, GroupMeans<T>>,
    /// Signed-rank test on (mismatch, match) over all pairs.
    pub wilcoxon: WilcoxonResult<T>,
    /// Per-paradigm tests; `None` when a paradigm's differences are all zero.
    pub wilcoxon_by_paradigm: BTreeMap<ParadigmKind, Option<WilcoxonResult<T>>>,
}

fn group_means<'a, T: Scalar>(pairs: impl Iterator<Item = &'a SetPair<T>>) -> GroupMeans<T> {
    let pairs: Vec<_> = pairs.collect();
    GroupMeans {
        n_sets: pairs.len(),
        match_mean_pct: mean(pairs.iter().map(|p| p.match_pct)).unwrap_or_else(T::zero),
        mismatch_mean_pct: mean(pairs.iter().map(|p| p.mismatch_pct)).unwrap_or_else(T::zero),
    }
}

fn report_row<T: Scalar>(set_id: &str, trace: &SessionTrace<T>) -> Result<ReportRow<T>> {
    let params = &trace.config.robot_profile;
    let e = engagement(trace);
    Ok(ReportRow {
        set_id: set_id.to_string(),
        paradigm: trace.config.paradigm,
        profile: params.kind,
        percent_touch: e.percent_touch,
        percent_smile: e.percent_smile,
        interactive: e.interactive,
        is_match: match_label(params.kind, e.interactive),
        over_threshold_pct: over_threshold_pct(trace, params),
        session_mean: session_mean(trace)?,
        phase_means: phase_means(trace).ok(),
    })
}

/// Compares over-threshold time between matched and mismatched couplings.
/// Every stimulus set must appear exactly once per robot profile, with both
/// traces driven by the same frames.
pub fn match_mismatch_report<T: Scalar>(traces: &[LabeledTrace<'_, T>]) -> Result<MatchMismatchReport<T>> {
    let mut sets: Vec<(&str, [Option<&SessionTrace<T>>; 2])> = Vec::new();
    for lt in traces {
        let slot = lt.trace.config.robot_profile.kind as usize;
        let entry = match sets.iter_mut().position(|(id, _)| *id == lt.set_id) {
            Some(k) => &mut sets[k].1,
            None => {
                sets.push((lt.set_id, [None, None]));
                &mut sets.last_mut().expect("just pushed").1
            }
        };
        if entry[slot].replace(lt.trace).is_some() {
            return Err(Error::InvalidInput(format!(
                "stimulus set {} has two {} traces",
                lt.set_id, lt.trace.config.robot_profile.kind
            )));
        }
    }

    let mut rows = Vec::with_capacity(traces.len());
    let mut pairs = Vec::with_capacity(sets.len());
    for (set_id, slots) in &sets {
        let [Some(anxious), Some(avoidant)] = *slots else {
            return Err(Error::InvalidInput(format!(
                "stimulus set {set_id} lacks one of the two profiles"
            )));
        };
        if anxious.frames() != avoidant.frames() || anxious.config.paradigm != avoidant.config.paradigm {
            return Err(Error::InvalidInput(format!(
                "stimulus set {set_id} traces were driven by different stimuli"
            )));
        }
        let anx_row = report_row(set_id, anxious)?;
        let avd_row = report_row(set_id, avoidant)?;
        let (matched, mismatched) = if anx_row.is_match {
            (&anx_row, &avd_row)
        } else {
            (&avd_row, &anx_row)
        };
        pairs.push(SetPair {
            set_id: set_id.to_string(),
            paradigm: anx_row.paradigm,
            interactive: anx_row.interactive,
            match_profile: matched.profile,
            match_pct: matched.over_threshold_pct,
            mismatch_pct: mismatched.over_threshold_pct,
        });
        rows.push(anx_row);
        rows.push(avd_row);
    }

    let test_pairs = |paradigm: Option<ParadigmKind>| -> Vec<(T, T)> {
        pairs
            .iter()
            .filter(|p| paradigm.is_none_or(|k| p.paradigm == k))
            .map(|p| (p.mismatch_pct, p.match_pct))
            .collect()
    };
    let wilcoxon = wilcoxon_signed_rank(&test_pairs(None))?;
    let mut by_paradigm = BTreeMap::new();
    let mut wilcoxon_by_paradigm = BTreeMap::new();
    for kind in ParadigmKind::ALL {
        if pairs.iter().any(|p| p.paradigm == kind) {
            by_paradigm.insert(kind, group_means(pairs.iter().filter(|p| p.paradigm == kind)));
            wilcoxon_by_paradigm.insert(kind, wilcoxon_signed_rank(&test_pairs(Some(kind))).ok());
        }
    }

    Ok(MatchMismatchReport {
        overall: group_means(pairs.iter()),
        rows,
        pairs,
        by_paradigm,
        wilcoxon,
        wilcoxon_by_paradigm,
    })
}
