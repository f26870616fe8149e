//! Batch experiments on trajectories: limit matching, Monte-Carlo evidence
//! for the convergence scenarios, and parameter sweeps.

mod evidence;
mod sampling;
mod sweep;

pub use evidence::{
    gather_evidence, reproduce_trial, run_trials, Budgets, Counterexample, EvidenceConfig, EvidenceReport, Scenario,
    TrialOutcome, TrialRecord,
};
pub use sampling::{trial_seed, ParamBox, ParamSampler, DEFAULT_BOUNDARY_MARGIN, FIXED_POINT_EXCLUSION};
pub use sweep::{run_sweep, InitialPointSpec, ParamRange, SweepGrid, SweepRow, SweepTask};

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::fixed_points::{Face, FixedPointLabel, FixedPointRecord, FixedPointSet};
use crate::simplex::SimplexPoint;

/// Something a converged orbit can be matched against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Candidate {
    Point(FixedPointRecord),
    Face(Face),
}

impl Candidate {
    pub fn label(&self) -> FixedPointLabel {
        match self {
            Candidate::Point(r) => r.label,
            Candidate::Face(f) => FixedPointLabel::Face(*f),
        }
    }

    /// Sup-norm distance for points; largest pinned coordinate for faces.
    pub fn distance(&self, s: &SimplexPoint) -> f64 {
        match self {
            Candidate::Point(r) => r.point.distance(s),
            Candidate::Face(f) => f.pinned().iter().map(|&c| s.get(c).abs()).fold(0.0, f64::max),
        }
    }
}

/// Isolated points first, then faces.
pub fn candidates(set: &FixedPointSet) -> Vec<Candidate> {
    set.isolated.iter().map(|r| Candidate::Point(*r)).chain(set.faces.iter().map(|f| Candidate::Face(*f))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitMatch {
    pub label: FixedPointLabel,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitVerdict {
    pub matched: Option<LimitMatch>,
    pub converged: bool,
    pub steps_used: u64,
}

/// Matches the end of a converged trajectory to the nearest candidate within
/// `tol_match`. Earlier candidates win ties.
pub fn detect_limit(t: &Trajectory, candidates: &[Candidate], tol_match: f64) -> LimitVerdict {
    let converged = t.converged();
    let steps_used = t.steps_used();
    if !converged {
        return LimitVerdict { matched: None, converged, steps_used };
    }
    let last = t.last();
    let mut best: Option<LimitMatch> = None;
    for c in candidates {
        let distance = c.distance(last);
        if distance < tol_match && best.is_none_or(|b| distance < b.distance) {
            best = Some(LimitMatch { label: c.label(), distance });
        }
    }
    LimitVerdict { matched: best, converged, steps_used }
}
