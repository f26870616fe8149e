use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{
    trial_seed, ParamBox, ParamSampler, DEFAULT_BOUNDARY_MARGIN, FIXED_POINT_EXCLUSION, MAX_REJECTIONS,
};
use super::{candidates, detect_limit, Candidate, LimitVerdict};
use crate::dynamics::{iterate_trajectory, TrajectoryStatus, TOL_CONV};
use crate::error::{Error, Result};
use crate::fixed_points::{build_lambda16, enumerate_fixed_points, FixedPointLabel};
use crate::params::Params;
use crate::simplex::{sample_uniform, Coord, SimplexPoint};

/// Radius of the neighbourhood of `λ16` used for local-basin starts.
pub const LOCAL_BASIN_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// β2 = 0: orbits go to λ1 below threshold, to λ16 above it.
    Conjecture1,
    /// α·b·β1·β2·k1 > 0: orbits go to λ1 below threshold, to λ17 above it.
    Conjecture2,
    /// k2 = 0 with u⁰ = 0 or β1·k1 ≤ b + α: orbits go to λ1.
    Theorem3,
    /// β2 = 0 above threshold, starting within [`LOCAL_BASIN_RADIUS`] of λ16.
    Theorem2Local,
}

impl Scenario {
    pub const ALL: [Scenario; 4] =
        [Scenario::Conjecture1, Scenario::Conjecture2, Scenario::Theorem3, Scenario::Theorem2Local];

    /// Refutations of proved statements indicate bugs rather than findings.
    pub fn theorem_backed(self) -> bool {
        matches!(self, Scenario::Theorem3 | Scenario::Theorem2Local)
    }

    pub fn code(self) -> &'static str {
        match self {
            Scenario::Conjecture1 => "conjecture1",
            Scenario::Conjecture2 => "conjecture2",
            Scenario::Theorem3 => "theorem3",
            Scenario::Theorem2Local => "theorem2-local",
        }
    }

    pub fn parse(s: &str) -> Option<Scenario> {
        let norm = s.to_ascii_lowercase().replace(['_', ' '], "-");
        Scenario::ALL.into_iter().find(|sc| sc.code() == norm || sc.code().replace('-', "") == norm.replace('-', ""))
    }

    pub fn default_box(self) -> ParamBox {
        let ranges = match self {
            Scenario::Conjecture1 => [(0.01, 0.5), (0.01, 0.5), (0.0, 1.0), (0.0, 0.0), (0.0, 2.0), (0.0, 2.0)],
            Scenario::Conjecture2 => [(0.01, 0.5), (0.01, 0.5), (0.01, 1.0), (0.01, 1.0), (0.01, 2.0), (0.0, 2.0)],
            Scenario::Theorem3 => [(0.01, 0.5), (0.01, 0.5), (0.0, 1.0), (0.0, 1.0), (0.0, 2.0), (0.0, 0.0)],
            Scenario::Theorem2Local => [(0.05, 0.5), (0.01, 0.5), (0.0, 1.0), (0.0, 0.0), (0.0, 2.0), (0.0, 2.0)],
        };
        ParamBox { ranges }
    }

    pub fn default_budgets(self) -> Budgets {
        match self {
            Scenario::Theorem2Local => Budgets { max_iters: 1_000_000, tol_conv: 1e-12, tol_match: 1e-8 },
            _ => Budgets { max_iters: 1_000_000, tol_conv: TOL_CONV, tol_match: 1e-6 },
        }
    }

    /// Side conditions every parameter set must satisfy, independent of branch.
    fn admits(self, p: &Params) -> bool {
        let positive_rates = p.b > 0.0 && p.alpha > 0.0;
        match self {
            Scenario::Conjecture1 | Scenario::Theorem2Local => positive_rates && p.beta2 == 0.0,
            Scenario::Conjecture2 => positive_rates && p.beta1 > 0.0 && p.beta2 > 0.0 && p.k1 > 0.0,
            Scenario::Theorem3 => positive_rates && p.k2 == 0.0,
        }
    }

    fn check_box(self, bounds: &ParamBox) -> Result<()> {
        bounds.check()?;
        let contradiction = |what: &str| Err(Error::InvalidScenarioConfig(format!("{}: {what}", self.code())));
        if bounds.pins_zero(0) || bounds.pins_zero(1) {
            return contradiction("b and alpha must be allowed to be positive");
        }
        match self {
            Scenario::Conjecture1 | Scenario::Theorem2Local if !bounds.pins_zero(3) => {
                contradiction("beta2 must be fixed at 0")
            }
            Scenario::Theorem3 if !bounds.pins_zero(5) => contradiction("k2 must be fixed at 0"),
            Scenario::Conjecture2 if [2, 3, 4].iter().any(|&i| bounds.pins_zero(i)) => {
                contradiction("beta1, beta2 and k1 must be allowed to be positive")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub max_iters: u64,
    pub tol_conv: f64,
    pub tol_match: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidenceConfig {
    pub scenario: Scenario,
    pub sampler: ParamSampler,
    pub n_trials: u64,
    pub budgets: Budgets,
    pub seed: u64,
    /// Minimum `|β1·k1 − (b+α)|` for box-sampled parameters.
    pub boundary_margin: f64,
}

impl EvidenceConfig {
    pub fn new(scenario: Scenario, n_trials: u64, seed: u64) -> Self {
        EvidenceConfig {
            scenario,
            sampler: ParamSampler::Box { bounds: scenario.default_box() },
            n_trials,
            budgets: scenario.default_budgets(),
            seed,
            boundary_margin: DEFAULT_BOUNDARY_MARGIN,
        }
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.sampler = ParamSampler::Fixed { params };
        self
    }

    fn check(&self) -> Result<()> {
        let Budgets { max_iters, tol_conv, tol_match } = self.budgets;
        if max_iters < 1 || !(tol_conv > 0.0) || !(tol_match > 0.0) {
            return Err(Error::InvalidScenarioConfig("budgets need max_iters >= 1 and positive tolerances".into()));
        }
        if !(self.boundary_margin >= 0.0) {
            return Err(Error::InvalidScenarioConfig("boundary margin must be nonnegative".into()));
        }
        match &self.sampler {
            ParamSampler::Box { bounds } => self.scenario.check_box(bounds),
            ParamSampler::Fixed { params } => {
                if self.scenario == Scenario::Theorem2Local && params.threshold_gap() <= 0.0 {
                    return Err(Error::InvalidScenarioConfig("theorem2-local needs beta1*k1 > b + alpha".into()));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Confirmed,
    Refuted,
    Inconclusive,
}

/// Everything needed to rerun one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub seed: u64,
    pub params: Params,
    pub initial: SimplexPoint,
    pub final_state: SimplexPoint,
    pub status: TrajectoryStatus,
    pub predicted: Option<FixedPointLabel>,
    pub verdict: LimitVerdict,
    pub outcome: TrialOutcome,
}

pub type Counterexample = TrialRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub trials: u64,
    pub confirmed: u64,
    pub refuted: Vec<Counterexample>,
    pub inconclusive: u64,
    pub theorem_backed: bool,
    pub budgets: Budgets,
    pub sampler: ParamSampler,
    pub boundary_margin: f64,
}

impl EvidenceReport {
    pub fn from_records(config: &EvidenceConfig, records: &[TrialRecord]) -> Self {
        let count = |o: TrialOutcome| records.iter().filter(|r| r.outcome == o).count() as u64;
        EvidenceReport {
            scenario: config.scenario,
            seed: config.seed,
            trials: records.len() as u64,
            confirmed: count(TrialOutcome::Confirmed),
            refuted: records.iter().filter(|r| r.outcome == TrialOutcome::Refuted).copied().collect(),
            inconclusive: count(TrialOutcome::Inconclusive),
            theorem_backed: config.scenario.theorem_backed(),
            budgets: config.budgets,
            sampler: config.sampler,
            boundary_margin: config.boundary_margin,
        }
    }

    pub fn is_conserved(&self) -> bool {
        self.trials == self.confirmed + self.refuted.len() as u64 + self.inconclusive
    }
}

/// Runs every trial of `config` and tallies the outcomes.
pub fn gather_evidence(config: &EvidenceConfig) -> Result<EvidenceReport> {
    let records = run_trials(config)?;
    Ok(EvidenceReport::from_records(config, &records))
}

/// Per-trial records in index order.
pub fn run_trials(config: &EvidenceConfig) -> Result<Vec<TrialRecord>> {
    config.check()?;
    (0..config.n_trials).into_par_iter().map(|i| run_trial(config, i, trial_seed(config.seed, i))).collect()
}

/// Reruns the trial described by `record` from its stored index and seed.
pub fn reproduce_trial(config: &EvidenceConfig, record: &TrialRecord) -> Result<TrialRecord> {
    run_trial(config, record.index, record.seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Below,
    Above,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Start {
    Interior,
    /// u = 0
    NoFirstInfection,
    /// u = v = 0
    InfectionFree,
    NearLambda16,
}

fn plan(scenario: Scenario, sampler: &ParamSampler, index: u64) -> (Branch, Start) {
    let even = index.is_multiple_of(2);
    let fixed = matches!(sampler, ParamSampler::Fixed { .. });
    match scenario {
        Scenario::Conjecture1 => (
            if fixed {
                Branch::Any
            } else if even {
                Branch::Below
            } else {
                Branch::Above
            },
            Start::Interior,
        ),
        Scenario::Conjecture2 => {
            let branch = if fixed {
                Branch::Any
            } else if even {
                Branch::Below
            } else {
                Branch::Above
            };
            let start = if index % 4 == 3 { Start::InfectionFree } else { Start::Interior };
            (branch, start)
        }
        Scenario::Theorem3 => {
            if even {
                (Branch::Below, Start::Interior)
            } else {
                (Branch::Any, Start::NoFirstInfection)
            }
        }
        Scenario::Theorem2Local => (Branch::Above, Start::NearLambda16),
    }
}

fn run_trial(config: &EvidenceConfig, index: u64, seed: u64) -> Result<TrialRecord> {
    let scenario = config.scenario;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut branch, mut start) = plan(scenario, &config.sampler, index);

    // fixed parameters below threshold admit every start for the k2 = 0 scenario;
    // above threshold only u⁰ = 0 is covered
    if let (Scenario::Theorem3, ParamSampler::Fixed { params }) = (scenario, &config.sampler) {
        if params.threshold_gap() > 0.0 {
            branch = Branch::Any;
            start = Start::NoFirstInfection;
        }
    }

    let margin = match config.sampler {
        ParamSampler::Fixed { .. } => 0.0,
        ParamSampler::Box { .. } => config.boundary_margin,
    };
    let params = config.sampler.draw(&mut rng, |p| {
        scenario.admits(p)
            && match branch {
                Branch::Below => p.threshold_gap() <= -margin,
                Branch::Above => p.threshold_gap() >= margin.max(f64::MIN_POSITIVE),
                Branch::Any => margin == 0.0 || p.threshold_gap().abs() >= margin,
            }
    })?;

    let fixed_set = enumerate_fixed_points(&params);
    let cands = candidates(&fixed_set);
    let initial = draw_start(&mut rng, &params, start, &cands)?;
    let predicted = predict(scenario, &params, &initial);

    let Budgets { max_iters, tol_conv, tol_match } = config.budgets;
    let trajectory = iterate_trajectory(&params, &initial, max_iters, tol_conv)?;
    let verdict = detect_limit(&trajectory, &cands, tol_match);
    let outcome = match (trajectory.status, predicted) {
        (TrajectoryStatus::MaxItersReached, _) | (_, None) => TrialOutcome::Inconclusive,
        (TrajectoryStatus::Converged { .. }, Some(label)) if verdict.matched.map(|m| m.label) == Some(label) => {
            TrialOutcome::Confirmed
        }
        _ => TrialOutcome::Refuted,
    };
    Ok(TrialRecord {
        index,
        seed,
        params,
        initial,
        final_state: *trajectory.last(),
        status: trajectory.status,
        predicted,
        verdict,
        outcome,
    })
}

fn draw_start(rng: &mut ChaCha8Rng, p: &Params, start: Start, cands: &[Candidate]) -> Result<SimplexPoint> {
    use Coord::*;
    let lambda16 = match start {
        Start::NearLambda16 => Some(build_lambda16(p)?),
        _ => None,
    };
    for _ in 0..MAX_REJECTIONS {
        let s = match start {
            Start::Interior => sample_uniform(rng, &[X, U, Y, V]),
            Start::NoFirstInfection => sample_uniform(rng, &[X, Y, V]),
            Start::InfectionFree => sample_uniform(rng, &[X, Y]),
            Start::NearLambda16 => {
                // convex combination keeps the start on the simplex
                let centre = lambda16.expect("built above");
                let q = sample_uniform(rng, &[X, U, Y, V]);
                let mut c = [0.0; 4];
                for (i, slot) in c.iter_mut().enumerate() {
                    *slot = centre.as_array()[i] + LOCAL_BASIN_RADIUS * (q.as_array()[i] - centre.as_array()[i]);
                }
                SimplexPoint::from_array(c)?
            }
        };
        if cands.iter().all(|c| c.distance(&s) >= FIXED_POINT_EXCLUSION) {
            return Ok(s);
        }
    }
    Err(Error::InvalidScenarioConfig("could not draw a start away from the fixed points".into()))
}

/// The limit the scenario's statement predicts for this start, if any.
fn predict(scenario: Scenario, p: &Params, s: &SimplexPoint) -> Option<FixedPointLabel> {
    let below = p.threshold_gap() <= 0.0;
    let infected = s.u() + s.v() > 0.0;
    match scenario {
        Scenario::Conjecture1 if below => Some(FixedPointLabel::Lambda1),
        Scenario::Conjecture1 if infected => Some(FixedPointLabel::Lambda16),
        Scenario::Conjecture1 => None,
        Scenario::Conjecture2 if below || !infected => Some(FixedPointLabel::Lambda1),
        Scenario::Conjecture2 => Some(FixedPointLabel::Lambda17),
        Scenario::Theorem3 if below || s.u() == 0.0 => Some(FixedPointLabel::Lambda1),
        Scenario::Theorem3 => None,
        Scenario::Theorem2Local => Some(FixedPointLabel::Lambda16),
    }
}
