use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::trial_seed;
use super::{candidates, detect_limit};
use crate::dynamics::{iterate_trajectory, TrajectoryStatus, TOL_CONV};
use crate::error::{Error, Result};
use crate::fixed_points::{enumerate_fixed_points, FixedPointSet};
use crate::params::{Params, PARAM_NAMES};
use crate::simplex::{sample_uniform, Coord};
use crate::stability::{classify_fixed_point, UNIT_CIRCLE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl ParamRange {
    fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        (0..self.steps).map(|i| self.min + span * i as f64 / (self.steps - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialPointSpec {
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTask {
    FixedPoints,
    Classify,
    Limit,
}

impl SweepTask {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "fixed_points" => Some(SweepTask::FixedPoints),
            "classify" => Some(SweepTask::Classify),
            "limit" => Some(SweepTask::Limit),
            _ => None,
        }
    }
}

/// A rectangular grid over some parameters with the rest held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(default)]
    pub ranges: BTreeMap<String, ParamRange>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    #[serde(default)]
    pub initial_points: Option<InitialPointSpec>,
    #[serde(default)]
    pub task: Option<SweepTask>,
    #[serde(default)]
    pub max_iters: Option<u64>,
    #[serde(default)]
    pub tol_conv: Option<f64>,
    #[serde(default)]
    pub tol_match: Option<f64>,
}

impl SweepGrid {
    /// Per-parameter value lists in canonical order.
    fn axes(&self) -> Result<Vec<Vec<f64>>> {
        let bad = |m: String| Error::InvalidScenarioConfig(m);
        for name in self.ranges.keys().chain(self.fixed.keys()) {
            if !PARAM_NAMES.contains(&name.as_str()) {
                return Err(bad(format!("unknown parameter `{name}`")));
            }
        }
        PARAM_NAMES
            .iter()
            .map(|&name| match (self.ranges.get(name), self.fixed.get(name)) {
                (Some(_), Some(_)) => Err(bad(format!("`{name}` is both swept and fixed"))),
                (Some(r), None) => {
                    if r.steps < 1 || !(r.min <= r.max) {
                        Err(bad(format!("range for `{name}` needs steps >= 1 and min <= max")))
                    } else {
                        Ok(r.values())
                    }
                }
                (None, Some(&v)) => Ok(vec![v]),
                (None, None) => Err(bad(format!("`{name}` is neither swept nor fixed"))),
            })
            .collect()
    }

    /// Every grid cell in row-major order, `b` varying slowest.
    pub fn cells(&self) -> Result<Vec<[f64; 6]>> {
        let axes = self.axes()?;
        let mut cells = vec![[0.0; 6]];
        for (i, axis) in axes.iter().enumerate() {
            cells = cells
                .into_iter()
                .flat_map(|c| {
                    axis.iter().map(move |&v| {
                        let mut c = c;
                        c[i] = v;
                        c
                    })
                })
                .collect();
        }
        Ok(cells)
    }
}

/// One output row. Task-irrelevant columns stay empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub cell: usize,
    pub sample: Option<usize>,
    pub params: [f64; 6],
    pub labels: String,
    /// Positive roots of the force equation.
    pub forces: Vec<f64>,
    pub residual: Option<f64>,
    pub classification: String,
    pub limit_label: String,
    pub steps: Option<u64>,
    pub error: String,
}

impl SweepRow {
    fn blank(cell: usize, params: [f64; 6]) -> Self {
        SweepRow {
            cell,
            sample: None,
            params,
            labels: String::new(),
            forces: Vec::new(),
            residual: None,
            classification: String::new(),
            limit_label: String::new(),
            steps: None,
            error: String::new(),
        }
    }
}

fn labels_of(set: &FixedPointSet) -> String {
    set.isolated.iter().map(|r| r.label.code()).chain(set.faces.iter().map(|f| f.code())).collect::<Vec<_>>().join(";")
}

/// Evaluates `task` on every cell. Per-cell failures land in the `error`
/// column; only grid misconfiguration aborts.
pub fn run_sweep(grid: &SweepGrid, task: SweepTask) -> Result<Vec<SweepRow>> {
    let cells = grid.cells()?;
    let samples = grid.initial_points.map_or(0, |s| s.count);
    if task == SweepTask::Limit && samples == 0 {
        return Err(Error::InvalidScenarioConfig("limit sweeps need a nonempty initial-point spec".into()));
    }
    let max_iters = grid.max_iters.unwrap_or(1_000_000);
    let tol_conv = grid.tol_conv.unwrap_or(TOL_CONV);
    let tol_match = grid.tol_match.unwrap_or(1e-6);
    if max_iters < 1 || !(tol_conv > 0.0) || !(tol_match > 0.0) {
        return Err(Error::InvalidScenarioConfig("budgets need max_iters >= 1 and positive tolerances".into()));
    }

    let mut rows: Vec<SweepRow> = cells
        .par_iter()
        .enumerate()
        .flat_map_iter(|(cell, values)| {
            let params = match Params::from_array(*values) {
                Ok(p) => p,
                Err(e) => {
                    let mut row = SweepRow::blank(cell, *values);
                    row.error = e.to_string();
                    return vec![row];
                }
            };
            let set = enumerate_fixed_points(&params);
            let mut base = SweepRow::blank(cell, *values);
            base.labels = labels_of(&set);
            base.forces = set.root.map(|r| r.forces()).unwrap_or_default();
            match task {
                SweepTask::FixedPoints => {
                    base.residual = set.isolated.iter().map(|r| r.fixedness_residual).reduce(f64::max);
                    vec![base]
                }
                SweepTask::Classify => {
                    let mut parts = Vec::new();
                    let mut errors = Vec::new();
                    for rec in &set.isolated {
                        match classify_fixed_point(&params, &rec.point, UNIT_CIRCLE_TOL) {
                            Ok(c) => parts.push(format!("{}:{}", rec.label.code(), c.kind.code())),
                            Err(e) => errors.push(format!("{}: {e}", rec.label.code())),
                        }
                    }
                    base.residual = set.isolated.iter().map(|r| r.fixedness_residual).reduce(f64::max);
                    base.classification = parts.join(";");
                    base.error = errors.join("; ");
                    vec![base]
                }
                SweepTask::Limit => {
                    let spec = grid.initial_points.expect("checked above");
                    let cands = candidates(&set);
                    (0..spec.count)
                        .map(|j| {
                            let mut row = base.clone();
                            row.sample = Some(j);
                            let seed = trial_seed(trial_seed(spec.seed, cell as u64), j as u64);
                            let mut rng = ChaCha8Rng::seed_from_u64(seed);
                            let s0 = sample_uniform(&mut rng, &Coord::ALL);
                            match iterate_trajectory(&params, &s0, max_iters, tol_conv) {
                                Ok(t) => {
                                    let v = detect_limit(&t, &cands, tol_match);
                                    row.steps = Some(v.steps_used);
                                    row.limit_label = match (t.status, v.matched) {
                                        (_, Some(m)) => m.label.code().to_string(),
                                        (TrajectoryStatus::Converged { .. }, None) => "unmatched".into(),
                                        (TrajectoryStatus::MaxItersReached, None) => "max_iters".into(),
                                        (TrajectoryStatus::LeftSimplex { at_step }, None) => {
                                            row.error = format!("left the simplex at step {at_step}");
                                            String::new()
                                        }
                                    };
                                }
                                Err(e) => row.error = e.to_string(),
                            }
                            row
                        })
                        .collect()
                }
            }
        })
        .collect();
    rows.sort_by_key(|r| (r.cell, r.sample));
    Ok(rows)
}
