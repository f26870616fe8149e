//! Model parameters and the quadratic-stochastic-operator admissibility check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The six nonnegative rates of the discrete SISI operator.
///
/// Construction only enforces nonnegativity. Whether the operator maps the
/// simplex into itself is a separate question answered by [`validate_params`],
/// so out-of-range sets stay representable for boundary sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct Params {
    pub(crate) b: f64,
    pub(crate) alpha: f64,
    pub(crate) beta1: f64,
    pub(crate) beta2: f64,
    pub(crate) k1: f64,
    pub(crate) k2: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    b: f64,
    alpha: f64,
    beta1: f64,
    beta2: f64,
    k1: f64,
    k2: f64,
}

impl TryFrom<RawParams> for Params {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        Params::new(r.b, r.alpha, r.beta1, r.beta2, r.k1, r.k2)
    }
}

impl From<Params> for RawParams {
    fn from(p: Params) -> Self {
        RawParams { b: p.b, alpha: p.alpha, beta1: p.beta1, beta2: p.beta2, k1: p.k1, k2: p.k2 }
    }
}

/// Parameter names in canonical column order.
pub const PARAM_NAMES: [&str; 6] = ["b", "alpha", "beta1", "beta2", "k1", "k2"];

impl Params {
    pub fn new(b: f64, alpha: f64, beta1: f64, beta2: f64, k1: f64, k2: f64) -> Result<Self> {
        Self::from_array([b, alpha, beta1, beta2, k1, k2])
    }

    /// Builds from `[b, alpha, beta1, beta2, k1, k2]`.
    pub fn from_array(values: [f64; 6]) -> Result<Self> {
        for (name, &value) in PARAM_NAMES.iter().zip(values.iter()) {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        let [b, alpha, beta1, beta2, k1, k2] = values;
        Ok(Params { b, alpha, beta1, beta2, k1, k2 })
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.b, self.alpha, self.beta1, self.beta2, self.k1, self.k2]
    }

    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta1(&self) -> f64 {
        self.beta1
    }
    pub fn beta2(&self) -> f64 {
        self.beta2
    }
    pub fn k1(&self) -> f64 {
        self.k1
    }
    pub fn k2(&self) -> f64 {
        self.k2
    }

    /// Returns a copy with one parameter replaced (by canonical index).
    pub fn with(&self, index: usize, value: f64) -> Result<Self> {
        let mut a = self.to_array();
        a[index] = value;
        Self::from_array(a)
    }

    /// `β1·k1 − (b + α)`, the sign that drives most of the case analysis.
    pub fn threshold_gap(&self) -> f64 {
        self.beta1 * self.k1 - (self.b + self.alpha)
    }
}

/// The nine admissibility inequalities, in reading order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// α + b ≤ 1
    AlphaPlusB,
    /// β1·k2 ≤ 2
    Beta1K2,
    /// β2·k1 ≤ 2
    Beta2K1,
    /// b + β2·k2 ≤ 1
    BPlusBeta2K2,
    /// |b − β1·k1| ≤ 1
    BMinusBeta1K1,
    /// |b − β2·k2| ≤ 1
    BMinusBeta2K2,
    /// |b − β1·k2| ≤ 1
    BMinusBeta1K2,
    /// |α + b − β1·k1| ≤ 1
    AlphaPlusBMinusBeta1K1,
    /// |α − b − β2·k1| ≤ 1
    AlphaMinusBMinusBeta2K1,
}

impl Condition {
    pub const ALL: [Condition; 9] = [
        Condition::AlphaPlusB,
        Condition::Beta1K2,
        Condition::Beta2K1,
        Condition::BPlusBeta2K2,
        Condition::BMinusBeta1K1,
        Condition::BMinusBeta2K2,
        Condition::BMinusBeta1K2,
        Condition::AlphaPlusBMinusBeta1K1,
        Condition::AlphaMinusBMinusBeta2K1,
    ];

    /// Left-hand side value and upper bound.
    pub fn evaluate(self, p: &Params) -> (f64, f64) {
        let Params { b, alpha, beta1, beta2, k1, k2 } = *p;
        match self {
            Condition::AlphaPlusB => (alpha + b, 1.0),
            Condition::Beta1K2 => (beta1 * k2, 2.0),
            Condition::Beta2K1 => (beta2 * k1, 2.0),
            Condition::BPlusBeta2K2 => (b + beta2 * k2, 1.0),
            Condition::BMinusBeta1K1 => ((b - beta1 * k1).abs(), 1.0),
            Condition::BMinusBeta2K2 => ((b - beta2 * k2).abs(), 1.0),
            Condition::BMinusBeta1K2 => ((b - beta1 * k2).abs(), 1.0),
            Condition::AlphaPlusBMinusBeta1K1 => ((alpha + b - beta1 * k1).abs(), 1.0),
            Condition::AlphaMinusBMinusBeta2K1 => ((alpha - b - beta2 * k1).abs(), 1.0),
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Condition::AlphaPlusB => "alpha + b <= 1",
            Condition::Beta1K2 => "beta1*k2 <= 2",
            Condition::Beta2K1 => "beta2*k1 <= 2",
            Condition::BPlusBeta2K2 => "b + beta2*k2 <= 1",
            Condition::BMinusBeta1K1 => "|b - beta1*k1| <= 1",
            Condition::BMinusBeta2K2 => "|b - beta2*k2| <= 1",
            Condition::BMinusBeta1K2 => "|b - beta1*k2| <= 1",
            Condition::AlphaPlusBMinusBeta1K1 => "|alpha + b - beta1*k1| <= 1",
            Condition::AlphaMinusBMinusBeta2K1 => "|alpha - b - beta2*k1| <= 1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub is_qso: bool,
    pub violations: Vec<Violation>,
    /// The operator collapses to the identity map.
    pub is_identity: bool,
}

/// Checks every admissibility inequality and reports all violations.
pub fn validate_params(p: &Params) -> ValidationReport {
    let violations: Vec<Violation> = Condition::ALL
        .iter()
        .filter_map(|&condition| {
            let (value, bound) = condition.evaluate(p);
            (value > bound).then_some(Violation { condition, value, bound })
        })
        .collect();
    ValidationReport { is_qso: violations.is_empty(), violations, is_identity: is_identity(p) }
}

/// `b = α = k1 = k2 = 0` or `b = α = β1 = β2 = 0`.
pub fn is_identity(p: &Params) -> bool {
    p.b == 0.0 && p.alpha == 0.0 && ((p.k1 == 0.0 && p.k2 == 0.0) || (p.beta1 == 0.0 && p.beta2 == 0.0))
}
