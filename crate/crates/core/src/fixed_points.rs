//! Fixed points of the operator: the interior force equation, the named
//! equilibria, and the full case table over vanishing parameters.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::fixedness_residual;
use crate::error::{Error, Result};
use crate::params::{is_identity, Params, PARAM_NAMES};
use crate::simplex::{Coord, SimplexPoint};

/// Absolute tolerance for parameter equalities such as `β1·k1 = b + α`.
pub const PARAM_EQ_TOL: f64 = 1e-12;
/// Upper bound on `|f(A) − g(A)|` for an accepted root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-12;
/// Fixedness bound for reported isolated points.
pub const FIXEDNESS_TOL: f64 = 1e-10;
/// Allowed mismatch between `A` and `k1·u + k2·v` at a constructed interior point.
pub const ROOT_CONSISTENCY_TOL: f64 = 1e-8;
/// Lower end of the bisection bracket; the upper end is `k1 + k2`.
pub const BRACKET_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootMethod {
    Quadratic,
    ClosedFormCaseI,
    BisectionFallback,
}

/// Why no positive force value exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoRootReason {
    /// `β1·k1 < b + α`.
    BelowThreshold,
    /// `β1·k1 = b + α` but `α·β2·k2 ≤ b·β1·k1`.
    AtThresholdWeakReinfection,
    /// Above threshold, but the equation is degenerate (some rate that the
    /// interior point needs is zero) and has no positive solution.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RootOutcome {
    UniquePositive {
        force: f64,
        method: RootMethod,
    },
    /// Below threshold with strong reinfection the balance curves cross
    /// twice, giving a pair of interior equilibria.
    TwoPositive {
        lower: f64,
        upper: f64,
    },
    NoPositiveRoot {
        reason: NoRootReason,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub outcome: RootOutcome,
    /// Largest `|f(A) − g(A)|` over the returned roots.
    pub residual: Option<f64>,
}

impl RootResult {
    /// The root when it is unique.
    pub fn force(&self) -> Option<f64> {
        match self.outcome {
            RootOutcome::UniquePositive { force, .. } => Some(force),
            _ => None,
        }
    }

    /// Every positive root in increasing order.
    pub fn forces(&self) -> Vec<f64> {
        match self.outcome {
            RootOutcome::UniquePositive { force, .. } => vec![force],
            RootOutcome::TwoPositive { lower, upper } => vec![lower, upper],
            RootOutcome::NoPositiveRoot { .. } => vec![],
        }
    }

    fn none(reason: NoRootReason) -> Self {
        RootResult { outcome: RootOutcome::NoPositiveRoot { reason }, residual: None }
    }
}

/// Left side of the force balance, `f(A) = b + β1·A`.
pub fn balance_lhs(p: &Params, a: f64) -> f64 {
    p.b + p.beta1 * a
}

/// Right side of the force balance,
/// `g(A) = b·β1·k1/(b+α) + α·β1·β2·k2·A / ((b+β2·A)(b+α))`.
pub fn balance_rhs(p: &Params, a: f64) -> f64 {
    let ba = p.b + p.alpha;
    p.b * p.beta1 * p.k1 / ba + p.alpha * p.beta1 * p.beta2 * p.k2 * a / ((p.b + p.beta2 * a) * ba)
}

/// `f(A) − g(A)`; positive roots are exactly the admissible interior forces.
pub fn balance_gap(p: &Params, a: f64) -> f64 {
    balance_lhs(p, a) - balance_rhs(p, a)
}

/// Residual of the interior fixed-point equation written as
/// `1 = b·β1·k1/((b+β1A)(b+α)) + α·β1·β2·k2·A/((b+β1A)(b+β2A)(b+α))`.
pub fn fixed_point_equation_residual(p: &Params, a: f64) -> f64 {
    let ba = p.b + p.alpha;
    let s = p.b + p.beta1 * a;
    let t = p.b + p.beta2 * a;
    let rhs = p.b * p.beta1 * p.k1 / (s * ba) + p.alpha * p.beta1 * p.beta2 * p.k2 * a / (s * t * ba);
    (1.0 - rhs).abs()
}

/// Coefficients `[c2, c1, c0]` of the cleared force equation
/// `c2·A² + c1·A + c0 = 0`.
pub fn force_quadratic(p: &Params) -> [f64; 3] {
    let Params { b, alpha, beta1, beta2, k1, k2 } = *p;
    let ba = b + alpha;
    [
        ba * beta1 * beta2,
        ba * b * (beta1 + beta2) - b * beta1 * beta2 * k1 - alpha * beta1 * beta2 * k2,
        b * b * (ba - beta1 * k1),
    ]
}

/// Solves for the positive force of infection at an interior fixed point.
///
/// The sign of `β1·k1 − (b+α)` selects the case: below threshold there is no
/// positive root, above it there is exactly one, and at the threshold the
/// closed form applies when reinfection is strong enough.
pub fn solve_force_equation(p: &Params) -> Result<RootResult> {
    let ba = p.b + p.alpha;
    let gap = p.threshold_gap();

    if gap.abs() <= PARAM_EQ_TOL {
        let num = p.alpha * p.beta2 * p.k2 - p.b * p.beta1 * p.k1;
        let den = p.beta1 * p.beta2 * p.k1;
        if num > 0.0 && den > 0.0 && ba > 0.0 {
            let force = num / den;
            return Ok(verified(p, force, RootMethod::ClosedFormCaseI));
        }
        return Ok(RootResult::none(NoRootReason::AtThresholdWeakReinfection));
    }
    if gap < 0.0 {
        return Ok(below_threshold(p));
    }
    if ba <= 0.0 {
        return Err(Error::DegenerateParameters(
            "b + alpha = 0 leaves the force equation without a finite root".into(),
        ));
    }

    let [c2, c1, c0] = force_quadratic(p);
    let candidate = if c2 > 0.0 {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc < 0.0 {
            None
        } else if c1 >= 0.0 {
            // avoid cancellation: the positive root is c0 / (c2 · other root)
            let q = -0.5 * (c1 + disc.sqrt());
            (q != 0.0).then(|| c0 / q)
        } else {
            Some((-c1 + disc.sqrt()) / (2.0 * c2))
        }
    } else if c1 != 0.0 {
        Some(-c0 / c1)
    } else {
        None
    };

    if let Some(force) = candidate.filter(|a| a.is_finite() && *a > 0.0) {
        let r = verified(p, force, RootMethod::Quadratic);
        if r.residual.is_some_and(|res| res < ROOT_RESIDUAL_TOL) {
            return Ok(r);
        }
    }

    match bisect_balance(p, BRACKET_FLOOR, p.k1 + p.k2) {
        Some(force) => Ok(verified(p, force, RootMethod::BisectionFallback)),
        None => Ok(RootResult::none(NoRootReason::Degenerate)),
    }
}

/// Below threshold `c0 > 0`, so the quadratic has either no positive root
/// or two of them.
fn below_threshold(p: &Params) -> RootResult {
    let none = RootResult::none(NoRootReason::BelowThreshold);
    let [c2, c1, c0] = force_quadratic(p);
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if !(c2 > 0.0 && c1 < 0.0 && disc >= 0.0) {
        return none;
    }
    let q = 0.5 * (-c1 + disc.sqrt());
    let (lower, upper) = (c0 / q, q / c2);
    if !(lower > 0.0 && upper.is_finite()) {
        return none;
    }
    let residual = balance_gap(p, lower).abs().max(balance_gap(p, upper).abs());
    RootResult { outcome: RootOutcome::TwoPositive { lower, upper }, residual: Some(residual) }
}

fn verified(p: &Params, force: f64, method: RootMethod) -> RootResult {
    RootResult { outcome: RootOutcome::UniquePositive { force, method }, residual: Some(balance_gap(p, force).abs()) }
}

/// Bisection on `f − g` over `[lo, hi]`; `None` without a sign change.
fn bisect_balance(p: &Params, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut f_lo = balance_gap(p, lo);
    let f_hi = balance_gap(p, hi);
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = balance_gap(p, mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `(b/(β1k1), (β1k1−b)/(β1k1), 0, 0)`, the endemic point without recovery.
pub fn build_lambda15(p: &Params) -> Result<SimplexPoint> {
    let r = p.beta1 * p.k1;
    if r <= p.b + PARAM_EQ_TOL {
        let c = if r > 0.0 { [p.b / r, (r - p.b) / r, 0.0, 0.0] } else { [f64::NAN; 4] };
        return Err(Error::NotInSimplex(c));
    }
    let x = p.b / r;
    SimplexPoint::from_array([x, 1.0 - x, 0.0, 0.0])
}

/// The endemic point when second infections are impossible (`β2 = 0`).
pub fn build_lambda16(p: &Params) -> Result<SimplexPoint> {
    let ba = p.b + p.alpha;
    if ba <= 0.0 {
        return Err(Error::PreconditionViolated("lambda16 needs b + alpha > 0".into()));
    }
    let r = p.beta1 * p.k1;
    let excess = r - ba;
    let c = if r > 0.0 { [ba / r, p.b * excess / (r * ba), p.alpha * excess / (r * ba), 0.0] } else { [f64::NAN; 4] };
    if excess <= PARAM_EQ_TOL {
        return Err(Error::NotInSimplex(c));
    }
    SimplexPoint::from_array(c)
}

/// The interior point generated by a force value `force`.
///
/// Its coordinates sum to one for any `force ≥ 0`; `force` is a genuine root
/// exactly when it reproduces itself as `k1·u + k2·v`.
pub fn build_lambda17(p: &Params, force: f64) -> Result<SimplexPoint> {
    if !(force.is_finite() && force >= 0.0) {
        return Err(Error::PreconditionViolated(format!("force must be finite and nonnegative, got {force}")));
    }
    let ba = p.b + p.alpha;
    let s = p.b + p.beta1 * force;
    let t = p.b + p.beta2 * force;
    if ba <= 0.0 || s <= 0.0 || t <= 0.0 {
        return Err(Error::DegenerateParameters("interior point undefined for vanishing rates".into()));
    }
    let c = [
        p.b / s,
        p.b * p.beta1 * force / (s * ba),
        p.alpha * p.b * p.beta1 * force / (s * t * ba),
        p.alpha * p.beta1 * p.beta2 * force * force / (s * t * ba),
    ];
    let mismatch = (p.k1 * c[1] + p.k2 * c[3] - force).abs();
    if mismatch > ROOT_CONSISTENCY_TOL * force.max(1.0) {
        return Err(Error::InconsistentRoot { force, mismatch });
    }
    SimplexPoint::from_array(c)
}

/// Faces of the simplex that can consist entirely of fixed points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Face {
    /// x = u = 0
    Lambda5,
    /// x = y = 0
    Lambda6,
    /// x = v = 0
    Lambda7,
    /// u = y = 0
    Lambda8,
    /// u = v = 0
    Lambda9,
    /// y = v = 0
    Lambda10,
    /// x = 0
    Lambda11,
    /// u = 0
    Lambda12,
    /// y = 0
    Lambda13,
    /// v = 0
    Lambda14,
    /// No pinned coordinate: the identity operator.
    Whole,
}

impl Face {
    pub fn pinned(self) -> &'static [Coord] {
        use Coord::*;
        match self {
            Face::Lambda5 => &[X, U],
            Face::Lambda6 => &[X, Y],
            Face::Lambda7 => &[X, V],
            Face::Lambda8 => &[U, Y],
            Face::Lambda9 => &[U, V],
            Face::Lambda10 => &[Y, V],
            Face::Lambda11 => &[X],
            Face::Lambda12 => &[U],
            Face::Lambda13 => &[Y],
            Face::Lambda14 => &[V],
            Face::Whole => &[],
        }
    }

    pub fn free(self) -> Vec<Coord> {
        let pinned = self.pinned();
        Coord::ALL.into_iter().filter(|c| !pinned.contains(c)).collect()
    }

    pub fn contains(self, s: &SimplexPoint, tol: f64) -> bool {
        self.pinned().iter().all(|&c| s.get(c).abs() < tol)
    }

    pub fn code(self) -> &'static str {
        match self {
            Face::Lambda5 => "Lambda5",
            Face::Lambda6 => "Lambda6",
            Face::Lambda7 => "Lambda7",
            Face::Lambda8 => "Lambda8",
            Face::Lambda9 => "Lambda9",
            Face::Lambda10 => "Lambda10",
            Face::Lambda11 => "Lambda11",
            Face::Lambda12 => "Lambda12",
            Face::Lambda13 => "Lambda13",
            Face::Lambda14 => "Lambda14",
            Face::Whole => "S3",
        }
    }

    pub fn sample<R: rand::Rng + ?Sized>(self, rng: &mut R) -> SimplexPoint {
        crate::simplex::sample_uniform(rng, &self.free())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointLabel {
    Lambda1,
    Lambda2,
    Lambda3,
    Lambda4,
    Lambda15,
    Lambda16,
    Lambda17,
    /// Interior equilibria below threshold, by increasing force.
    EndemicLower,
    EndemicUpper,
    Face(Face),
    Interior,
}

impl FixedPointLabel {
    /// ASCII label used in machine output.
    pub fn code(self) -> &'static str {
        match self {
            FixedPointLabel::Lambda1 => "lambda1",
            FixedPointLabel::Lambda2 => "lambda2",
            FixedPointLabel::Lambda3 => "lambda3",
            FixedPointLabel::Lambda4 => "lambda4",
            FixedPointLabel::Lambda15 => "lambda15",
            FixedPointLabel::Lambda16 => "lambda16",
            FixedPointLabel::Lambda17 => "lambda17",
            FixedPointLabel::EndemicLower => "endemic_lower",
            FixedPointLabel::EndemicUpper => "endemic_upper",
            FixedPointLabel::Face(f) => f.code(),
            FixedPointLabel::Interior => "interior",
        }
    }
}

impl fmt::Display for FixedPointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedPointLabel::Lambda1 => write!(f, "λ1"),
            FixedPointLabel::Lambda2 => write!(f, "λ2"),
            FixedPointLabel::Lambda3 => write!(f, "λ3"),
            FixedPointLabel::Lambda4 => write!(f, "λ4"),
            FixedPointLabel::Lambda15 => write!(f, "λ15"),
            FixedPointLabel::Lambda16 => write!(f, "λ16"),
            FixedPointLabel::Lambda17 => write!(f, "λ17"),
            FixedPointLabel::EndemicLower => write!(f, "E-"),
            FixedPointLabel::EndemicUpper => write!(f, "E+"),
            FixedPointLabel::Face(Face::Whole) => write!(f, "S³"),
            FixedPointLabel::Face(face) => write!(f, "Λ{}", &face.code()[6..]),
            FixedPointLabel::Interior => write!(f, "interior"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointRecord {
    pub point: SimplexPoint,
    pub label: FixedPointLabel,
    pub fixedness_residual: f64,
}

impl FixedPointRecord {
    pub fn new(p: &Params, point: SimplexPoint, label: FixedPointLabel) -> Self {
        FixedPointRecord { point, label, fixedness_residual: fixedness_residual(p, point.as_array()) }
    }
}

/// Which row of the case table produced a fixed-point set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "row", rename_all = "snake_case")]
pub enum CaseRow {
    /// The operator is the identity.
    Identity,
    /// `b = 0` together with the listed additional zero parameters.
    NoBirth { vanishing: Vec<String> },
    /// `b > 0, α = 0, β1·k1 > b`.
    NoRecovery,
    /// `b > 0, α > 0, β2 = 0, β1·k1 > b + α`.
    NoReinfection,
    /// `α·b·β1·β2·k1 > 0`.
    Endemic,
    /// None of the above: only the disease-free vertex.
    DiseaseFree,
}

impl fmt::Display for CaseRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseRow::Identity => write!(f, "identity operator"),
            CaseRow::NoBirth { vanishing } => {
                write!(f, "b = 0")?;
                for v in vanishing {
                    write!(f, ", {v} = 0")?;
                }
                Ok(())
            }
            CaseRow::NoRecovery => write!(f, "b > 0, alpha = 0, beta1*k1 > b"),
            CaseRow::NoReinfection => write!(f, "b > 0, alpha > 0, beta2 = 0, beta1*k1 > b + alpha"),
            CaseRow::Endemic => write!(f, "alpha*b*beta1*beta2*k1 > 0"),
            CaseRow::DiseaseFree => write!(f, "generic (disease-free vertex only)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSet {
    pub isolated: Vec<FixedPointRecord>,
    pub faces: Vec<Face>,
    pub case: CaseRow,
    /// Force-equation solution when the endemic row was matched.
    pub root: Option<RootResult>,
}

impl FixedPointSet {
    pub fn find(&self, label: FixedPointLabel) -> Option<&FixedPointRecord> {
        self.isolated.iter().find(|r| r.label == label)
    }
}

// parameter indices in canonical order
const ALPHA: usize = 1;
const BETA1: usize = 2;
const BETA2: usize = 3;
const K1: usize = 4;
const K2: usize = 5;

struct NoBirthRow {
    zeros: &'static [usize],
    lambda4: bool,
    faces: &'static [Face],
}

/// Rows with `b = 0`, most specific first; ties resolve in listed order.
const NO_BIRTH_ROWS: &[NoBirthRow] = &[
    NoBirthRow { zeros: &[ALPHA, BETA1], lambda4: false, faces: &[Face::Lambda9, Face::Lambda13] },
    NoBirthRow { zeros: &[ALPHA, BETA2], lambda4: false, faces: &[Face::Lambda9, Face::Lambda11] },
    NoBirthRow { zeros: &[ALPHA, K1], lambda4: false, faces: &[Face::Lambda6, Face::Lambda14] },
    NoBirthRow { zeros: &[ALPHA, K2], lambda4: false, faces: &[Face::Lambda6, Face::Lambda12] },
    NoBirthRow { zeros: &[BETA1, BETA2], lambda4: false, faces: &[Face::Lambda12] },
    NoBirthRow { zeros: &[BETA1, K1], lambda4: false, faces: &[Face::Lambda8, Face::Lambda9] },
    NoBirthRow { zeros: &[BETA1, K2], lambda4: false, faces: &[Face::Lambda12] },
    NoBirthRow { zeros: &[BETA2, K1], lambda4: false, faces: &[Face::Lambda5, Face::Lambda9] },
    NoBirthRow { zeros: &[BETA2, K2], lambda4: false, faces: &[Face::Lambda12] },
    NoBirthRow { zeros: &[ALPHA], lambda4: false, faces: &[Face::Lambda6, Face::Lambda9] },
    NoBirthRow { zeros: &[BETA1], lambda4: false, faces: &[Face::Lambda8, Face::Lambda9] },
    NoBirthRow { zeros: &[BETA2], lambda4: false, faces: &[Face::Lambda5, Face::Lambda9] },
    NoBirthRow { zeros: &[K1], lambda4: true, faces: &[Face::Lambda9] },
    NoBirthRow { zeros: &[K2], lambda4: false, faces: &[Face::Lambda12] },
    NoBirthRow { zeros: &[], lambda4: true, faces: &[Face::Lambda9] },
];

/// Enumerates the fixed points for `p` by the most specific matching case.
///
/// `λ1` is always present in `isolated`.
pub fn enumerate_fixed_points(p: &Params) -> FixedPointSet {
    let lambda1 = FixedPointRecord::new(p, SimplexPoint::vertex(Coord::X), FixedPointLabel::Lambda1);
    let mut isolated = vec![lambda1];
    let values = p.to_array();

    if is_identity(p) {
        return FixedPointSet { isolated, faces: vec![Face::Whole], case: CaseRow::Identity, root: None };
    }

    if p.b == 0.0 {
        let row = NO_BIRTH_ROWS
            .iter()
            .find(|row| row.zeros.iter().all(|&i| values[i] == 0.0))
            .expect("the unconditional b = 0 row always matches");
        if row.lambda4 {
            isolated.push(FixedPointRecord::new(p, SimplexPoint::vertex(Coord::V), FixedPointLabel::Lambda4));
        }
        let vanishing = row.zeros.iter().map(|&i| PARAM_NAMES[i].to_string()).collect();
        return FixedPointSet { isolated, faces: row.faces.to_vec(), case: CaseRow::NoBirth { vanishing }, root: None };
    }

    if p.alpha == 0.0 {
        if let Ok(point) = build_lambda15(p) {
            isolated.push(FixedPointRecord::new(p, point, FixedPointLabel::Lambda15));
            return FixedPointSet { isolated, faces: vec![], case: CaseRow::NoRecovery, root: None };
        }
    } else if p.beta2 == 0.0 {
        if let Ok(point) = build_lambda16(p) {
            isolated.push(FixedPointRecord::new(p, point, FixedPointLabel::Lambda16));
            return FixedPointSet { isolated, faces: vec![], case: CaseRow::NoReinfection, root: None };
        }
    } else if p.beta1 > 0.0 && p.k1 > 0.0 {
        let root = solve_force_equation(p).ok();
        let labelled: Vec<(f64, FixedPointLabel)> = match root.map(|r| r.outcome) {
            Some(RootOutcome::UniquePositive { force, .. }) => vec![(force, FixedPointLabel::Lambda17)],
            Some(RootOutcome::TwoPositive { lower, upper }) => {
                vec![(lower, FixedPointLabel::EndemicLower), (upper, FixedPointLabel::EndemicUpper)]
            }
            _ => vec![],
        };
        for (force, label) in labelled {
            if let Ok(point) = build_lambda17(p, force) {
                isolated.push(FixedPointRecord::new(p, point, label));
            }
        }
        return FixedPointSet { isolated, faces: vec![], case: CaseRow::Endemic, root };
    }

    FixedPointSet { isolated, faces: vec![], case: CaseRow::DiseaseFree, root: None }
}
