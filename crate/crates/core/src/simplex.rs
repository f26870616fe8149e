use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Membership tolerance for the simplex constraints.
pub const TOL_SIMPLEX: f64 = 1e-9;

/// Coordinate of a state, in `(x, u, y, v)` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Coord {
    X,
    U,
    Y,
    V,
}

impl Coord {
    pub const ALL: [Coord; 4] = [Coord::X, Coord::U, Coord::Y, Coord::V];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Coord::X => "x",
            Coord::U => "u",
            Coord::Y => "y",
            Coord::V => "v",
        }
    }
}

/// A state `(x, u, y, v)` on the standard 3-simplex.
///
/// * `x` never-infected susceptibles
/// * `u` first-time infected
/// * `y` recovered
/// * `v` second-time infected
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct SimplexPoint([f64; 4]);

impl SimplexPoint {
    pub fn new(x: f64, u: f64, y: f64, v: f64) -> Result<Self> {
        Self::from_array([x, u, y, v])
    }

    pub fn from_array(c: [f64; 4]) -> Result<Self> {
        if on_simplex(&c, TOL_SIMPLEX) {
            Ok(SimplexPoint(c))
        } else {
            Err(Error::NotInSimplex(c))
        }
    }

    /// Caller guarantees membership.
    pub(crate) fn from_array_unchecked(c: [f64; 4]) -> Self {
        SimplexPoint(c)
    }

    /// The vertex with all mass on `coord`.
    pub fn vertex(coord: Coord) -> Self {
        let mut c = [0.0; 4];
        c[coord.index()] = 1.0;
        SimplexPoint(c)
    }

    pub fn as_array(&self) -> &[f64; 4] {
        &self.0
    }

    pub fn get(&self, coord: Coord) -> f64 {
        self.0[coord.index()]
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }
    pub fn u(&self) -> f64 {
        self.0[1]
    }
    pub fn y(&self) -> f64 {
        self.0[2]
    }
    pub fn v(&self) -> f64 {
        self.0[3]
    }

    pub fn distance(&self, other: &SimplexPoint) -> f64 {
        sup_distance(&self.0, &other.0)
    }
}

impl TryFrom<[f64; 4]> for SimplexPoint {
    type Error = Error;
    fn try_from(c: [f64; 4]) -> Result<Self> {
        SimplexPoint::from_array(c)
    }
}

impl From<SimplexPoint> for [f64; 4] {
    fn from(p: SimplexPoint) -> Self {
        p.0
    }
}

impl fmt::Display for SimplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, u, y, v] = self.0;
        write!(f, "({x:.10}, {u:.10}, {y:.10}, {v:.10})")
    }
}

/// Uniform sample on the sub-simplex spanned by `free` (all other coordinates zero).
pub fn sample_uniform<R: rand::Rng + ?Sized>(rng: &mut R, free: &[Coord]) -> SimplexPoint {
    assert!(!free.is_empty(), "need at least one free coordinate");
    let mut c = [0.0; 4];
    let mut total = 0.0;
    for &coord in free {
        // exponential spacings give a flat Dirichlet
        let e = -(1.0 - rng.gen::<f64>()).ln();
        c[coord.index()] = e;
        total += e;
    }
    if total == 0.0 {
        c[free[0].index()] = 1.0;
        total = 1.0;
    }
    for v in c.iter_mut() {
        *v /= total;
    }
    SimplexPoint(c)
}

pub fn on_simplex(c: &[f64; 4], tol: f64) -> bool {
    c.iter().all(|&v| v.is_finite() && v >= -tol && v <= 1.0 + tol) && (c.iter().sum::<f64>() - 1.0).abs() <= tol
}

pub fn sup_distance(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}
