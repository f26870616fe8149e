//! Eigenvalues of 4×4 real matrices.

use std::cmp::Ordering;

use nalgebra::{Matrix4 as NaMatrix4, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major 4×4 matrix in `(x, u, y, v)` order.
pub type Matrix4 = [[f64; 4]; 4];

const SCHUR_MAX_SWEEPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl From<Complex64> for Eigenvalue {
    fn from(c: Complex64) -> Self {
        Eigenvalue { re: c.re, im: c.im }
    }
}

/// Four eigenvalues in canonical order: descending modulus, then descending
/// real part, then ascending imaginary part (so of a conjugate pair the
/// member with negative imaginary part comes first).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: [Eigenvalue; 4],
    pub moduli: [f64; 4],
}

fn canonical_order(a: &Eigenvalue, b: &Eigenvalue) -> Ordering {
    b.modulus().total_cmp(&a.modulus()).then(b.re.total_cmp(&a.re)).then(a.im.total_cmp(&b.im))
}

impl Spectrum {
    pub fn from_values(values: [Complex64; 4]) -> Self {
        let mut eigenvalues = values.map(Eigenvalue::from);
        eigenvalues.sort_by(canonical_order);
        Spectrum { eigenvalues, moduli: eigenvalues.map(|e| e.modulus()) }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.moduli[0]
    }

    /// Largest pairwise distance under the best matching of the two
    /// multisets. Robust to order swaps between nearly-equal moduli.
    pub fn matching_distance(&self, other: &Spectrum) -> f64 {
        let mut best = f64::INFINITY;
        permutations4(|perm| {
            let worst = (0..4)
                .map(|i| (self.eigenvalues[i].complex() - other.eigenvalues[perm[i]].complex()).norm())
                .fold(0.0, f64::max);
            best = best.min(worst);
        });
        best
    }
}

fn permutations4(mut visit: impl FnMut([usize; 4])) {
    for a in 0..4 {
        for b in (0..4).filter(|&b| b != a) {
            for c in (0..4).filter(|&c| c != a && c != b) {
                let d = 6 - a - b - c;
                visit([a, b, c, d]);
            }
        }
    }
}

/// All four eigenvalues of `m`, with multiplicity, via the real Schur form.
pub fn eigenvalues4(m: &Matrix4) -> Result<Spectrum> {
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::PreconditionViolated("matrix has non-finite entries".into()));
    }
    let na = NaMatrix4::from_fn(|i, j| m[i][j]);
    let schur =
        Schur::try_new(na, f64::EPSILON, SCHUR_MAX_SWEEPS).ok_or(Error::ConvergenceFailure(SCHUR_MAX_SWEEPS))?;
    let values = schur.complex_eigenvalues();
    Ok(Spectrum::from_values([values[0], values[1], values[2], values[3]]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: [f64; 4]) -> Matrix4 {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            m[i][i] = d[i];
        }
        m
    }

    #[test]
    fn diagonal_spectrum() {
        let s = eigenvalues4(&diag([0.3, 0.8, 0.5, 0.8])).unwrap();
        let re: Vec<f64> = s.eigenvalues.iter().map(|e| e.re).collect();
        assert_eq!(re, vec![0.8, 0.8, 0.5, 0.3]);
        assert!(s.eigenvalues.iter().all(|e| e.im == 0.0));
    }

    #[test]
    fn rotation_block_gives_imaginary_pair() {
        let mut m = diag([0.0, 0.0, 1.0, 1.0]);
        m[0][1] = -1.0;
        m[1][0] = 1.0;
        let s = eigenvalues4(&m).unwrap();
        let has = |im: f64| s.eigenvalues.iter().any(|e| e.re.abs() < 1e-14 && (e.im - im).abs() < 1e-14);
        assert!(has(1.0) && has(-1.0));
        assert!(s.moduli.iter().all(|m| (m - 1.0).abs() < 1e-14));
    }

    #[test]
    fn conjugate_pair_orientation() {
        let s = Spectrum::from_values([
            Complex64::new(0.5, 0.2),
            Complex64::new(0.1, 0.0),
            Complex64::new(0.5, -0.2),
            Complex64::new(0.9, 0.0),
        ]);
        assert_eq!(s.eigenvalues[0].re, 0.9);
        assert_eq!(s.eigenvalues[1].im, -0.2);
        assert_eq!(s.eigenvalues[2].im, 0.2);
    }

    #[test]
    fn deterministic() {
        let m = [[0.1, 0.2, -0.3, 0.4], [0.5, -0.6, 0.7, 0.8], [0.9, 1.0, 1.1, -1.2], [1.3, 0.4, 0.5, 0.6]];
        assert_eq!(eigenvalues4(&m).unwrap(), eigenvalues4(&m).unwrap());
    }

    #[test]
    fn trace_and_determinant_are_preserved() {
        let m = [[0.1, 0.2, -0.3, 0.4], [0.5, -0.6, 0.7, 0.8], [0.9, 1.0, 1.1, -1.2], [1.3, 0.4, 0.5, 0.6]];
        let s = eigenvalues4(&m).unwrap();
        let sum: Complex64 = s.eigenvalues.iter().map(|e| e.complex()).sum();
        let prod: Complex64 = s.eigenvalues.iter().map(|e| e.complex()).product();
        let det = NaMatrix4::from_fn(|i, j| m[i][j]).determinant();
        assert!((sum.re - (0.1 - 0.6 + 1.1 + 0.6)).abs() < 1e-12 && sum.im.abs() < 1e-12);
        assert!((prod.re - det).abs() < 1e-12 && prod.im.abs() < 1e-12);
    }

    #[test]
    fn rejects_nan() {
        let mut m = diag([1.0; 4]);
        m[2][3] = f64::NAN;
        assert!(eigenvalues4(&m).is_err());
    }

    #[test]
    fn matching_distance_ignores_order() {
        let a = Spectrum::from_values([0.8, 0.8000000001, 0.5, 0.3].map(|r| Complex64::new(r, 0.0)));
        let b = Spectrum::from_values([0.30000000001, 0.5, 0.8, 0.8].map(|r| Complex64::new(r, 0.0)));
        assert!(a.matching_distance(&b) < 1e-9);
    }
}
