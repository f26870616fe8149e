//! Linear stability of fixed points and the reduced `(u, z)` operator used
//! for the `k2 = 0` convergence argument.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::fixedness_residual;
use crate::eigen::{eigenvalues4, Matrix4, Spectrum};
use crate::error::{Error, Result};
use crate::fixed_points::PARAM_EQ_TOL;
use crate::params::Params;
use crate::simplex::SimplexPoint;

/// Default guard band around the unit circle.
pub const UNIT_CIRCLE_TOL: f64 = 1e-8;
/// Maximum fixedness residual accepted by [`classify_fixed_point`].
pub const CLASSIFY_FIXEDNESS_TOL: f64 = 1e-8;

/// Jacobian of the operator at raw coordinates `c`.
pub fn jacobian_raw(p: &Params, c: &[f64; 4]) -> Matrix4 {
    let [x, _, y, _] = *c;
    let Params { b, alpha, beta1, beta2, k1, k2 } = *p;
    let a = k1 * c[1] + k2 * c[3];
    [
        [1.0 - b - beta1 * a, -beta1 * k1 * x, 0.0, -beta1 * k2 * x],
        [beta1 * a, 1.0 - b - alpha + beta1 * k1 * x, 0.0, beta1 * k2 * x],
        [0.0, alpha - beta2 * k1 * y, 1.0 - b - beta2 * a, -beta2 * k2 * y],
        [0.0, beta2 * k1 * y, beta2 * a, 1.0 - b + beta2 * k2 * y],
    ]
}

pub fn jacobian(p: &Params, s: &SimplexPoint) -> Matrix4 {
    jacobian_raw(p, s.as_array())
}

/// `μ1..μ4` at `λ16` in closed form, in the order `[1−b, 1−b, μ3, μ4]`.
///
/// With `β1·A = b(β1k1 − b − α)/(b + α)` and `D = (b − β1A)² − 4β1Aα`,
/// `μ3,4 = (2 − b − β1A ∓ √D)/2`; when `D < 0` the pair is complex with
/// `μ3` taking the negative imaginary part.
pub fn lambda16_eigenvalues(p: &Params) -> Result<[Complex64; 4]> {
    if p.beta2 != 0.0 {
        return Err(Error::PreconditionViolated("closed-form lambda16 spectrum requires beta2 = 0".into()));
    }
    if !(p.b > 0.0 && p.alpha > 0.0) {
        return Err(Error::PreconditionViolated("closed-form lambda16 spectrum requires b > 0 and alpha > 0".into()));
    }
    if p.threshold_gap() <= PARAM_EQ_TOL {
        return Err(Error::PreconditionViolated("closed-form lambda16 spectrum requires beta1*k1 > b + alpha".into()));
    }
    let ba = p.b + p.alpha;
    let beta1_force = p.b * (p.beta1 * p.k1 - ba) / ba;
    let disc = (p.b - beta1_force).powi(2) - 4.0 * beta1_force * p.alpha;
    let centre = 1.0 - 0.5 * (p.b + beta1_force);
    let (mu3, mu4) = if disc >= 0.0 {
        let h = 0.5 * disc.sqrt();
        (Complex64::new(centre - h, 0.0), Complex64::new(centre + h, 0.0))
    } else {
        let h = 0.5 * (-disc).sqrt();
        (Complex64::new(centre, -h), Complex64::new(centre, h))
    };
    let mu1 = Complex64::new(1.0 - p.b, 0.0);
    Ok([mu1, mu1, mu3, mu4])
}

/// Closed-form spectrum of the Jacobian at `λ16`, canonically ordered.
pub fn lambda16_spectrum(p: &Params) -> Result<Spectrum> {
    lambda16_eigenvalues(p).map(Spectrum::from_values)
}

/// `√(1 − β1A(1 − α) − b(1 − β1A))`, the modulus of the complex pair when
/// the discriminant is negative.
pub fn lambda16_complex_modulus(p: &Params) -> f64 {
    let ba = p.b + p.alpha;
    let beta1_force = p.b * (p.beta1 * p.k1 - ba) / ba;
    (1.0 - beta1_force * (1.0 - p.alpha) - p.b * (1.0 - beta1_force)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityKind {
    Attracting,
    Repelling,
    Saddle,
    NonHyperbolic,
}

impl StabilityKind {
    pub fn from_moduli(moduli: &[f64], tol: f64) -> Self {
        if moduli.iter().any(|m| (m - 1.0).abs() <= tol) {
            StabilityKind::NonHyperbolic
        } else if moduli.iter().all(|&m| m < 1.0 - tol) {
            StabilityKind::Attracting
        } else if moduli.iter().all(|&m| m > 1.0 + tol) {
            StabilityKind::Repelling
        } else {
            StabilityKind::Saddle
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            StabilityKind::Attracting => "attracting",
            StabilityKind::Repelling => "repelling",
            StabilityKind::Saddle => "saddle",
            StabilityKind::NonHyperbolic => "non_hyperbolic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: StabilityKind,
    pub spectrum: Spectrum,
    pub unit_circle_tol: f64,
}

/// Classifies a fixed point by the moduli of its Jacobian eigenvalues.
pub fn classify_fixed_point(p: &Params, s: &SimplexPoint, unit_circle_tol: f64) -> Result<Classification> {
    let residual = fixedness_residual(p, s.as_array());
    if !(residual < CLASSIFY_FIXEDNESS_TOL) {
        return Err(Error::NotAFixedPoint { residual });
    }
    let spectrum = eigenvalues4(&jacobian(p, s))?;
    Ok(Classification {
        kind: StabilityKind::from_moduli(&spectrum.moduli, unit_circle_tol),
        spectrum,
        unit_circle_tol,
    })
}

/// State of the reduced operator: first-time infected `u`, combined
/// `z = y + v`, and the susceptible fraction `x_context` held as an input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub u: f64,
    pub z: f64,
    pub x_context: f64,
}

impl ReducedState {
    pub fn new(u: f64, z: f64, x_context: f64) -> Result<Self> {
        let ok = u >= 0.0 && z >= 0.0 && u + z <= 1.0 && (0.0..=1.0).contains(&x_context);
        if ok {
            Ok(ReducedState { u, z, x_context })
        } else {
            Err(Error::PreconditionViolated(format!("invalid reduced state (u={u}, z={z}, x={x_context})")))
        }
    }
}

/// `(u − bu − αu + β1k1·u·x, z − bz + αu)`, with `x` carried through.
pub fn reduced_operator_step(p: &Params, r: &ReducedState) -> ReducedState {
    let ReducedState { u, z, x_context } = *r;
    ReducedState {
        u: u - p.b * u - p.alpha * u + p.beta1 * p.k1 * u * x_context,
        z: z - p.b * z + p.alpha * u,
        x_context,
    }
}

/// Membership in `{ b·z − α·u ≥ 0 }`.
pub fn invariant_set_member(p: &Params, r: &ReducedState) -> bool {
    p.b * r.z - p.alpha * r.u >= 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed_points::{build_lambda16, enumerate_fixed_points, FixedPointLabel};
    use crate::simplex::Coord;

    fn no_reinfection() -> Params {
        Params::new(0.2, 0.3, 0.7, 0.0, 1.0, 0.3).unwrap()
    }

    #[test]
    fn lambda16_jacobian_matches_displayed_form() {
        let p = no_reinfection();
        let j = jacobian(&p, &build_lambda16(&p).unwrap());
        let ba = 0.5;
        let beta1_force = 0.08;
        let expected = [
            [1.0 - 0.2 - beta1_force, -ba, 0.0, -0.3 * ba],
            [beta1_force, 1.0, 0.0, 0.3 * ba],
            [0.0, 0.3, 0.8, 0.0],
            [0.0, 0.0, 0.0, 0.8],
        ];
        for i in 0..4 {
            for j_ in 0..4 {
                assert!((j[i][j_] - expected[i][j_]).abs() < 1e-14, "({i},{j_}) {} vs {}", j[i][j_], expected[i][j_]);
            }
        }
    }

    #[test]
    fn lambda1_jacobian_diagonal() {
        let p = Params::new(0.2, 0.3, 0.7, 0.6, 1.0, 0.3).unwrap();
        let j = jacobian(&p, &SimplexPoint::vertex(Coord::X));
        let d = [j[0][0], j[1][1], j[2][2], j[3][3]];
        let e = [0.8, 1.0 - 0.2 - 0.3 + 0.7, 0.8, 0.8];
        for (a, b) in d.iter().zip(e) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn lambda16_closed_form_complex_case() {
        let mu = lambda16_eigenvalues(&no_reinfection()).unwrap();
        assert_eq!(mu[0], Complex64::new(0.8, 0.0));
        assert_eq!(mu[1], Complex64::new(0.8, 0.0));
        assert!((mu[2].re - 0.86).abs() < 1e-15 && (mu[2].im + 0.0816f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((mu[2].im + 0.142_828_568_570_857).abs() < 1e-12);
        assert_eq!(mu[3], mu[2].conj());
        assert!((mu[2].norm() - 0.76f64.sqrt()).abs() < 1e-15);
        assert!((lambda16_complex_modulus(&no_reinfection()) - 0.76f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lambda16_closed_form_real_case() {
        let p = Params::new(0.2, 0.01, 0.7, 0.0, 1.0, 0.0).unwrap();
        let mu = lambda16_eigenvalues(&p).unwrap();
        assert!(mu.iter().all(|m| m.im == 0.0));
        // β1A = 0.2·0.49/0.21, D = (0.2 − β1A)² − 0.04·β1A
        let r = 0.2 * 0.49 / 0.21;
        let d: f64 = (0.2 - r) * (0.2 - r) - 0.04 * r;
        assert!((d - 0.052_444_444_444_444_4).abs() < 1e-12);
        assert!((mu[2].re - 0.552_162_906_417_882).abs() < 1e-12);
        assert!((mu[3].re - 0.781_170_426_915_451).abs() < 1e-12);
        assert!((mu[2].re - (2.0 - 0.2 - r - d.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn lambda16_preconditions() {
        assert!(lambda16_eigenvalues(&Params::new(0.2, 0.3, 0.7, 0.1, 1.0, 0.3).unwrap()).is_err());
        assert!(lambda16_eigenvalues(&Params::new(0.2, 0.3, 0.4, 0.0, 1.0, 0.3).unwrap()).is_err());
    }

    #[test]
    fn numeric_spectrum_matches_closed_form_at_lambda16() {
        let p = no_reinfection();
        let num = eigenvalues4(&jacobian(&p, &build_lambda16(&p).unwrap())).unwrap();
        let closed = lambda16_spectrum(&p).unwrap();
        assert!(num.matching_distance(&closed) < 1e-9);
    }

    #[test]
    fn classifications() {
        let p = no_reinfection();
        let c = classify_fixed_point(&p, &build_lambda16(&p).unwrap(), UNIT_CIRCLE_TOL).unwrap();
        assert_eq!(c.kind, StabilityKind::Attracting);

        let endemic = Params::new(0.2, 0.3, 0.7, 0.6, 1.0, 0.3).unwrap();
        let c = classify_fixed_point(&endemic, &SimplexPoint::vertex(Coord::X), UNIT_CIRCLE_TOL).unwrap();
        assert_eq!(c.kind, StabilityKind::Saddle);
        assert!((c.spectrum.moduli[0] - 1.2).abs() < 1e-12);

        let set = enumerate_fixed_points(&endemic);
        let l17 = set.find(FixedPointLabel::Lambda17).unwrap();
        let c = classify_fixed_point(&endemic, &l17.point, UNIT_CIRCLE_TOL).unwrap();
        assert_eq!(c.kind, StabilityKind::Attracting);
    }

    #[test]
    fn births_off_is_non_hyperbolic() {
        let p = Params::new(0.0, 0.3, 0.7, 0.6, 1.0, 0.3).unwrap();
        let set = enumerate_fixed_points(&p);
        for rec in &set.isolated {
            let c = classify_fixed_point(&p, &rec.point, UNIT_CIRCLE_TOL).unwrap();
            assert_eq!(c.kind, StabilityKind::NonHyperbolic, "{:?}", rec.label);
        }
    }

    #[test]
    fn rejects_non_fixed_points() {
        let p = no_reinfection();
        let s = SimplexPoint::new(0.25, 0.25, 0.25, 0.25).unwrap();
        assert!(matches!(classify_fixed_point(&p, &s, UNIT_CIRCLE_TOL), Err(Error::NotAFixedPoint { .. })));
    }

    #[test]
    fn kind_from_moduli() {
        assert_eq!(StabilityKind::from_moduli(&[1.5, 1.2, 1.1, 1.01], 1e-8), StabilityKind::Repelling);
        assert_eq!(StabilityKind::from_moduli(&[1.0 + 1e-9, 0.5], 1e-8), StabilityKind::NonHyperbolic);
    }

    #[test]
    fn reduced_operator_examples() {
        let p = Params::new(0.2, 0.3, 0.5, 0.0, 1.0, 0.0).unwrap();
        let origin = ReducedState::new(0.0, 0.0, 0.5).unwrap();
        assert_eq!(reduced_operator_step(&p, &origin), origin);

        let r = reduced_operator_step(&p, &ReducedState::new(0.0, 0.5, 0.5).unwrap());
        assert!(r.u == 0.0 && (r.z - 0.4).abs() < 1e-15);

        let r = reduced_operator_step(&p, &ReducedState::new(0.2, 0.5, 0.3).unwrap());
        assert!((r.u - 0.13).abs() < 1e-15 && (r.z - 0.46).abs() < 1e-15);
        assert_eq!(r.x_context, 0.3);
    }

    #[test]
    fn invariant_set_examples() {
        let p = Params::new(0.2, 0.3, 0.5, 0.0, 1.0, 0.0).unwrap();
        assert!(invariant_set_member(&p, &ReducedState::new(0.0, 0.5, 0.0).unwrap()));
        assert!(invariant_set_member(&p, &ReducedState::new(0.2, 0.5, 0.0).unwrap()));
        assert!(!invariant_set_member(&p, &ReducedState::new(0.5, 0.1, 0.0).unwrap()));
    }

    #[test]
    fn reduced_state_validation() {
        assert!(ReducedState::new(0.6, 0.6, 0.5).is_err());
        assert!(ReducedState::new(0.1, 0.1, 1.5).is_err());
        assert!(ReducedState::new(-0.1, 0.1, 0.5).is_err());
    }
}
