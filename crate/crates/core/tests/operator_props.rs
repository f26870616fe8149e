mod common;

use common::{conditions_hold, Raw};
use proptest::prelude::*;
use sisi_core::{apply, apply_raw, validate_params, Params, SimplexPoint};

fn raw_params() -> impl Strategy<Value = Raw> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..2.0f64, 0.0..2.0f64, 0.0..2.0f64, 0.0..2.0f64)
        .prop_map(|(b, a, b1, b2, k1, k2)| [b, a, b1, b2, k1, k2])
}

fn valid_params() -> impl Strategy<Value = Raw> {
    raw_params().prop_filter("admissible", conditions_hold)
}

fn point() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.0..1.0f64).prop_filter("nonzero", |c| c.iter().sum::<f64>() > 1e-6).prop_map(|c| {
        let t: f64 = c.iter().sum();
        c.map(|v| v / t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn admissible_maps_stay_on_simplex(p in valid_params(), s in point()) {
        let params = Params::from_array(p).unwrap();
        prop_assert!(validate_params(&params).is_qso);
        let out = apply(&params, &SimplexPoint::from_array(s).unwrap()).unwrap();
        let c = out.as_array();
        prop_assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(c.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn output_sum_follows_birth_rate(p in raw_params(), c in prop::array::uniform4(-2.0..2.0f64)) {
        let params = Params::from_array(p).unwrap();
        let s: f64 = c.iter().sum();
        let out: f64 = apply_raw(&params, &c).iter().sum();
        let scale = 1.0 + c.iter().map(|v| v.abs()).sum::<f64>().powi(2) * 8.0;
        prop_assert!((out - (s + p[0] * (1.0 - s))).abs() < 1e-12 * scale);
    }

    #[test]
    fn matches_reference_operator(p in raw_params(), s in point()) {
        let params = Params::from_array(p).unwrap();
        let ours = apply_raw(&params, &s);
        let reference = common::step(&p, &s);
        prop_assert!(common::sup(&ours, &reference) < 1e-15);
    }

    #[test]
    fn identity_cases_fix_everything(
        s in point(),
        a in prop::array::uniform2(0.0..2.0f64),
        which in any::<bool>(),
    ) {
        let p = if which { Params::new(0.0, 0.0, a[0], a[1], 0.0, 0.0) } else { Params::new(0.0, 0.0, 0.0, 0.0, a[0], a[1]) };
        let params = p.unwrap();
        prop_assert!(validate_params(&params).is_identity);
        let point = SimplexPoint::from_array(s).unwrap();
        prop_assert_eq!(apply(&params, &point).unwrap(), point);
    }

    #[test]
    fn apply_is_deterministic(p in valid_params(), s in point()) {
        let params = Params::from_array(p).unwrap();
        let point = SimplexPoint::from_array(s).unwrap();
        let a = apply(&params, &point).unwrap();
        let b = apply(&params, &point).unwrap();
        prop_assert!(a.as_array().iter().zip(b.as_array()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
