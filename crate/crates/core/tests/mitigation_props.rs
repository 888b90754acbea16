use proptest::prelude::*;

use spinprep_core::mitigation::{ConfusionMatrix, MitigationMethod, mitigate_distribution, richardson};
use spinprep_core::sim::{Confusion, apply_readout};

fn confusion() -> impl Strategy<Value = Confusion> {
    (0.0f64..0.2, 0.0f64..0.2).prop_map(|(a, b)| [[1.0 - a, b], [a, 1.0 - b]])
}

fn distribution(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, dim).prop_filter_map("nonzero", |v| {
        let s: f64 = v.iter().sum();
        (s > 1e-6).then(|| v.iter().map(|x| x / s).collect())
    })
}

fn points() -> impl Strategy<Value = Vec<(u32, f64)>> {
    prop::collection::vec((0u32..6, -2.0f64..2.0), 2..8)
        .prop_map(|v| v.into_iter().map(|(k, a)| (2 * k + 1, a)).collect::<Vec<_>>())
        .prop_filter("two distinct r", |v| v.iter().any(|p| p.0 != v[0].0))
}

proptest! {
    #[test]
    fn exact_round_trip(factors in prop::collection::vec(confusion(), 3), truth in distribution(8)) {
        let m = ConfusionMatrix::from_factors(&factors).unwrap();
        let observed = apply_readout(&truth, &factors).unwrap();
        let p = mitigate_distribution(&m, &observed, MitigationMethod::default()).unwrap();
        for (a, b) in p.iter().zip(&truth) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn output_is_distribution(factors in prop::collection::vec(confusion(), 2), observed in distribution(4)) {
        let m = ConfusionMatrix::from_factors(&factors).unwrap();
        let p = mitigate_distribution(&m, &observed, MitigationMethod::default()).unwrap();
        prop_assert!(p.iter().all(|&v| v >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn richardson_ignores_order(pts in points(), rot in 0usize..8) {
        let a = richardson(&pts).unwrap();
        let mut shuffled = pts.clone();
        shuffled.reverse();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        let b = richardson(&shuffled).unwrap();
        prop_assert!((a.intercept - b.intercept).abs() < 1e-10);
        prop_assert!((a.slope - b.slope).abs() < 1e-10);
    }

    #[test]
    fn richardson_is_affine_equivariant(pts in points(), scale in -3.0f64..3.0, shift in -3.0f64..3.0) {
        let a = richardson(&pts).unwrap();
        let mapped: Vec<(u32, f64)> = pts.iter().map(|&(r, v)| (r, scale * v + shift)).collect();
        let b = richardson(&mapped).unwrap();
        prop_assert!((b.intercept - (scale * a.intercept + shift)).abs() < 1e-9);
        prop_assert!((b.slope - scale * a.slope).abs() < 1e-9);
    }

    #[test]
    fn richardson_recovers_lines(intercept in -5.0f64..5.0, slope in -1.0f64..1.0) {
        let pts: Vec<(u32, f64)> = [1u32, 3, 5].iter().map(|&r| (r, intercept + slope * r as f64)).collect();
        let fit = richardson(&pts).unwrap();
        prop_assert!((fit.intercept - intercept).abs() <= 1e-12);
        prop_assert!((fit.slope - slope).abs() <= 1e-12);
        prop_assert!(fit.residual <= 1e-12);
    }
}
