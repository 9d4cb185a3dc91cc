//! Property tests for the exact algebraic invariants.

use proptest::prelude::*;
use ranklab_core::calendar::IntervalCalendar;
use ranklab_core::empirics::beta_plus;
use ranklab_core::market::{fit_covariance_cs, ReturnPanel};
use ranklab_core::portfolio::{validate_weights, WeightVector};
use ranklab_core::scoring::{ir, rank};
use ranklab_core::stats::quantile;

fn return_series(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.05f64..0.05, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ir_is_invariant_to_positive_rescaling(series in return_series(30), c in 0.1f64..10.0) {
        let scaled: Vec<f64> = series.iter().map(|x| c * x).collect();
        if let (Ok(a), Ok(b)) = (ir(&series), ir(&scaled)) {
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn rank_matches_counting_definition(values in prop::collection::vec(-10f64..10.0, 2..40)) {
        let ranks = rank(&values);
        for (k, &v) in values.iter().enumerate() {
            let expect = values.iter().filter(|&&x| x >= v).count();
            prop_assert_eq!(ranks[k], expect);
        }
        // Every rank is attained by at least `q` teams for q = 1 (the top).
        prop_assert!(ranks.iter().any(|&r| r == 1));
    }

    #[test]
    fn rank_is_invariant_under_increasing_transforms(
        values in prop::collection::vec(-5f64..5.0, 2..30)
    ) {
        let mapped: Vec<f64> = values.iter().map(|x| x.exp() + 2.0 * x).collect();
        prop_assert_eq!(rank(&values), rank(&mapped));
    }

    #[test]
    fn long_share_complement_and_scale_invariance(
        weights in prop::collection::vec(-0.02f64..0.02, 1..50),
        c in 0.1f64..10.0,
    ) {
        let w = WeightVector::from_slice(&weights);
        if w.gross() > 0.0 {
            let bp = beta_plus(&w).unwrap();
            let bm = weights.iter().map(|x| (-x).max(0.0)).sum::<f64>() / w.gross();
            prop_assert!((bp + bm - 1.0).abs() < 1e-12);

            let scaled: Vec<f64> = weights.iter().map(|x| c * x).collect();
            let bp_scaled = beta_plus(&WeightVector::from_slice(&scaled)).unwrap();
            prop_assert!((bp - bp_scaled).abs() < 1e-12);
        }
    }

    #[test]
    fn gross_exposure_constraint_is_a_window(gross in 0.0f64..2.0) {
        // A single-asset portfolio at the given gross exposure.
        let w = WeightVector::from_slice(&[gross]);
        let inside = (0.25..=1.0).contains(&gross);
        // Tolerance at the boundary only.
        if (gross - 0.25).abs() > 1e-6 && (gross - 1.0).abs() > 1e-6 {
            prop_assert_eq!(validate_weights(&w), inside);
        }
    }

    #[test]
    fn cs_fit_equals_brute_force_on_random_panels(
        rows in 2usize..6,
        data in prop::collection::vec(-0.05f64..0.05, 60),
    ) {
        let days = 60 / rows;
        let usable = rows * days;
        let matrix = ranklab_core::nalgebra::DMatrix::from_row_slice(rows, days, &data[..usable]);
        let cal = IntervalCalendar::new(1, days).unwrap();
        let panel = ReturnPanel::new(matrix.clone(), cal).unwrap();
        let (srr, srrp) = fit_covariance_cs(&panel).unwrap();

        let means: Vec<f64> =
            (0..rows).map(|a| matrix.row(a).iter().sum::<f64>() / days as f64).collect();
        let cov = |a: usize, b: usize| {
            (0..days)
                .map(|d| (matrix[(a, d)] - means[a]) * (matrix[(b, d)] - means[b]))
                .sum::<f64>()
                / (days - 1) as f64
        };
        let diag = (0..rows).map(|a| cov(a, a)).sum::<f64>() / rows as f64;
        let mut off = 0.0;
        for a in 0..rows {
            for b in 0..rows {
                if a != b {
                    off += cov(a, b);
                }
            }
        }
        let off = off / (rows * (rows - 1)) as f64;
        prop_assert!((srr - diag).abs() <= 1e-12 * diag.abs().max(1e-12));
        prop_assert!((srrp - off).abs() <= 1e-12 * off.abs().max(1e-12));
    }

    #[test]
    fn quantiles_are_monotone_in_p(
        values in prop::collection::vec(-100f64..100.0, 1..50),
        p1 in 0.0f64..1.0,
        p2 in 0.0f64..1.0,
    ) {
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        prop_assert!(quantile(&values, lo) <= quantile(&values, hi) + 1e-12);
    }
}
