//! Property tests for the core invariants: scaler round trips, monotonicity,
//! output ranges, split arithmetic, window counts, and metric inequalities.

use normbench_core::metrics::{mae, mse};
use normbench_core::scale::{self, Method, ScalerParams};
use normbench_core::series::{synth_ohlc, OhlcRecord, SampleSet, SplitIndices};
use proptest::prelude::*;

fn price_column() -> impl Strategy<Value = Vec<f64>> {
    // price-like values with guaranteed spread so no method degenerates
    prop::collection::vec(1.0f64..10_000.0, 2..40).prop_filter("needs spread", |col| {
        let min = col.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        max - min > 1.0
    })
}

fn roundtrip_ok(params: &ScalerParams, x: f64) -> bool {
    let back = scale::inverse(params, scale::transform(params, x)).unwrap();
    (back - x).abs() <= 1e-9 * x.abs().max(1.0)
}

proptest! {
    #[test]
    fn min_max_round_trip_and_range(column in price_column(), t in 0.0f64..1.0) {
        let params = scale::fit(Method::MinMax, &column).unwrap();
        let ScalerParams::MinMax { data_min, data_max, .. } = params else { unreachable!() };
        let x = data_min + t * (data_max - data_min);
        let y = scale::transform(&params, x);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&y), "fit-range input left [0, 1]: {y}");
        prop_assert!(roundtrip_ok(&params, x));
    }

    #[test]
    fn decimal_scaling_round_trip_and_range(column in price_column(), idx in any::<prop::sample::Index>()) {
        let params = scale::fit(Method::DecimalScaling, &column).unwrap();
        let x = column[idx.index(column.len())];
        let y = scale::transform(&params, x);
        prop_assert!(y > -1.0 && y < 1.0, "fitted input left (-1, 1): {y}");
        prop_assert!(roundtrip_ok(&params, x));
    }

    #[test]
    fn z_score_round_trip(column in price_column(), z in -5.0f64..5.0) {
        let params = scale::fit(Method::ZScore, &column).unwrap();
        let ScalerParams::ZScore { mean, std_dev } = params else { unreachable!() };
        let x = mean + z * std_dev;
        prop_assert!(roundtrip_ok(&params, x));
    }

    #[test]
    fn median_round_trip(column in price_column(), idx in any::<prop::sample::Index>()) {
        let params = scale::fit(Method::Median, &column).unwrap();
        let x = column[idx.index(column.len())];
        prop_assert!(roundtrip_ok(&params, x));
    }

    #[test]
    fn sigmoid_round_trip_and_range(x in -15.0f64..15.0) {
        let params = ScalerParams::Sigmoid;
        let y = scale::transform(&params, x);
        prop_assert!(y > 0.0 && y < 1.0);
        prop_assert!(roundtrip_ok(&params, x));
    }

    #[test]
    fn tanh_estimator_round_trip_and_range(column in price_column(), z in -50.0f64..50.0) {
        let params = scale::fit(Method::TanhEstimator, &column).unwrap();
        let ScalerParams::TanhEstimator { mean, std_dev } = params else { unreachable!() };
        let x = mean + z * std_dev;
        let y = scale::transform(&params, x);
        prop_assert!(y > 0.0 && y < 1.0);
        prop_assert!(roundtrip_ok(&params, x));
    }

    #[test]
    fn transforms_are_strictly_monotone(
        column in price_column(),
        a in -2.0f64..2.0,
        gap in 1e-6f64..1.0,
    ) {
        let ScalerParams::ZScore { mean, std_dev } =
            scale::fit(Method::ZScore, &column).unwrap() else { unreachable!() };
        for method in Method::ALL {
            // probe points relative to the fitted distribution, except the
            // parameter-free sigmoid, which saturates to exactly 0.0/1.0 in
            // f64 far from the origin and must be probed where it resolves
            let x1 = if method == Method::Sigmoid { 10.0 * a } else { mean + a * std_dev };
            let x2 = if method == Method::Sigmoid { x1 + gap } else { x1 + gap * std_dev };
            let params = scale::fit(method, &column).unwrap();
            let y1 = scale::transform(&params, x1);
            let y2 = scale::transform(&params, x2);
            // the median here is positive, so every transform is increasing
            prop_assert!(y2 > y1, "{method} not increasing: f({x1})={y1}, f({x2})={y2}");
        }
    }

    #[test]
    fn median_transform_follows_the_sign_of_the_median(
        column in prop::collection::vec(-10_000.0f64..-1.0, 3..40),
        idx in any::<prop::sample::Index>(),
        gap in 1e-3f64..100.0,
    ) {
        // all-negative column: the median is negative and the map decreases
        let params = scale::fit(Method::Median, &column).unwrap();
        let x1 = column[idx.index(column.len())];
        let x2 = x1 + gap;
        prop_assert!(scale::transform(&params, x2) < scale::transform(&params, x1));
        prop_assert!(roundtrip_ok(&params, x1));
    }

    #[test]
    fn z_score_is_affine_invariant(
        column in price_column(),
        a in 0.1f64..10.0,
        b in -1000.0f64..1000.0,
        z in -5.0f64..5.0,
    ) {
        let base = scale::fit(Method::ZScore, &column).unwrap();
        let ScalerParams::ZScore { mean, std_dev } = base else { unreachable!() };
        prop_assume!(std_dev >= 1.0);
        let shifted: Vec<f64> = column.iter().map(|x| a * x + b).collect();
        let shifted_params = scale::fit(Method::ZScore, &shifted).unwrap();
        let x = mean + z * std_dev;
        let direct = scale::transform(&base, x);
        let via_affine = scale::transform(&shifted_params, a * x + b);
        prop_assert!(
            (direct - via_affine).abs() <= 1e-9 * direct.abs().max(1.0),
            "{direct} vs {via_affine}"
        );
    }

    #[test]
    fn split_segments_cover_everything(
        n in 3usize..2000,
        train_frac in 0.05f64..0.9,
        val_frac in 0.05f64..0.9,
    ) {
        prop_assume!(train_frac + val_frac < 0.95);
        match SplitIndices::from_len(n, train_frac, val_frac) {
            Ok(split) => {
                prop_assert_eq!(split.total(), n);
                prop_assert!(split.train_len >= 1 && split.val_len >= 1 && split.test_len >= 1);
            }
            Err(_) => {
                // only legitimate for very small n where a segment would be empty
                prop_assert!(
                    n as f64 * train_frac < 1.0
                        || (n - (train_frac * n as f64).floor() as usize)
                            <= (val_frac * n as f64).ceil() as usize
                );
            }
        }
    }

    #[test]
    fn split_is_a_partition_of_the_records(seed in any::<u64>(), n in 3usize..120) {
        let table = synth_ohlc(seed, n);
        if let Ok(split) = SplitIndices::from_len(n, 0.7, 0.15) {
            let (train, val, test) = table.segments(&split);
            let glued: Vec<OhlcRecord> =
                train.iter().chain(val).chain(test).copied().collect();
            prop_assert_eq!(glued.as_slice(), table.records());
        }
    }

    #[test]
    fn window_count_formula_holds(
        n in 1usize..200,
        window in 1usize..20,
        horizon in 0usize..5,
    ) {
        let series: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let result = SampleSet::from_columns(&[&series], &series, window, horizon);
        if n >= window + horizon {
            let set = result.unwrap();
            prop_assert_eq!(set.len(), n - window - horizon + 1);
            // every target is the value window-1+horizon rows after the
            // sample's first step
            for (i, sample) in set.samples().iter().enumerate() {
                prop_assert_eq!(sample.target, (i + window - 1 + horizon) as f64);
            }
        } else {
            prop_assert!(result.is_err());
        }
    }

    #[test]
    fn mae_squared_is_at_most_mse(
        pairs in prop::collection::vec((-1000.0f64..1000.0, -1000.0f64..1000.0), 1..50),
    ) {
        let (pred, actual): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let mse_v = mse(&pred, &actual).unwrap();
        let mae_v = mae(&pred, &actual).unwrap();
        prop_assert!(mae_v * mae_v <= mse_v * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn metrics_are_translation_invariant_and_homogeneous(
        pairs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 1..30),
        shift in -50.0f64..50.0,
        k in 0.01f64..100.0,
    ) {
        let (pred, actual): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let mse_v = mse(&pred, &actual).unwrap();
        let mae_v = mae(&pred, &actual).unwrap();

        let pred_shift: Vec<f64> = pred.iter().map(|p| p + shift).collect();
        let actual_shift: Vec<f64> = actual.iter().map(|a| a + shift).collect();
        let mse_t = mse(&pred_shift, &actual_shift).unwrap();
        prop_assert!((mse_t - mse_v).abs() <= 1e-7 * mse_v.max(1.0));

        let pred_k: Vec<f64> = pred.iter().map(|p| k * p).collect();
        let actual_k: Vec<f64> = actual.iter().map(|a| k * a).collect();
        let mse_k = mse(&pred_k, &actual_k).unwrap();
        let mae_k = mae(&pred_k, &actual_k).unwrap();
        prop_assert!((mse_k - k * k * mse_v).abs() <= 1e-9 * (k * k * mse_v).max(1e-12));
        prop_assert!((mae_k - k * mae_v).abs() <= 1e-9 * (k * mae_v).max(1e-12));
    }
}
