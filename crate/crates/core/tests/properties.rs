//! Property tests for the structural invariants: decomposition identities,
//! covariance algebra, detector causality, simulator validity, and pricing
//! bounds. Each property is quantified over randomized inputs; tolerances
//! are stated at the assertion.

use proptest::prelude::*;
use trendhedge::pricing::{d1_d2, price_call_classic, EuropeanCallSpec};
use trendhedge::stats::{
    annualized_volatility, detect_change_points, sliding_covariance, sliding_variance,
    sliding_volatility, time_scaled_volatility,
};
use trendhedge::timeseries::{simulate_gbm, GbmParams, PriceSeries, ReturnSeries, DEFAULT_DT};
use trendhedge::trend::estimate_trend;

fn price_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1.0f64..500.0, 4..80)
}

fn return_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.15f64..0.15, 4..120)
}

proptest! {
    /// trend + fluct reproduces the source to within one rounding step.
    #[test]
    fn decomposition_is_additive(values in price_vec(), window in 1usize..20, degree in 0usize..3) {
        prop_assume!(window <= values.len());
        prop_assume!(degree < window);
        let prices = PriceSeries::new(values.clone(), DEFAULT_DT).unwrap();
        let d = estimate_trend(&prices, window, degree).unwrap();
        for ((&t, &f), &v) in d.trend().iter().zip(d.fluct()).zip(&values) {
            prop_assert!((t + f - v).abs() <= 1e-12 * v.abs().max(1.0));
        }
    }

    /// Changing a sample never changes any earlier output (strict
    /// causality; the perturbation sits past the warm-up window so every
    /// earlier index is covered).
    #[test]
    fn decomposition_is_causal(values in price_vec(), window in 2usize..12, bump in 1.1f64..3.0, p_raw in 0usize..80) {
        prop_assume!(window * 2 < values.len());
        let p = window + p_raw % (values.len() - window);
        let prices = PriceSeries::new(values.clone(), DEFAULT_DT).unwrap();
        let base = estimate_trend(&prices, window, 2.min(window - 1)).unwrap();

        let mut perturbed = values.clone();
        perturbed[p] *= bump;
        let prices2 = PriceSeries::new(perturbed, DEFAULT_DT).unwrap();
        let alt = estimate_trend(&prices2, window, 2.min(window - 1)).unwrap();

        for j in 0..p {
            prop_assert_eq!(base.trend()[j].to_bits(), alt.trend()[j].to_bits(), "index {}", j);
            prop_assert_eq!(base.trend_deriv()[j].to_bits(), alt.trend_deriv()[j].to_bits(), "index {}", j);
        }
    }

    /// A polynomial source of degree <= fit degree leaves no fluctuation.
    #[test]
    fn polynomial_sources_have_no_fluctuation(c0 in 50.0f64..200.0, c1 in -0.5f64..0.5, c2 in -0.005f64..0.005, window in 4usize..25) {
        let n = 60usize;
        let values: Vec<f64> = (0..n)
            .map(|i| {
                let x = i as f64;
                c0 + c1 * x + c2 * x * x
            })
            .collect();
        prop_assume!(values.iter().all(|&v| v > 0.0));
        let prices = PriceSeries::new(values.clone(), DEFAULT_DT).unwrap();
        let d = estimate_trend(&prices, window.min(n), 2).unwrap();
        for (i, (&f, &v)) in d.fluct().iter().zip(&values).enumerate() {
            prop_assert!(f.abs() <= 1e-8 * v.abs(), "index {}: {}", i, f);
        }
    }

    /// Covariance is symmetric in its arguments.
    #[test]
    fn covariance_is_symmetric(a in return_vec(), b in return_vec(), window in 1usize..15) {
        let n = a.len().min(b.len());
        prop_assume!(window <= n);
        let ab = sliding_covariance(&a[..n], &b[..n], window).unwrap();
        let ba = sliding_covariance(&b[..n], &a[..n], window).unwrap();
        for i in 0..n {
            prop_assert!((ab[i] - ba[i]).abs() <= 1e-12);
        }
    }

    /// Variance is the self-covariance, modulo the round-off clamp at zero.
    #[test]
    fn variance_is_self_covariance(s in return_vec(), window in 1usize..15) {
        prop_assume!(window <= s.len());
        let cov = sliding_covariance(&s, &s, window).unwrap();
        let var = sliding_variance(&s, window).unwrap();
        for i in 0..s.len() {
            let expected = if cov[i] < 0.0 { 0.0 } else { cov[i] };
            prop_assert_eq!(var[i].to_bits(), expected.to_bits(), "index {}", i);
        }
    }

    /// Rescaling the series rescales the volatility by |c|.
    #[test]
    fn volatility_is_scale_equivariant(s in return_vec(), window in 1usize..15, c in prop_oneof![-6.0f64..-0.1, 0.1f64..6.0]) {
        prop_assume!(window <= s.len());
        let base = sliding_volatility(&s, window).unwrap();
        let scaled_input: Vec<f64> = s.iter().map(|&v| c * v).collect();
        let scaled = sliding_volatility(&scaled_input, window).unwrap();
        for i in 0..s.len() {
            prop_assert!((scaled[i] - c.abs() * base[i]).abs() <= 1e-10, "index {}", i);
        }
    }

    /// Adding a constant to all returns leaves the volatility unchanged.
    #[test]
    fn annualized_volatility_is_translation_invariant(s in return_vec(), window in 2usize..12, shift in -0.05f64..0.05) {
        prop_assume!(window <= s.len());
        let r1 = ReturnSeries::new(s.clone(), DEFAULT_DT).unwrap();
        let shifted: Vec<f64> = s.iter().map(|&v| v + shift).collect();
        let r2 = ReturnSeries::new(shifted, DEFAULT_DT).unwrap();
        let v1 = annualized_volatility(&r1, window).unwrap();
        let v2 = annualized_volatility(&r2, window).unwrap();
        for i in 0..s.len() {
            prop_assert!((v1.values()[i] - v2.values()[i]).abs() <= 1e-12, "index {}", i);
        }
    }

    /// Truncating the input never changes events strictly before the cut.
    #[test]
    fn detector_is_causal(s in return_vec(), cut in 1usize..120) {
        prop_assume!(cut <= s.len());
        let full = detect_change_points(&ReturnSeries::new(s.clone(), DEFAULT_DT).unwrap(), 4.0, 0.3).unwrap();
        let truncated =
            detect_change_points(&ReturnSeries::new(s[..cut].to_vec(), DEFAULT_DT).unwrap(), 4.0, 0.3).unwrap();
        let expected: Vec<_> = full.into_iter().filter(|e| e.index < cut).collect();
        prop_assert_eq!(truncated, expected);
    }

    /// With no events the adaptive pipeline equals the raw one bit for bit.
    #[test]
    fn adaptive_volatility_without_events_is_raw(s in return_vec(), window in 2usize..10) {
        prop_assume!(window <= s.len());
        let r = ReturnSeries::new(s, DEFAULT_DT).unwrap();
        let raw = annualized_volatility(&r, window).unwrap();
        let adaptive = time_scaled_volatility(&r, &[], window, window + 17, 50).unwrap();
        for i in 0..raw.len() {
            prop_assert_eq!(raw.values()[i].to_bits(), adaptive.values()[i].to_bits(), "index {}", i);
        }
    }

    /// Simulated paths satisfy every price-series invariant for any seed.
    #[test]
    fn simulated_paths_are_valid_price_series(
        seed in any::<u64>(),
        s0 in 0.5f64..400.0,
        mu in -0.8f64..0.8,
        sigma in 0.0f64..1.2,
        n_steps in 1usize..200,
    ) {
        let prices = simulate_gbm(&GbmParams { s0, mu, sigma, n_steps, dt: DEFAULT_DT, seed }).unwrap();
        prop_assert_eq!(prices.len(), n_steps + 1);
        prop_assert_eq!(prices.values()[0], s0);
        prop_assert!(prices.values().iter().all(|v| v.is_finite() && *v > 0.0));
    }

    /// No-arbitrage bounds and parameter monotonicity of the call quote.
    #[test]
    fn call_quotes_respect_bounds_and_monotonicity(
        s in 20.0f64..300.0,
        k_ratio in 0.5f64..1.8,
        r in -0.02f64..0.08,
        sigma in 1e-3f64..1.5,
        tau in 1e-3f64..3.0,
    ) {
        let k = s * k_ratio;
        let spec = EuropeanCallSpec::new(k, 1, r, DEFAULT_DT).unwrap();
        let q = price_call_classic(s, &spec, sigma, tau);

        let intrinsic = (s - k * (-r * tau).exp()).max(0.0);
        prop_assert!(q.value >= intrinsic - 1e-9);
        prop_assert!(q.value <= s + 1e-9);
        prop_assert!(q.delta_bs >= 0.0 && q.delta_bs <= 1.0);

        // Non-decreasing in spot and volatility, non-increasing in strike.
        let up_s = price_call_classic(s * 1.01, &spec, sigma, tau);
        prop_assert!(up_s.value >= q.value - 1e-12);
        let up_sigma = price_call_classic(s, &spec, sigma + 0.1, tau);
        prop_assert!(up_sigma.value >= q.value - 1e-12);
        let spec_up_k = EuropeanCallSpec::new(k * 1.01, 1, r, DEFAULT_DT).unwrap();
        let up_k = price_call_classic(s, &spec_up_k, sigma, tau);
        prop_assert!(up_k.value <= q.value + 1e-12);
    }

    /// The two quantiles differ by exactly the total volatility.
    #[test]
    fn quantile_identity_holds(
        s in 20.0f64..300.0,
        k_ratio in 0.5f64..1.8,
        r in -0.02f64..0.08,
        sigma in 1e-3f64..1.5,
        tau in 1e-3f64..3.0,
    ) {
        let (d1, d2) = d1_d2(s, s * k_ratio, r, sigma, tau).unwrap();
        prop_assert!((d1 - d2 - sigma * tau.sqrt()).abs() <= 1e-12);
    }
}
