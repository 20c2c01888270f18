//! Windowed second-moment statistics and the annualized-volatility
//! pipeline: raw rolling volatility, its low-pass-filtered variant, online
//! change-point detection, and the change-point-adaptive ("time-scaled")
//! variant that enlarges the estimation window after a detected break.

use crate::error::{Error, Result};
use crate::timeseries::ReturnSeries;

/// Trailing window used to standardize returns inside the change-point
/// detector (running median and MAD).
pub const ROBUST_WINDOW: usize = 50;

/// Consistency factor turning a median absolute deviation into a standard
/// deviation under normality.
pub const MAD_TO_SIGMA: f64 = 1.4826;

/// Floor applied to a degenerate (zero) robust scale before standardizing.
pub const SCALE_FLOOR: f64 = 1e-12;

/// Negative round-off tolerance for windowed variances: values in
/// `[-1e-12, 0)` are clamped to zero, anything lower is an error.
pub const VARIANCE_CLAMP: f64 = 1e-12;

/// How a volatility series was produced, together with the parameters of
/// that method.
#[derive(Debug, Clone, PartialEq)]
pub enum VolMethod {
    /// Rolling standard deviation of returns, annualized.
    Raw,
    /// First-order exponential smoothing of the raw series.
    Filtered {
        /// Smoothing coefficient in `(0, 1]`.
        alpha: f64,
    },
    /// Window enlarged to `augmented_window` for `hold` steps after each
    /// change-point.
    TimeScaled {
        /// Enlarged window applied after a change-point.
        augmented_window: usize,
        /// Number of steps the enlargement stays active.
        hold: usize,
        /// Whether an enlarged window ever had to be clamped to the
        /// available history.
        clamped: bool,
    },
}

impl VolMethod {
    /// Short lowercase tag for reports: `raw`, `filtered`, `time_scaled`.
    pub fn tag(&self) -> &'static str {
        match self {
            VolMethod::Raw => "raw",
            VolMethod::Filtered { .. } => "filtered",
            VolMethod::TimeScaled { .. } => "time_scaled",
        }
    }
}

/// An annualized volatility series aligned with the return series it was
/// computed from (one value per return sample).
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilitySeries {
    values: Vec<f64>,
    method: VolMethod,
    base_window: usize,
}

impl VolatilitySeries {
    /// Builds a volatility series, checking that every value is
    /// non-negative and finite.
    pub fn new(values: Vec<f64>, method: VolMethod, base_window: usize) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "volatility {index} must be non-negative and finite, got {value}"
                )));
            }
        }
        Ok(Self {
            values,
            method,
            base_window,
        })
    }

    /// A constant volatility series, handy for controlled experiments.
    pub fn constant(value: f64, len: usize) -> Result<Self> {
        Self::new(vec![value; len], VolMethod::Raw, len.max(1))
    }

    /// The annualized volatility values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The method that produced this series.
    pub fn method(&self) -> &VolMethod {
        &self.method
    }

    /// The base estimation window.
    pub fn base_window(&self) -> usize {
        self.base_window
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Whether the series holds no samples.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Direction of a detected change-point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Returns shifted upward.
    Up,
    /// Returns shifted downward.
    Down,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Up => f.write_str("up"),
            Direction::Down => f.write_str("down"),
        }
    }
}

/// One detected change-point in a return series.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangePointEvent {
    /// Index into the return series where the detector fired.
    pub index: usize,
    /// Detector score at the trigger (always above the threshold).
    pub statistic: f64,
    /// Which side fired.
    pub direction: Direction,
    /// True when the robust scale was zero over the standardization window
    /// and the floor [`SCALE_FLOOR`] had to be applied.
    pub degenerate_scale: bool,
}

/// Sliding covariance of two equally long series.
///
/// `out[i] = Tr(s1*s2)[i] - Tr(s1)[i]*Tr(s2)[i]` where `Tr` is the trailing
/// mean over `window` samples, shrunk to the available history during the
/// warm-up (exactly as the trend module's moving average).
pub fn sliding_covariance(s1: &[f64], s2: &[f64], window: usize) -> Result<Vec<f64>> {
    if s1.len() != s2.len() {
        return Err(Error::LengthMismatch {
            left: s1.len(),
            right: s2.len(),
        });
    }
    validate_window(window, s1.len())?;
    Ok((0..s1.len())
        .map(|i| windowed_covariance_at(s1, s2, i, window))
        .collect())
}

/// Covariance over the trailing window ending at `i`, shrunk to the
/// available history.
///
/// Evaluates `mean(s1*s2) - mean(s1)*mean(s2)` with both series shifted by
/// their newest sample first. The shift cancels algebraically, but it keeps
/// the two means from swamping the difference, and a constant window comes
/// out exactly zero instead of as round-off.
fn windowed_covariance_at(s1: &[f64], s2: &[f64], i: usize, window: usize) -> f64 {
    let lo = (i + 1).saturating_sub(window);
    let a = s1[i];
    let b = s2[i];
    let len = (i - lo + 1) as f64;
    let mut sum_products = 0.0;
    let mut sum1 = 0.0;
    let mut sum2 = 0.0;
    for j in lo..=i {
        let x = s1[j] - a;
        let y = s2[j] - b;
        sum_products += x * y;
        sum1 += x;
        sum2 += y;
    }
    sum_products / len - (sum1 / len) * (sum2 / len)
}

/// Sliding population variance: the covariance of a series with itself.
///
/// Exact negative round-off within [`VARIANCE_CLAMP`] is clamped to zero;
/// anything more negative signals corrupt input and is an error.
pub fn sliding_variance(s: &[f64], window: usize) -> Result<Vec<f64>> {
    let mut out = sliding_covariance(s, s, window)?;
    for (index, value) in out.iter_mut().enumerate() {
        if *value < 0.0 {
            if *value >= -VARIANCE_CLAMP {
                *value = 0.0;
            } else {
                return Err(Error::NegativeVariance {
                    index,
                    value: *value,
                });
            }
        }
    }
    Ok(out)
}

/// Sliding standard deviation: pointwise square root of
/// [`sliding_variance`].
pub fn sliding_volatility(s: &[f64], window: usize) -> Result<Vec<f64>> {
    let mut out = sliding_variance(s, window)?;
    for value in &mut out {
        *value = value.sqrt();
    }
    Ok(out)
}

/// Annualized rolling volatility of log returns.
///
/// `out[i] = sliding_volatility(r, window)[i] * sqrt(1/dt)`; on the default
/// daily grid the factor is `sqrt(255)`.
pub fn annualized_volatility(returns: &ReturnSeries, window: usize) -> Result<VolatilitySeries> {
    if window < 2 {
        return Err(Error::InvalidParameter(format!(
            "volatility window must be at least 2, got {window}"
        )));
    }
    let annualize = (1.0 / returns.dt()).sqrt();
    let values = sliding_volatility(returns.values(), window)?
        .into_iter()
        .map(|v| v * annualize)
        .collect();
    Ok(VolatilitySeries {
        values,
        method: VolMethod::Raw,
        base_window: window,
    })
}

/// First-order exponential low-pass filter:
/// `y[i] = alpha*x[i] + (1 - alpha)*y[i-1]`, seeded with `y[0] = x[0]`.
pub fn lowpass_filter(vol: &VolatilitySeries, alpha: f64) -> Result<VolatilitySeries> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    let x = vol.values();
    let mut values = Vec::with_capacity(x.len());
    for (i, &xi) in x.iter().enumerate() {
        if i == 0 {
            values.push(xi);
        } else {
            values.push(alpha * xi + (1.0 - alpha) * values[i - 1]);
        }
    }
    Ok(VolatilitySeries {
        values,
        method: VolMethod::Filtered { alpha },
        base_window: vol.base_window,
    })
}

/// Online two-sided CUSUM change-point detector on robustly standardized
/// returns.
///
/// Each return is standardized by the running median and the running
/// MAD×1.4826 over the trailing [`ROBUST_WINDOW`] samples:
/// `z[i] = (r[i] - m[i]) / s[i]`. The one-sided statistics
///
/// ```text
/// g+[i] = max(0, g+[i-1] + z[i] - drift)
/// g-[i] = max(0, g-[i-1] - z[i] - drift)
/// ```
///
/// fire an event as soon as either exceeds `threshold`; both then reset to
/// zero. A zero robust scale is floored at [`SCALE_FLOOR`] and flagged in
/// the event record. The detector is causal: the event at index `i` depends
/// only on samples up to `i`.
pub fn detect_change_points(
    returns: &ReturnSeries,
    threshold: f64,
    drift: f64,
) -> Result<Vec<ChangePointEvent>> {
    if !threshold.is_finite() || threshold <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "threshold must be strictly positive, got {threshold}"
        )));
    }
    if !drift.is_finite() || drift < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "drift must be non-negative, got {drift}"
        )));
    }

    let values = returns.values();
    let mut events = Vec::new();
    let mut g_pos = 0.0_f64;
    let mut g_neg = 0.0_f64;
    let mut window = Vec::with_capacity(ROBUST_WINDOW);
    let mut deviations = Vec::with_capacity(ROBUST_WINDOW);

    for (i, &r) in values.iter().enumerate() {
        let lo = (i + 1).saturating_sub(ROBUST_WINDOW);
        window.clear();
        window.extend_from_slice(&values[lo..=i]);
        let median = median_in_place(&mut window);

        deviations.clear();
        deviations.extend(values[lo..=i].iter().map(|&v| (v - median).abs()));
        let mad = median_in_place(&mut deviations);

        let mut scale = mad * MAD_TO_SIGMA;
        let degenerate_scale = scale < SCALE_FLOOR;
        if degenerate_scale {
            scale = SCALE_FLOOR;
        }

        let z = (r - median) / scale;
        g_pos = (g_pos + z - drift).max(0.0);
        g_neg = (g_neg - z - drift).max(0.0);

        if g_pos > threshold || g_neg > threshold {
            let (statistic, direction) = if g_pos >= g_neg {
                (g_pos, Direction::Up)
            } else {
                (g_neg, Direction::Down)
            };
            events.push(ChangePointEvent {
                index: i,
                statistic,
                direction,
                degenerate_scale,
            });
            g_pos = 0.0;
            g_neg = 0.0;
        }
    }
    Ok(events)
}

/// Annualized volatility whose window is temporarily enlarged after each
/// change-point.
///
/// The per-step window is `augmented_window` whenever some event index `e`
/// satisfies `e <= i < e + hold`, and `base_window` otherwise. With no
/// events the output equals `annualized_volatility(returns, base_window)`
/// bit for bit. An enlarged window reaching past the start of the history
/// is clamped to the available samples and flagged in the method record.
pub fn time_scaled_volatility(
    returns: &ReturnSeries,
    events: &[ChangePointEvent],
    base_window: usize,
    augmented_window: usize,
    hold: usize,
) -> Result<VolatilitySeries> {
    if base_window < 2 {
        return Err(Error::InvalidParameter(format!(
            "base_window must be at least 2, got {base_window}"
        )));
    }
    if augmented_window <= base_window {
        return Err(Error::InvalidParameter(format!(
            "augmented_window {augmented_window} must exceed base_window {base_window}"
        )));
    }
    if hold == 0 {
        return Err(Error::InvalidParameter(
            "hold must be at least 1".to_owned(),
        ));
    }
    let values = returns.values();
    validate_window(base_window, values.len())?;
    for event in events {
        if event.index >= values.len() {
            return Err(Error::InvalidParameter(format!(
                "event index {} is outside the return series (length {})",
                event.index,
                values.len()
            )));
        }
    }

    let annualize = (1.0 / returns.dt()).sqrt();
    let mut clamped = false;
    let mut out = Vec::with_capacity(values.len());

    for i in 0..values.len() {
        let augmented = events
            .iter()
            .any(|event| event.index <= i && i < event.index + hold);
        let window = if augmented {
            if augmented_window > i + 1 {
                clamped = true;
            }
            augmented_window
        } else {
            base_window
        };
        // Same arithmetic as sliding_variance so the no-event case is
        // bit-identical to the raw pipeline.
        let mut variance = windowed_covariance_at(values, values, i, window);
        if variance < 0.0 {
            if variance >= -VARIANCE_CLAMP {
                variance = 0.0;
            } else {
                return Err(Error::NegativeVariance {
                    index: i,
                    value: variance,
                });
            }
        }
        out.push(variance.sqrt() * annualize);
    }

    Ok(VolatilitySeries {
        values: out,
        method: VolMethod::TimeScaled {
            augmented_window,
            hold,
            clamped,
        },
        base_window,
    })
}

fn validate_window(window: usize, len: usize) -> Result<()> {
    if window == 0 {
        return Err(Error::InvalidParameter(
            "window must be at least 1".to_owned(),
        ));
    }
    if window > len {
        return Err(Error::WindowTooLarge { window, len });
    }
    Ok(())
}

/// Median by partial selection; scrambles the buffer.
fn median_in_place(buf: &mut [f64]) -> f64 {
    let n = buf.len();
    debug_assert!(n > 0);
    let mid = n / 2;
    let (left, upper, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = left.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::DEFAULT_DT;

    fn returns(values: &[f64]) -> ReturnSeries {
        ReturnSeries::new(values.to_vec(), DEFAULT_DT).expect("valid test returns")
    }

    /// Two-pass centered covariance over each trailing window: the
    /// independent oracle for the one-pass moment formula.
    fn brute_covariance(s1: &[f64], s2: &[f64], window: usize, i: usize) -> f64 {
        let lo = (i + 1).saturating_sub(window);
        let a = &s1[lo..=i];
        let b = &s2[lo..=i];
        let n = a.len() as f64;
        let mean_a = a.iter().sum::<f64>() / n;
        let mean_b = b.iter().sum::<f64>() / n;
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x - mean_a) * (y - mean_b))
            .sum::<f64>()
            / n
    }

    const SAMPLE_A: [f64; 10] = [0.3, -0.1, 0.25, 0.4, -0.2, 0.05, 0.6, -0.35, 0.15, 0.0];
    const SAMPLE_B: [f64; 10] = [1.2, 0.8, 1.1, 0.9, 1.3, 0.7, 1.4, 0.6, 1.0, 1.15];

    #[test]
    fn covariance_with_constant_is_zero() {
        let constant = [2.5; 10];
        let cov = sliding_covariance(&SAMPLE_A, &constant, 4).unwrap();
        assert!(cov.iter().all(|&v| v.abs() <= 1e-12));
    }

    #[test]
    fn covariance_of_series_with_itself_is_variance() {
        let cov = sliding_covariance(&SAMPLE_A, &SAMPLE_A, 5).unwrap();
        let var = sliding_variance(&SAMPLE_A, 5).unwrap();
        assert_eq!(cov, var);
    }

    #[test]
    fn covariance_matches_brute_force_oracle() {
        for window in [1, 3, 4, 10] {
            let cov = sliding_covariance(&SAMPLE_A, &SAMPLE_B, window).unwrap();
            for (i, &value) in cov.iter().enumerate() {
                let oracle = brute_covariance(&SAMPLE_A, &SAMPLE_B, window, i);
                assert!(
                    (value - oracle).abs() <= 1e-12,
                    "window {window} index {i}: {value} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn covariance_validates_inputs() {
        assert!(matches!(
            sliding_covariance(&SAMPLE_A, &SAMPLE_B[..5], 3).unwrap_err(),
            Error::LengthMismatch { left: 10, right: 5 }
        ));
        assert!(matches!(
            sliding_covariance(&SAMPLE_A, &SAMPLE_B, 11).unwrap_err(),
            Error::WindowTooLarge { window: 11, len: 10 }
        ));
        assert!(sliding_covariance(&SAMPLE_A, &SAMPLE_B, 0).is_err());
    }

    #[test]
    fn variance_of_constant_is_zero() {
        let var = sliding_variance(&[3.0; 8], 4).unwrap();
        assert!(var.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn variance_of_alternating_signs_is_one() {
        let s: Vec<f64> = (0..12).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let var = sliding_variance(&s, 4).unwrap();
        // Steady state on an even window: mean 0, squares 1.
        for &v in &var[3..] {
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn variance_matches_brute_force_oracle() {
        let s: Vec<f64> = (0..20)
            .map(|i| ((i * 37 % 11) as f64 - 5.0) * 0.13 + (i as f64 * 0.71).sin())
            .collect();
        let var = sliding_variance(&s, 7).unwrap();
        for (i, &value) in var.iter().enumerate() {
            let oracle = brute_covariance(&s, &s, 7, i);
            assert!((value - oracle).abs() <= 1e-10, "index {i}");
        }
    }

    #[test]
    fn volatility_is_square_root_of_variance() {
        let var = sliding_variance(&SAMPLE_A, 5).unwrap();
        let vol = sliding_volatility(&SAMPLE_A, 5).unwrap();
        for (v, s) in var.iter().zip(&vol) {
            assert_eq!(v.sqrt(), *s);
        }
    }

    #[test]
    fn annualized_volatility_of_constant_returns_is_zero() {
        let r = returns(&[0.01; 30]);
        let vol = annualized_volatility(&r, 10).unwrap();
        assert!(vol.values().iter().all(|&v| v == 0.0));
        assert_eq!(vol.method().tag(), "raw");
        assert_eq!(vol.base_window(), 10);
    }

    #[test]
    fn annualized_volatility_matches_annualization_factor() {
        // Alternating returns of +-0.01 have per-window standard deviation
        // exactly 0.01 on an even window; annualized on the daily grid this
        // is 0.01 * sqrt(255) ~= 0.1597.
        let r: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { 0.01 } else { -0.01 }).collect();
        let vol = annualized_volatility(&returns(&r), 10).unwrap();
        let expected = 0.01 * 255.0_f64.sqrt();
        assert!((expected - 0.1597).abs() < 1e-4);
        for &v in &vol.values()[9..] {
            assert!((v - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn annualized_volatility_rejects_small_window() {
        let r = returns(&[0.0; 10]);
        assert!(annualized_volatility(&r, 1).is_err());
        assert!(annualized_volatility(&r, 0).is_err());
    }

    #[test]
    fn lowpass_alpha_one_is_identity() {
        let r = returns(&SAMPLE_A);
        let vol = annualized_volatility(&r, 3).unwrap();
        let filtered = lowpass_filter(&vol, 1.0).unwrap();
        assert_eq!(filtered.values(), vol.values());
        assert_eq!(filtered.method().tag(), "filtered");
    }

    #[test]
    fn lowpass_preserves_constants() {
        let vol = VolatilitySeries::constant(0.2, 25).unwrap();
        let filtered = lowpass_filter(&vol, 0.3).unwrap();
        for &v in filtered.values() {
            assert!((v - 0.2).abs() <= 1e-15);
        }
    }

    #[test]
    fn lowpass_step_response_closed_form() {
        // [DERIVED] With the y[0] = x[0] seeding, a step that rises at
        // i = 1 with alpha = 0.2 solves to y[k] = 1 - 0.8^k.
        let mut values = vec![1.0; 20];
        values[0] = 0.0;
        let vol = VolatilitySeries::new(values, VolMethod::Raw, 10).unwrap();
        let filtered = lowpass_filter(&vol, 0.2).unwrap();
        for (k, &v) in filtered.values().iter().enumerate() {
            let expected = 1.0 - 0.8_f64.powi(k as i32);
            assert!((v - expected).abs() <= 1e-12, "k = {k}");
        }
    }

    #[test]
    fn lowpass_validates_alpha() {
        let vol = VolatilitySeries::constant(0.2, 5).unwrap();
        for bad in [0.0, -0.5, 1.5, f64::NAN] {
            assert!(lowpass_filter(&vol, bad).is_err());
        }
    }

    #[test]
    fn detector_is_quiet_on_zero_returns() {
        let r = returns(&[0.0; 200]);
        let events = detect_change_points(&r, 5.0, 0.5).unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn detector_flags_single_outlier_immediately() {
        let mut vals = vec![0.0; 120];
        vals[60] = 20.0;
        // The scale is floored (zero MAD), so z is enormous at the outlier.
        let events = detect_change_points(&returns(&vals), 5.0, 0.5).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].index, 60);
        assert_eq!(events[0].direction, Direction::Up);
        assert!(events[0].statistic > 5.0);
        assert!(events[0].degenerate_scale);
    }

    #[test]
    fn detector_direction_follows_sign() {
        // Noisy-but-tame base so the scale is healthy, then a big drop.
        let mut vals: Vec<f64> = (0..100)
            .map(|i| if i % 2 == 0 { 0.01 } else { -0.01 })
            .collect();
        vals[80] = -0.5;
        let events = detect_change_points(&returns(&vals), 8.0, 0.5).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].index, 80);
        assert_eq!(events[0].direction, Direction::Down);
        assert!(!events[0].degenerate_scale);
        assert!(events[0].statistic > 8.0);
    }

    #[test]
    fn detector_validates_parameters() {
        let r = returns(&[0.0; 10]);
        assert!(detect_change_points(&r, 0.0, 0.5).is_err());
        assert!(detect_change_points(&r, -1.0, 0.5).is_err());
        assert!(detect_change_points(&r, 5.0, -0.1).is_err());
    }

    #[test]
    fn time_scaled_equals_raw_without_events() {
        let vals: Vec<f64> = (0..200).map(|i| ((i as f64) * 0.37).sin() * 0.02).collect();
        let r = returns(&vals);
        let raw = annualized_volatility(&r, 10).unwrap();
        let scaled = time_scaled_volatility(&r, &[], 10, 50, 50).unwrap();
        // Bit-for-bit: identical arithmetic path.
        assert_eq!(raw.values(), scaled.values());
        match scaled.method() {
            VolMethod::TimeScaled { clamped, .. } => assert!(!clamped),
            other => panic!("unexpected method {other:?}"),
        }
    }

    #[test]
    fn time_scaled_constant_returns_stay_zero() {
        let r = returns(&[0.004; 120]);
        let events = vec![ChangePointEvent {
            index: 40,
            statistic: 9.0,
            direction: Direction::Down,
            degenerate_scale: false,
        }];
        let scaled = time_scaled_volatility(&r, &events, 10, 50, 50).unwrap();
        assert!(scaled.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn time_scaled_window_switches_and_clamps() {
        // An event early enough that the augmented window cannot be filled.
        let vals: Vec<f64> = (0..80).map(|i| ((i * 13 % 7) as f64 - 3.0) * 0.01).collect();
        let r = returns(&vals);
        let events = vec![ChangePointEvent {
            index: 20,
            statistic: 9.0,
            direction: Direction::Up,
            degenerate_scale: false,
        }];
        let scaled = time_scaled_volatility(&r, &events, 10, 50, 30).unwrap();
        match scaled.method() {
            VolMethod::TimeScaled {
                augmented_window,
                hold,
                clamped,
            } => {
                assert_eq!(*augmented_window, 50);
                assert_eq!(*hold, 30);
                assert!(*clamped);
            }
            other => panic!("unexpected method {other:?}"),
        }
        // Inside the hold the value differs from raw; outside it matches.
        let raw = annualized_volatility(&r, 10).unwrap();
        assert_ne!(scaled.values()[25], raw.values()[25]);
        assert_eq!(scaled.values()[10], raw.values()[10]);
        assert_eq!(scaled.values()[55], raw.values()[55]);
    }

    #[test]
    fn time_scaled_validates_parameters() {
        let r = returns(&[0.0; 60]);
        assert!(time_scaled_volatility(&r, &[], 1, 50, 50).is_err());
        assert!(time_scaled_volatility(&r, &[], 10, 10, 50).is_err());
        assert!(time_scaled_volatility(&r, &[], 10, 50, 0).is_err());
        let bad_event = vec![ChangePointEvent {
            index: 60,
            statistic: 9.0,
            direction: Direction::Up,
            degenerate_scale: false,
        }];
        assert!(time_scaled_volatility(&r, &bad_event, 10, 50, 50).is_err());
    }

    #[test]
    fn median_handles_even_and_odd() {
        let mut odd = [5.0, 1.0, 3.0];
        assert_eq!(median_in_place(&mut odd), 3.0);
        let mut even = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(median_in_place(&mut even), 2.5);
        let mut single = [7.0];
        assert_eq!(median_in_place(&mut single), 7.0);
    }
}
