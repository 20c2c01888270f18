//! Tracking-control delta hedging: one long call valued on the trend, a
//! short position in the underlying sized so the trend-valued portfolio
//! tracks a risk-free growth path, plus a self-financing cash ledger that
//! marks the same strategy in the raw market.
//!
//! The hedge ratio is defined by forcing the trend portfolio
//! `V(t) - delta(t) * s_trend(t)` onto the curve `pi0 * e^{r t}`:
//!
//! ```text
//! delta(t) = (V(t) - pi0 e^{r t}) / s_trend(t)
//! ```
//!
//! seeded at `t = 0` by matching growth rates instead (both sides of the
//! portfolio must grow at `r`):
//!
//! ```text
//! delta(0) = (V'(0) - r V(0)) / (s_trend'(0) - r s_trend(0))
//! ```
//!
//! The trend quantities drive the decisions; execution happens at raw
//! prices, and both views are reported side by side so the approximation
//! gap stays visible.

use crate::error::{Error, Result};
use crate::pricing::{price_call_trend, CallQuote, EuropeanCallSpec};
use crate::stats::VolatilitySeries;
use crate::timeseries::PriceSeries;
use crate::trend::TrendDecomposition;

/// Which volatility series drives the option valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolSource {
    /// Rolling annualized volatility.
    Raw,
    /// Low-pass-filtered volatility.
    Filtered,
    /// Change-point-adaptive volatility.
    TimeScaled,
}

impl VolSource {
    /// Short lowercase tag for reports.
    pub fn tag(&self) -> &'static str {
        match self {
            VolSource::Raw => "raw",
            VolSource::Filtered => "filtered",
            VolSource::TimeScaled => "time_scaled",
        }
    }
}

/// Configuration of one hedging backtest.
#[derive(Debug, Clone, PartialEq)]
pub struct HedgeConfig {
    /// The option being hedged.
    pub spec: EuropeanCallSpec,
    /// Which volatility series the caller fed in (recorded for reports).
    pub vol_source: VolSource,
    /// Rebalance cadence in steps (1 = every step).
    pub rebalance_every: usize,
    /// Relative tolerance deciding when the initial-delta denominator is
    /// degenerate.
    pub epsilon_denominator: f64,
}

impl HedgeConfig {
    /// Default cadence (every step) and degeneracy tolerance (1e-8).
    pub fn new(spec: EuropeanCallSpec, vol_source: VolSource) -> Self {
        Self {
            spec,
            vol_source,
            rebalance_every: 1,
            epsilon_denominator: 1e-8,
        }
    }
}

/// One step of a hedging backtest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HedgeStep {
    /// Step index from 0 to maturity.
    pub t_index: usize,
    /// Option value V(t), priced on the trend.
    pub option_value: f64,
    /// Trend level at this step.
    pub s_trend: f64,
    /// Hedge ratio in force at this step.
    pub delta: f64,
    /// Target portfolio `pi0 * e^{r t}`.
    pub pi_target: f64,
    /// Realized portfolio: option value minus the short stock position at
    /// the raw price plus the cash account.
    pub pi_realized: f64,
    /// `V - delta*s_trend - pi_target`: zero at every rebalance step.
    pub tracking_residual: f64,
}

/// Full record of one backtest, step 0 through maturity.
#[derive(Debug, Clone, PartialEq)]
pub struct HedgeTrace {
    steps: Vec<HedgeStep>,
    pi_trend_0: f64,
    delta_0: f64,
}

impl HedgeTrace {
    /// Per-step records; length is `maturity_index + 1`.
    pub fn steps(&self) -> &[HedgeStep] {
        &self.steps
    }

    /// Initial trend portfolio `V(0) - delta(0)*s_trend(0)`.
    pub fn pi_trend_0(&self) -> f64 {
        self.pi_trend_0
    }

    /// Hedge ratio seeded at step 0.
    pub fn delta_0(&self) -> f64 {
        self.delta_0
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Whether the trace is empty (never true after a successful run).
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// The rate-matching initial hedge ratio
/// `(v0_dot - r v0) / (s_trend0_dot - r s_trend0)`.
///
/// Fails with [`Error::DegenerateInitialization`] when the denominator
/// vanishes relative to `eps * |r * s_trend0|` (the trend initially grows
/// at the risk-free rate, so no finite ratio matches the growth), or when
/// it is exactly zero.
pub fn initial_delta(
    v0: f64,
    v0_dot: f64,
    s_trend0: f64,
    s_trend0_dot: f64,
    r: f64,
    eps: f64,
) -> Result<f64> {
    for (name, value) in [
        ("v0", v0),
        ("v0_dot", v0_dot),
        ("s_trend0_dot", s_trend0_dot),
        ("r", r),
    ] {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{name} must be finite, got {value}"
            )));
        }
    }
    if !s_trend0.is_finite() || s_trend0 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "s_trend0 must be strictly positive and finite, got {s_trend0}"
        )));
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eps must be strictly positive and finite, got {eps}"
        )));
    }

    let denominator = s_trend0_dot - r * s_trend0;
    if denominator == 0.0 || denominator.abs() < eps * (r * s_trend0).abs() {
        return Err(Error::DegenerateInitialization);
    }
    Ok((v0_dot - r * v0) / denominator)
}

/// The tracking hedge ratio `(v_t - pi0 e^{r t}) / s_trend_t`.
pub fn delta_at(v_t: f64, pi0: f64, r: f64, t_years: f64, s_trend_t: f64) -> Result<f64> {
    if !s_trend_t.is_finite() || s_trend_t <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "s_trend_t must be strictly positive and finite, got {s_trend_t}"
        )));
    }
    Ok((v_t - pi0 * (r * t_years).exp()) / s_trend_t)
}

/// Runs one hedging backtest from step 0 to maturity.
///
/// Requirements: `decomposition` and `vols` computed from `prices` (equal
/// lengths and grid; the volatility series must cover every step up to
/// maturity), `maturity_index < prices.len()`, and a strictly positive
/// trend over the hedged span.
///
/// Valuation: `V(t) = price_call_trend(s_trend[t], spec, vols[t], tau(t))`.
/// The ratio is seeded by [`initial_delta`] with the chain-rule growth
/// `V'(0) = theta(0) + delta_bs(0) * s_trend'(0)`, then refreshed from
/// [`delta_at`] every `rebalance_every` steps and held in between. The
/// cash ledger starts at zero, accrues at `r` each step, and pays or
/// receives rebalancing trades at the raw price, making `pi_realized`
/// self-financing.
pub fn run_backtest(
    prices: &PriceSeries,
    decomposition: &TrendDecomposition,
    vols: &VolatilitySeries,
    config: &HedgeConfig,
) -> Result<HedgeTrace> {
    let spec = &config.spec;
    let raw = prices.values();
    let trend = decomposition.trend();
    let maturity = spec.maturity_index;

    if trend.len() != raw.len() {
        return Err(Error::LengthMismatch {
            left: trend.len(),
            right: raw.len(),
        });
    }
    if maturity >= raw.len() {
        return Err(Error::InvalidParameter(format!(
            "maturity_index {maturity} must be below the series length {}",
            raw.len()
        )));
    }
    if vols.len() <= maturity {
        return Err(Error::VolIndexOutOfRange {
            index: maturity,
            len: vols.len(),
        });
    }
    if config.rebalance_every == 0 {
        return Err(Error::InvalidParameter(
            "rebalance_every must be at least 1".to_owned(),
        ));
    }
    if spec.dt != prices.dt() {
        return Err(Error::InvalidParameter(format!(
            "contract dt {} does not match the series dt {}",
            spec.dt,
            prices.dt()
        )));
    }
    for (index, &level) in trend.iter().enumerate().take(maturity + 1) {
        if !level.is_finite() || level <= 0.0 {
            return Err(Error::NonPositiveTrend {
                index,
                value: level,
            });
        }
    }

    let sigmas = vols.values();
    let quotes: Vec<CallQuote> = (0..=maturity)
        .map(|t| price_call_trend(trend[t], spec, sigmas[t], spec.tau_at(t)))
        .collect();

    let s_trend_dot_0 = decomposition.trend_deriv()[0];
    let v0_dot = quotes[0].theta + quotes[0].delta_bs * s_trend_dot_0;
    let delta_0 = initial_delta(
        quotes[0].value,
        v0_dot,
        trend[0],
        s_trend_dot_0,
        spec.rate,
        config.epsilon_denominator,
    )?;
    let pi_trend_0 = quotes[0].value - delta_0 * trend[0];

    let step_growth = (spec.rate * spec.dt).exp();
    let mut cash = 0.0_f64;
    let mut delta = delta_0;
    let mut steps = Vec::with_capacity(maturity + 1);

    for (t, quote) in quotes.iter().enumerate() {
        let t_years = t as f64 * spec.dt;
        let pi_target = pi_trend_0 * (spec.rate * t_years).exp();

        if t > 0 {
            cash *= step_growth;
            if t % config.rebalance_every == 0 {
                let refreshed = delta_at(quote.value, pi_trend_0, spec.rate, t_years, trend[t])?;
                // Enlarging the short position sells shares: cash comes in
                // at the raw price (and vice versa).
                cash += (refreshed - delta) * raw[t];
                delta = refreshed;
            }
        }

        steps.push(HedgeStep {
            t_index: t,
            option_value: quote.value,
            s_trend: trend[t],
            delta,
            pi_target,
            pi_realized: quote.value - delta * raw[t] + cash,
            tracking_residual: quote.value - delta * trend[t] - pi_target,
        });
    }

    Ok(HedgeTrace {
        steps,
        pi_trend_0,
        delta_0,
    })
}

/// Summary statistics of one backtest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HedgeMetrics {
    /// Largest single-step change of the hedge ratio.
    pub max_delta_step: f64,
    /// Total variation of the hedge ratio over the run.
    pub delta_total_variation: f64,
    /// Root-mean-square gap between realized and target portfolio.
    pub pnl_rms_error: f64,
    /// `pi_target - pi_realized` at maturity (positive = shortfall).
    pub terminal_shortfall: f64,
}

/// Computes the summary statistics of a trace.
pub fn hedge_metrics(trace: &HedgeTrace) -> HedgeMetrics {
    let steps = trace.steps();
    let mut max_delta_step = 0.0_f64;
    let mut delta_total_variation = 0.0_f64;
    for pair in steps.windows(2) {
        let step = (pair[1].delta - pair[0].delta).abs();
        max_delta_step = max_delta_step.max(step);
        delta_total_variation += step;
    }
    let sum_sq: f64 = steps
        .iter()
        .map(|s| {
            let gap = s.pi_realized - s.pi_target;
            gap * gap
        })
        .sum();
    let pnl_rms_error = (sum_sq / steps.len() as f64).sqrt();
    let last = steps.last().expect("a trace is never empty");
    HedgeMetrics {
        max_delta_step,
        delta_total_variation,
        pnl_rms_error,
        terminal_shortfall: last.pi_target - last.pi_realized,
    }
}
