//! Pipeline orchestration: obtain the price series, run the analysis
//! chain, and write the per-stage export files.

use std::path::Path;

use trendhedge::hedging::{hedge_metrics, run_backtest, HedgeConfig, HedgeTrace, VolSource};
use trendhedge::pricing::{price_call_trend, strike_from_offset, EuropeanCallSpec};
use trendhedge::stats::{
    annualized_volatility, detect_change_points, lowpass_filter, time_scaled_volatility,
    ChangePointEvent, VolatilitySeries,
};
use trendhedge::timeseries::{
    load_csv, log_returns, simulate_gbm, ColumnSelector, GbmParams, PriceSeries, ReturnSeries,
    DEFAULT_DT,
};
use trendhedge::trend::{estimate_trend, moving_average, TrendDecomposition};

use crate::config::RunConfig;
use crate::output::{csv_table, fmt_f, write_atomic};
use crate::{CliError, Result};

/// Everything the export stages read: the source series and the full
/// analysis chain computed on its post-`start_index` slice.
#[derive(Debug)]
pub struct Artifacts {
    /// The full input path (simulated or loaded), before slicing.
    pub source: PriceSeries,
    /// The analyzed slice, starting at `start_index`.
    pub prices: PriceSeries,
    /// Trend decomposition of the slice.
    pub decomposition: TrendDecomposition,
    /// Plain trailing moving average, for comparison plots.
    pub moving_average: Vec<f64>,
    /// Log returns of the slice (one shorter than the prices).
    pub returns: ReturnSeries,
    /// Rolling annualized volatility.
    pub vol_raw: VolatilitySeries,
    /// Low-pass-filtered volatility.
    pub vol_filtered: VolatilitySeries,
    /// Detected change-points.
    pub events: Vec<ChangePointEvent>,
    /// Change-point-adaptive volatility.
    pub vol_time_scaled: VolatilitySeries,
}

/// The option contract derived from a configuration and an analyzed
/// series: the strike set `k_pct` percent above the initial trend.
#[derive(Debug, Clone)]
pub struct Contract {
    /// Strike level.
    pub strike: f64,
    /// The full call specification.
    pub spec: EuropeanCallSpec,
}

/// Obtains the source series: loads the input file when one is
/// configured, otherwise simulates a seeded path; then applies the
/// optional persistent percentage jump.
pub fn source_series(config: &RunConfig) -> Result<PriceSeries> {
    let base = match &config.input {
        Some(path) => load_csv(path, &ColumnSelector::Auto)?,
        None => simulate_gbm(&GbmParams {
            s0: config.s0,
            mu: config.mu,
            sigma: config.sigma,
            n_steps: config.n_steps,
            dt: DEFAULT_DT,
            seed: config.seed,
        })?,
    };

    if config.jump_pct == 0.0 {
        return Ok(base);
    }
    let index = config.jump_index.ok_or_else(|| {
        CliError::Config("jump_pct is set but jump_index is not".to_owned())
    })?;
    if index >= base.len() {
        return Err(CliError::Config(format!(
            "jump_index {index} is outside the series (length {})",
            base.len()
        )));
    }
    let factor = 1.0 + config.jump_pct / 100.0;
    if !factor.is_finite() || factor <= 0.0 {
        return Err(CliError::Config(format!(
            "jump_pct must stay above -100, got {}",
            config.jump_pct
        )));
    }
    let values = base
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| if i >= index { v * factor } else { v })
        .collect();
    Ok(PriceSeries::new(values, base.dt())?)
}

/// Runs the full analysis chain on the configured series.
pub fn build_artifacts(config: &RunConfig) -> Result<Artifacts> {
    let source = source_series(config)?;
    let prices = source.slice_from(config.start_index)?;
    let decomposition = estimate_trend(&prices, config.window_trend, config.degree)?;
    let moving_average = moving_average(&prices, config.window_trend)?;
    let returns = log_returns(&prices);
    let vol_raw = annualized_volatility(&returns, config.vol_window)?;
    let vol_filtered = lowpass_filter(&vol_raw, config.alpha)?;
    let events = detect_change_points(&returns, config.cpd_threshold, config.cpd_drift)?;
    let vol_time_scaled = time_scaled_volatility(
        &returns,
        &events,
        config.vol_window,
        config.augmented_window,
        config.hold,
    )?;
    Ok(Artifacts {
        source,
        prices,
        decomposition,
        moving_average,
        returns,
        vol_raw,
        vol_filtered,
        events,
        vol_time_scaled,
    })
}

/// Derives the option contract for an analyzed series.
pub fn contract(config: &RunConfig, artifacts: &Artifacts) -> Result<Contract> {
    if config.maturity >= artifacts.prices.len() {
        return Err(CliError::Config(format!(
            "maturity {} needs {} samples after start_index {}, but only {} are available",
            config.maturity,
            config.maturity + 1,
            config.start_index,
            artifacts.prices.len()
        )));
    }
    let strike = strike_from_offset(
        artifacts.decomposition.trend()[0],
        config.k_pct,
        config.maturity,
        DEFAULT_DT,
    )?;
    let spec = EuropeanCallSpec::new(strike, config.maturity, config.r, DEFAULT_DT)?;
    Ok(Contract { strike, spec })
}

/// Aligns a return-indexed volatility series to price steps: step 0
/// reuses the first estimate, step t > 0 uses the estimate from return
/// t - 1 (the newest one available at that step).
pub fn align_to_prices(vol: &VolatilitySeries) -> VolatilitySeries {
    let mut values = Vec::with_capacity(vol.len() + 1);
    values.push(vol.values()[0]);
    values.extend_from_slice(vol.values());
    VolatilitySeries::new(values, vol.method().clone(), vol.base_window())
        .expect("aligned copy of a valid series")
}

/// Writes path.csv: the source series with opaque step labels.
pub fn write_path_csv(dir: &Path, source: &PriceSeries) -> Result<()> {
    let values = source.values();
    let table = csv_table("date,close", values.len(), |i| {
        format!("{i},{}", fmt_f(values[i]))
    });
    write_atomic(dir, "path.csv", &table)?;
    Ok(())
}

/// Writes trend.csv: price, moving average, trend, and fluctuation per
/// step.
pub fn write_trend_csv(dir: &Path, artifacts: &Artifacts) -> Result<()> {
    let prices = artifacts.prices.values();
    let d = &artifacts.decomposition;
    let table = csv_table(
        "index,price,moving_average,trend,fluct",
        prices.len(),
        |i| {
            format!(
                "{i},{},{},{},{}",
                fmt_f(prices[i]),
                fmt_f(artifacts.moving_average[i]),
                fmt_f(d.trend()[i]),
                fmt_f(d.fluct()[i])
            )
        },
    );
    write_atomic(dir, "trend.csv", &table)?;
    Ok(())
}

/// Writes vol.csv (per return step) and changepoints.csv.
pub fn write_vol_csvs(dir: &Path, artifacts: &Artifacts) -> Result<()> {
    let returns = artifacts.returns.values();
    let table = csv_table(
        "index,log_return,vol_raw,vol_filtered,vol_time_scaled",
        returns.len(),
        |i| {
            format!(
                "{i},{},{},{},{}",
                fmt_f(returns[i]),
                fmt_f(artifacts.vol_raw.values()[i]),
                fmt_f(artifacts.vol_filtered.values()[i]),
                fmt_f(artifacts.vol_time_scaled.values()[i])
            )
        },
    );
    write_atomic(dir, "vol.csv", &table)?;

    let events = &artifacts.events;
    let table = csv_table("index,statistic,direction", events.len(), |i| {
        format!(
            "{},{},{}",
            events[i].index,
            fmt_f(events[i].statistic),
            events[i].direction
        )
    });
    write_atomic(dir, "changepoints.csv", &table)?;
    Ok(())
}

/// Writes calls.csv: per-step quotes under each volatility variant.
pub fn write_calls_csv(dir: &Path, artifacts: &Artifacts, contract: &Contract) -> Result<()> {
    let trend = artifacts.decomposition.trend();
    let vols: Vec<VolatilitySeries> = [
        &artifacts.vol_raw,
        &artifacts.vol_filtered,
        &artifacts.vol_time_scaled,
    ]
    .into_iter()
    .map(align_to_prices)
    .collect();
    let spec = &contract.spec;
    let table = csv_table(
        "index,tau,strike,call_raw,call_filtered,call_time_scaled",
        spec.maturity_index + 1,
        |t| {
            let tau = spec.tau_at(t);
            let quote =
                |vol: &VolatilitySeries| price_call_trend(trend[t], spec, vol.values()[t], tau);
            format!(
                "{t},{},{},{},{},{}",
                fmt_f(tau),
                fmt_f(contract.strike),
                fmt_f(quote(&vols[0]).value),
                fmt_f(quote(&vols[1]).value),
                fmt_f(quote(&vols[2]).value)
            )
        },
    );
    write_atomic(dir, "calls.csv", &table)?;
    Ok(())
}

/// The three hedging backtests of one run, in report order.
pub struct HedgeRuns {
    /// (source, trace) per volatility variant.
    pub runs: Vec<(VolSource, HedgeTrace)>,
}

/// Runs the backtest under each volatility variant.
pub fn run_hedges(
    config: &RunConfig,
    artifacts: &Artifacts,
    contract: &Contract,
) -> Result<HedgeRuns> {
    let sources = [
        (VolSource::Raw, &artifacts.vol_raw),
        (VolSource::Filtered, &artifacts.vol_filtered),
        (VolSource::TimeScaled, &artifacts.vol_time_scaled),
    ];
    let mut runs = Vec::with_capacity(sources.len());
    for (source, vol) in sources {
        let mut hedge_config = HedgeConfig::new(contract.spec.clone(), source);
        hedge_config.rebalance_every = config.rebalance_every;
        let trace = run_backtest(
            &artifacts.prices,
            &artifacts.decomposition,
            &align_to_prices(vol),
            &hedge_config,
        )?;
        runs.push((source, trace));
    }
    Ok(HedgeRuns { runs })
}

/// Writes hedge.csv (shared index and trend, then one column group per
/// volatility variant) and metrics.json.
pub fn write_hedge_files(dir: &Path, hedges: &HedgeRuns) -> Result<()> {
    let mut header = String::from("index,s_trend");
    for (source, _) in &hedges.runs {
        let tag = source.tag();
        header.push_str(&format!(
            ",V_{tag},delta_{tag},pi_target_{tag},pi_realized_{tag},tracking_residual_{tag}"
        ));
    }
    let rows = hedges.runs[0].1.len();
    let table = csv_table(&header, rows, |t| {
        let mut line = format!("{t},{}", fmt_f(hedges.runs[0].1.steps()[t].s_trend));
        for (_, trace) in &hedges.runs {
            let step = &trace.steps()[t];
            line.push_str(&format!(
                ",{},{},{},{},{}",
                fmt_f(step.option_value),
                fmt_f(step.delta),
                fmt_f(step.pi_target),
                fmt_f(step.pi_realized),
                fmt_f(step.tracking_residual)
            ));
        }
        line
    });
    write_atomic(dir, "hedge.csv", &table)?;

    let mut metrics = serde_json::Map::new();
    for (source, trace) in &hedges.runs {
        let m = hedge_metrics(trace);
        metrics.insert(
            source.tag().to_owned(),
            serde_json::json!({
                "max_delta_step": m.max_delta_step,
                "delta_total_variation": m.delta_total_variation,
                "pnl_rms_error": m.pnl_rms_error,
                "terminal_shortfall": m.terminal_shortfall,
            }),
        );
    }
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(metrics))
        .expect("metrics are plain numbers");
    text.push('\n');
    write_atomic(dir, "metrics.json", &text)?;
    Ok(())
}

/// `simulate`: write the source path.
pub fn cmd_simulate(config: &RunConfig) -> Result<()> {
    let source = source_series(config)?;
    write_path_csv(&config.output_dir, &source)
}

/// `trend`: write the decomposition.
pub fn cmd_trend(config: &RunConfig) -> Result<()> {
    let artifacts = build_artifacts(config)?;
    write_trend_csv(&config.output_dir, &artifacts)
}

/// `vol`: write the volatility pipeline and detected change-points.
pub fn cmd_vol(config: &RunConfig) -> Result<()> {
    let artifacts = build_artifacts(config)?;
    write_vol_csvs(&config.output_dir, &artifacts)
}

/// `price`: write the per-step call quotes.
pub fn cmd_price(config: &RunConfig) -> Result<()> {
    let artifacts = build_artifacts(config)?;
    let contract = contract(config, &artifacts)?;
    write_calls_csv(&config.output_dir, &artifacts, &contract)
}

/// `hedge`: write the backtests and their metrics.
pub fn cmd_hedge(config: &RunConfig) -> Result<()> {
    let artifacts = build_artifacts(config)?;
    let contract = contract(config, &artifacts)?;
    let hedges = run_hedges(config, &artifacts, &contract)?;
    write_hedge_files(&config.output_dir, &hedges)
}

/// `all`: every stage on one shared analysis.
pub fn cmd_all(config: &RunConfig) -> Result<()> {
    let artifacts = build_artifacts(config)?;
    let dir = &config.output_dir;
    write_path_csv(dir, &artifacts.source)?;
    write_trend_csv(dir, &artifacts)?;
    write_vol_csvs(dir, &artifacts)?;
    let contract = contract(config, &artifacts)?;
    write_calls_csv(dir, &artifacts, &contract)?;
    let hedges = run_hedges(config, &artifacts, &contract)?;
    write_hedge_files(dir, &hedges)
}
