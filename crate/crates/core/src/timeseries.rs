//! Price series: construction, CSV ingestion, log returns, and a seeded
//! geometric Brownian motion simulator.
//!
//! A [`PriceSeries`] is the common currency of the crate: strictly positive,
//! finite samples on a uniform grid with spacing `dt` (in years). The default
//! grid is one trading day, with 255 trading days per year.

use std::fs;
use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// Trading days per year used to convert between daily and annual scales.
pub const TRADING_DAYS_PER_YEAR: f64 = 255.0;

/// Default grid spacing: one trading day, in years.
pub const DEFAULT_DT: f64 = 1.0 / TRADING_DAYS_PER_YEAR;

/// A uniformly sampled series of strictly positive prices.
///
/// Invariants, enforced on construction:
/// * at least two samples,
/// * every sample strictly positive and finite,
/// * `dt` strictly positive and finite.
///
/// `start_index` records how many leading samples of the original data were
/// skipped, so downstream reports can refer back to positions in the source.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    values: Vec<f64>,
    dt: f64,
    start_index: usize,
}

impl PriceSeries {
    /// Builds a series on the grid `dt`, starting at position 0.
    pub fn new(values: Vec<f64>, dt: f64) -> Result<Self> {
        Self::with_start_index(values, dt, 0)
    }

    /// Builds a series that starts `start_index` samples into its source.
    pub fn with_start_index(values: Vec<f64>, dt: f64, start_index: usize) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::SeriesTooShort {
                len: values.len(),
                min: 2,
            });
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "dt must be strictly positive and finite, got {dt}"
            )));
        }
        for (row, &value) in values.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::NonPositivePrice { row, value });
            }
        }
        Ok(Self {
            values,
            dt,
            start_index,
        })
    }

    /// The price samples.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grid spacing in years.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// How many samples of the original source precede this series.
    pub fn start_index(&self) -> usize {
        self.start_index
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false: the constructor requires at least two samples.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Drops the first `start` samples, keeping the grid and accumulating
    /// the start offset. The remainder must still hold two samples.
    pub fn slice_from(&self, start: usize) -> Result<Self> {
        if start + 2 > self.values.len() {
            return Err(Error::SeriesTooShort {
                len: self.values.len().saturating_sub(start),
                min: 2,
            });
        }
        Self::with_start_index(
            self.values[start..].to_vec(),
            self.dt,
            self.start_index + start,
        )
    }
}

/// A series of log returns on the same grid as the prices it came from.
///
/// Samples must be finite; the series may be any length ≥ 1. Sample `i` is
/// the return over the step from price `i` to price `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    values: Vec<f64>,
    dt: f64,
}

impl ReturnSeries {
    /// Builds a return series, checking that every sample is finite.
    pub fn new(values: Vec<f64>, dt: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SeriesTooShort { len: 0, min: 1 });
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "dt must be strictly positive and finite, got {dt}"
            )));
        }
        for (row, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "return {row} is not finite: {value}"
                )));
            }
        }
        Ok(Self { values, dt })
    }

    /// The return samples.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grid spacing in years.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Whether the series holds no samples (never true after construction).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Log returns of a price series: `out[i] = ln(s[i + 1] / s[i])`.
///
/// The result has one sample fewer than the input and lives on the same
/// grid. Prices are strictly positive by construction, so this cannot fail.
pub fn log_returns(series: &PriceSeries) -> ReturnSeries {
    let s = series.values();
    let values = s.windows(2).map(|p| (p[1] / p[0]).ln()).collect();
    ReturnSeries {
        values,
        dt: series.dt(),
    }
}

/// Which CSV column holds the prices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ColumnSelector {
    /// Use the last column. With a header, a column named `close` (any
    /// case) is preferred when present.
    #[default]
    Auto,
    /// Use the zero-based column at this position.
    Index(usize),
    /// Use the column with this header name (case-insensitive). Requires a
    /// header row.
    Name(String),
}

/// Loads a price series from a CSV file onto the default daily grid.
///
/// The format is deliberately forgiving:
/// * an optional single header row, detected by whether the selected field
///   of the first row parses as a number;
/// * fields separated by commas, surrounding whitespace ignored;
/// * blank lines skipped.
///
/// Every data row must supply a parsable, strictly positive price in the
/// selected column; offending rows are reported (with their zero-based data
/// row index), never silently dropped.
pub fn load_csv(path: impl AsRef<Path>, column: &ColumnSelector) -> Result<PriceSeries> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = raw.strip_prefix('\u{feff}').unwrap_or(&raw);

    let mut rows = text
        .lines()
        .map(str::trim_end)
        .filter(|line| !line.trim().is_empty());

    let first = match rows.next() {
        Some(line) => split_fields(line),
        None => return Err(Error::SeriesTooShort { len: 0, min: 2 }),
    };

    // Decide which column to read and whether the first row is a header.
    let (col, first_is_header) = match column {
        ColumnSelector::Name(name) => {
            let position = first
                .iter()
                .position(|field| field.eq_ignore_ascii_case(name))
                .ok_or_else(|| Error::ColumnNotFound(name.clone()))?;
            (position, true)
        }
        ColumnSelector::Index(index) => {
            if *index >= first.len() {
                return Err(Error::ColumnOutOfBounds {
                    row: 0,
                    index: *index,
                });
            }
            (*index, first[*index].parse::<f64>().is_err())
        }
        ColumnSelector::Auto => {
            let last = first.len() - 1;
            if first[last].parse::<f64>().is_ok() {
                (last, false)
            } else {
                // Header present: prefer a conventional close column,
                // otherwise keep the last one.
                let close = first
                    .iter()
                    .position(|field| field.eq_ignore_ascii_case("close"));
                (close.unwrap_or(last), true)
            }
        }
    };

    let mut values = Vec::new();
    let data_rows: Box<dyn Iterator<Item = Vec<&str>>> = if first_is_header {
        Box::new(rows.map(split_fields))
    } else {
        Box::new(std::iter::once(first).chain(rows.map(split_fields)))
    };

    for (row, fields) in data_rows.enumerate() {
        let field = fields
            .get(col)
            .ok_or(Error::ColumnOutOfBounds { row, index: col })?;
        let value: f64 = field.parse().map_err(|_| Error::UnparsablePrice {
            row,
            field: (*field).to_owned(),
        })?;
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::NonPositivePrice { row, value });
        }
        values.push(value);
    }

    PriceSeries::new(values, DEFAULT_DT)
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

/// Parameters of a geometric Brownian motion path.
///
/// The simulated path has `n_steps + 1` samples: the initial level plus one
/// sample per step. `mu` and `sigma` are annualized; `dt` is the grid
/// spacing in years.
#[derive(Debug, Clone, PartialEq)]
pub struct GbmParams {
    /// Initial level, strictly positive.
    pub s0: f64,
    /// Annualized drift.
    pub mu: f64,
    /// Annualized volatility, non-negative.
    pub sigma: f64,
    /// Number of steps to simulate, at least 1.
    pub n_steps: usize,
    /// Grid spacing in years.
    pub dt: f64,
    /// Seed for the deterministic random stream.
    pub seed: u64,
}

impl GbmParams {
    fn validate(&self) -> Result<()> {
        if !self.s0.is_finite() || self.s0 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "s0 must be strictly positive and finite, got {}",
                self.s0
            )));
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mu must be finite, got {}",
                self.mu
            )));
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma must be non-negative and finite, got {}",
                self.sigma
            )));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidParameter(
                "n_steps must be at least 1".to_owned(),
            ));
        }
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "dt must be strictly positive and finite, got {}",
                self.dt
            )));
        }
        Ok(())
    }
}

/// Simulates a geometric Brownian motion path with the exact lognormal
/// one-step update
///
/// ```text
/// s[k + 1] = s[k] * exp((mu - sigma^2 / 2) * dt + sigma * sqrt(dt) * z[k])
/// ```
///
/// where `z[k]` are independent standard normals from a seeded counter-based
/// generator. The path is a deterministic function of the parameters: equal
/// seeds give bit-identical paths.
pub fn simulate_gbm(params: &GbmParams) -> Result<PriceSeries> {
    params.validate()?;
    let step_drift = (params.mu - 0.5 * params.sigma * params.sigma) * params.dt;
    let step_scale = params.sigma * params.dt.sqrt();

    let mut normals = NormalSource::new(params.seed);
    let mut values = Vec::with_capacity(params.n_steps + 1);
    values.push(params.s0);
    for _ in 0..params.n_steps {
        let z = normals.next_normal();
        let last = *values.last().expect("path holds the initial level");
        values.push(last * (step_drift + step_scale * z).exp());
    }
    PriceSeries::new(values, params.dt)
}

/// Standard normal variates from a ChaCha12 stream via the Box-Muller
/// transform.
///
/// The mapping from raw 64-bit words to uniforms is spelled out here (rather
/// than delegated to a distributions library) so that the stream is a stable,
/// documented function of the seed:
///
/// * `u1 = ((x >> 11) + 1) * 2^-53` lies in `(0, 1]`, safe under `ln`;
/// * `u2 = (x >> 11) * 2^-53` lies in `[0, 1)`.
struct NormalSource {
    rng: ChaCha12Rng,
    spare: Option<f64>,
}

impl NormalSource {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * SCALE;
        let u2 = (self.rng.next_u64() >> 11) as f64 * SCALE;
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: &[f64]) -> PriceSeries {
        PriceSeries::new(values.to_vec(), DEFAULT_DT).expect("valid test series")
    }

    #[test]
    fn construction_rejects_short_series() {
        let err = PriceSeries::new(vec![1.0], DEFAULT_DT).unwrap_err();
        assert!(matches!(err, Error::SeriesTooShort { len: 1, min: 2 }));
    }

    #[test]
    fn construction_rejects_bad_prices() {
        for bad in [0.0, -3.0, f64::NAN, f64::INFINITY] {
            let err = PriceSeries::new(vec![1.0, bad, 2.0], DEFAULT_DT).unwrap_err();
            assert!(matches!(err, Error::NonPositivePrice { row: 1, .. }));
        }
    }

    #[test]
    fn construction_rejects_bad_dt() {
        for bad in [0.0, -1.0, f64::NAN] {
            assert!(PriceSeries::new(vec![1.0, 2.0], bad).is_err());
        }
    }

    #[test]
    fn slice_from_accumulates_offset() {
        let s = series(&[1.0, 2.0, 3.0, 4.0]);
        let tail = s.slice_from(2).unwrap();
        assert_eq!(tail.values(), &[3.0, 4.0]);
        assert_eq!(tail.start_index(), 2);
        let tail2 = tail.slice_from(0).unwrap();
        assert_eq!(tail2.start_index(), 2);
        assert!(s.slice_from(3).is_err());
    }

    #[test]
    fn log_returns_has_one_fewer_sample() {
        // [DERIVED] ln(1.01) from a high-precision evaluation.
        let s = series(&[100.0, 101.0, 101.0]);
        let r = log_returns(&s);
        assert_eq!(r.len(), 2);
        assert!((r.values()[0] - 0.009950330853168083).abs() < 1e-16);
        assert_eq!(r.values()[1], 0.0);
        assert_eq!(r.dt(), s.dt());
    }

    #[test]
    fn log_returns_reconstruct_prices() {
        let s = series(&[100.0, 103.0, 99.5, 104.25, 104.25]);
        let r = log_returns(&s);
        let mut level = s.values()[0];
        for (i, &ret) in r.values().iter().enumerate() {
            level *= ret.exp();
            let target = s.values()[i + 1];
            assert!((level - target).abs() <= 1e-12 * target);
        }
    }

    #[test]
    fn return_series_rejects_non_finite() {
        assert!(ReturnSeries::new(vec![0.0, f64::NAN], DEFAULT_DT).is_err());
        assert!(ReturnSeries::new(vec![], DEFAULT_DT).is_err());
    }

    fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(format!("trendhedge-ts-{name}-{}", std::process::id()));
        fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn load_csv_with_header_auto_column() {
        let path = write_temp("hdr", "date,close\n2020-01-01,100.0\n2020-01-02,101.5\n");
        let s = load_csv(&path, &ColumnSelector::Auto).unwrap();
        assert_eq!(s.values(), &[100.0, 101.5]);
        assert_eq!(s.dt(), DEFAULT_DT);
        fs::remove_file(path).ok();
    }

    #[test]
    fn load_csv_headerless_auto_column() {
        let path = write_temp("nohdr", "1.0,100.0\n2.0,101.5\n\n");
        let s = load_csv(&path, &ColumnSelector::Auto).unwrap();
        assert_eq!(s.values(), &[100.0, 101.5]);
        fs::remove_file(path).ok();
    }

    #[test]
    fn load_csv_prefers_close_column_with_header() {
        let path = write_temp("close", "close,volume\n100.0,9.0\n101.5,8.0\n");
        let s = load_csv(&path, &ColumnSelector::Auto).unwrap();
        assert_eq!(s.values(), &[100.0, 101.5]);
        fs::remove_file(path).ok();
    }

    #[test]
    fn load_csv_by_name_is_case_insensitive() {
        let path = write_temp("name", "Date,Close\n2020-01-01,100.0\n2020-01-02,101.5\n");
        let s = load_csv(&path, &ColumnSelector::Name("close".to_owned())).unwrap();
        assert_eq!(s.values(), &[100.0, 101.5]);
        let err = load_csv(&path, &ColumnSelector::Name("open".to_owned())).unwrap_err();
        assert!(matches!(err, Error::ColumnNotFound(name) if name == "open"));
        fs::remove_file(path).ok();
    }

    #[test]
    fn load_csv_by_index_detects_header() {
        let path = write_temp("idx", "date,close\n2020-01-01,100.0\n2020-01-02,101.5\n");
        let s = load_csv(&path, &ColumnSelector::Index(1)).unwrap();
        assert_eq!(s.values(), &[100.0, 101.5]);
        fs::remove_file(path).ok();
    }

    #[test]
    fn load_csv_rejects_unparsable_row() {
        let path = write_temp("bad", "close\n100.0\nnot-a-price\n");
        let err = load_csv(&path, &ColumnSelector::Auto).unwrap_err();
        assert!(matches!(err, Error::UnparsablePrice { row: 1, .. }));
        fs::remove_file(path).ok();
    }

    #[test]
    fn load_csv_rejects_negative_price_with_row_index() {
        let path = write_temp("neg", "close\n100.0\n-3.0\n101.0\n");
        let err = load_csv(&path, &ColumnSelector::Auto).unwrap_err();
        assert!(matches!(err, Error::NonPositivePrice { row: 1, value } if value == -3.0));
        fs::remove_file(path).ok();
    }

    #[test]
    fn load_csv_missing_file_reports_path() {
        let err = load_csv("/nonexistent/prices.csv", &ColumnSelector::Auto).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn gbm_is_deterministic_per_seed() {
        let params = GbmParams {
            s0: 100.0,
            mu: 0.05,
            sigma: 0.2,
            n_steps: 500,
            dt: DEFAULT_DT,
            seed: 42,
        };
        let a = simulate_gbm(&params).unwrap();
        let b = simulate_gbm(&params).unwrap();
        assert_eq!(a.values(), b.values());
        let c = simulate_gbm(&GbmParams { seed: 43, ..params }).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn gbm_zero_inputs_give_constant_path() {
        let params = GbmParams {
            s0: 87.5,
            mu: 0.0,
            sigma: 0.0,
            n_steps: 25,
            dt: DEFAULT_DT,
            seed: 7,
        };
        let s = simulate_gbm(&params).unwrap();
        assert!(s.values().iter().all(|&v| v == 87.5));
    }

    #[test]
    fn gbm_zero_vol_compounds_at_drift() {
        let params = GbmParams {
            s0: 100.0,
            mu: 0.05,
            sigma: 0.0,
            n_steps: 255,
            dt: DEFAULT_DT,
            seed: 7,
        };
        let s = simulate_gbm(&params).unwrap();
        // One year of steps at zero volatility compounds to s0 * e^mu.
        let expected = 100.0 * (0.05f64).exp();
        let last = *s.values().last().unwrap();
        assert!((last - expected).abs() <= 1e-10 * expected);
    }

    #[test]
    fn gbm_sample_moments_match_lognormal_model() {
        // [DERIVED] With mu = 0.05, sigma = 0.2, the one-step log increment
        // has mean (mu - sigma^2/2) * dt and standard deviation
        // sigma * sqrt(dt). A 60k-step path pins the sample moments to a few
        // standard errors.
        let params = GbmParams {
            s0: 100.0,
            mu: 0.05,
            sigma: 0.2,
            n_steps: 60_000,
            dt: DEFAULT_DT,
            seed: 2024,
        };
        let s = simulate_gbm(&params).unwrap();
        let r = log_returns(&s);
        let n = r.len() as f64;
        let mean = r.values().iter().sum::<f64>() / n;
        let var = r.values().iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;

        let true_mean = (0.05 - 0.5 * 0.2 * 0.2) * DEFAULT_DT;
        let true_sd = 0.2 * DEFAULT_DT.sqrt();
        // Standard error of the mean is sd / sqrt(n); allow four of them.
        assert!((mean - true_mean).abs() < 4.0 * true_sd / n.sqrt());
        // Sample sd should agree with the model sd to ~3%.
        assert!((var.sqrt() - true_sd).abs() < 0.03 * true_sd);
    }

    #[test]
    fn gbm_validates_parameters() {
        let good = GbmParams {
            s0: 100.0,
            mu: 0.05,
            sigma: 0.2,
            n_steps: 10,
            dt: DEFAULT_DT,
            seed: 1,
        };
        assert!(simulate_gbm(&good).is_ok());
        assert!(simulate_gbm(&GbmParams { s0: 0.0, ..good.clone() }).is_err());
        assert!(simulate_gbm(&GbmParams { s0: -1.0, ..good.clone() }).is_err());
        assert!(simulate_gbm(&GbmParams { sigma: -0.1, ..good.clone() }).is_err());
        assert!(simulate_gbm(&GbmParams { n_steps: 0, ..good.clone() }).is_err());
        assert!(simulate_gbm(&GbmParams { dt: 0.0, ..good.clone() }).is_err());
        assert!(simulate_gbm(&GbmParams { mu: f64::NAN, ..good }).is_err());
    }
}
