//! Trend extraction: a causal sliding-window polynomial least-squares fit
//! that splits a price series into a smooth trend plus a quick fluctuation,
//! and provides the trend's time derivative.
//!
//! At each index `i ≥ window - 1` a degree-`degree` polynomial is fitted to
//! the trailing `window` samples and evaluated (value and derivative) at the
//! window's right edge, i.e. at the current sample. This uses only past and
//! present data, so the estimate is causal. During the warm-up `i <
//! window - 1` there is no full trailing window yet; the polynomial fitted
//! to the *first* full window is evaluated at the corresponding interior
//! positions instead, which keeps the decomposition total and smooth at the
//! start.
//!
//! The fluctuation is defined as the exact remainder `source - trend`, so
//! the decomposition is additive by construction, bit for bit.

use crate::error::{Error, Result};
use crate::timeseries::PriceSeries;

/// Result of a trend/fluctuation split.
///
/// All vectors have the same length as the source series. `trend_deriv` is
/// the fitted polynomial's slope converted to units of price per *year*
/// (the grid spacing `dt` is in years).
#[derive(Debug, Clone, PartialEq)]
pub struct TrendDecomposition {
    trend: Vec<f64>,
    fluct: Vec<f64>,
    trend_deriv: Vec<f64>,
    window: usize,
    degree: usize,
    dt: f64,
}

impl TrendDecomposition {
    /// Smooth trend component.
    pub fn trend(&self) -> &[f64] {
        &self.trend
    }

    /// Quick fluctuation: exactly `source - trend`.
    pub fn fluct(&self) -> &[f64] {
        &self.fluct
    }

    /// Trend derivative in price units per year.
    pub fn trend_deriv(&self) -> &[f64] {
        &self.trend_deriv
    }

    /// Window length the fit used.
    pub fn window(&self) -> usize {
        self.window
    }

    /// Polynomial degree the fit used.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Grid spacing of the source series, in years.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.trend.len()
    }

    /// Whether the decomposition is empty (never true after construction).
    pub fn is_empty(&self) -> bool {
        self.trend.is_empty()
    }
}

/// Splits a series into trend and fluctuation with a causal sliding-window
/// polynomial fit of the given window and degree.
///
/// Requirements: `window ≥ 1`, `window ≤ series.len()`, `degree < window`.
pub fn estimate_trend(
    series: &PriceSeries,
    window: usize,
    degree: usize,
) -> Result<TrendDecomposition> {
    let values = series.values();
    validate_window(window, values.len())?;
    if degree >= window {
        return Err(Error::InvalidParameter(format!(
            "degree {degree} must be smaller than window {window}"
        )));
    }

    let fit = WindowFit::new(window, degree)?;
    let n = values.len();
    let dt = series.dt();
    let mut trend = vec![0.0; n];
    let mut deriv = vec![0.0; n];

    // Each window is fitted to the deviations from its newest sample and
    // the anchor is added back afterwards. The shift cancels algebraically
    // (the value weights sum to 1, the derivative weights to 0), but it
    // conditions the solve on deviations instead of raw price levels and
    // makes constant stretches reproduce exactly.

    // Warm-up: evaluate the first full window's polynomial at the interior
    // positions. (For window == 1 there is no warm-up region.)
    if window > 1 {
        let anchor = values[window - 1];
        let shifted: Vec<f64> = values[..window].iter().map(|&v| v - anchor).collect();
        let coeffs = fit.coefficients(&shifted);
        for i in 0..window - 1 {
            let (value, slope) = eval_poly(&coeffs, fit.positions[i]);
            trend[i] = value + anchor;
            deriv[i] = slope / (fit.scale * dt);
        }
    }

    // Steady state: dot the precomputed edge weights with each trailing
    // window.
    for i in window - 1..n {
        let segment = &values[i + 1 - window..=i];
        let anchor = values[i];
        let mut value = 0.0;
        let mut slope = 0.0;
        for (j, &s) in segment.iter().enumerate() {
            value += fit.value_weights[j] * (s - anchor);
            slope += fit.deriv_weights[j] * (s - anchor);
        }
        trend[i] = value + anchor;
        deriv[i] = slope / (fit.scale * dt);
    }

    let fluct = values
        .iter()
        .zip(trend.iter())
        .map(|(&s, &t)| s - t)
        .collect();

    Ok(TrendDecomposition {
        trend,
        fluct,
        trend_deriv: deriv,
        window,
        degree,
        dt,
    })
}

/// Trailing moving average with the same causal warm-up convention as
/// [`estimate_trend`]: for `i < window - 1` the mean runs over the samples
/// available so far, `[0..=i]`.
pub fn moving_average(series: &PriceSeries, window: usize) -> Result<Vec<f64>> {
    let values = series.values();
    validate_window(window, values.len())?;
    Ok((0..values.len())
        .map(|i| trailing_mean_at(values, i, window))
        .collect())
}

/// Relative growth rate of the trend, per year: `trend_deriv / trend`.
///
/// Fails with [`Error::NonPositiveTrend`] at the first index where the trend
/// is not strictly positive, since a relative rate is meaningless there.
pub fn trend_return(decomposition: &TrendDecomposition) -> Result<Vec<f64>> {
    decomposition
        .trend()
        .iter()
        .zip(decomposition.trend_deriv().iter())
        .enumerate()
        .map(|(index, (&level, &slope))| {
            if !level.is_finite() || level <= 0.0 {
                Err(Error::NonPositiveTrend {
                    index,
                    value: level,
                })
            } else {
                Ok(slope / level)
            }
        })
        .collect()
}

/// Mean of the trailing `window` samples ending at `i`, shrunk to the
/// available history at the start. Shared by the moving average and the
/// windowed statistics so both use the identical summation.
pub(crate) fn trailing_mean_at(values: &[f64], i: usize, window: usize) -> f64 {
    let lo = (i + 1).saturating_sub(window);
    let segment = &values[lo..=i];
    // Averaging deviations from the newest sample keeps constant stretches
    // exact; the shift cancels algebraically.
    let anchor = values[i];
    anchor + segment.iter().map(|&v| v - anchor).sum::<f64>() / segment.len() as f64
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

/// Precomputed least-squares machinery for one (window, degree) pair.
///
/// Sample positions inside a window are centered and scaled to `[-1, 1]`
/// (`u_j = (j - (w-1)/2) / ((w-1)/2)`), which keeps the normal equations
/// well conditioned. A fitted slope in `u` units is converted back to
/// per-sample units by dividing by `scale`, and to per-year units by further
/// dividing by `dt`.
struct WindowFit {
    /// Scaled positions `u_j` of the window samples.
    positions: Vec<f64>,
    /// Weights mapping a window to the fitted value at the right edge.
    value_weights: Vec<f64>,
    /// Weights mapping a window to the fitted slope (in `u` units) at the
    /// right edge.
    deriv_weights: Vec<f64>,
    /// Rows of `(G^-1 A^T)`: weights mapping a window to each polynomial
    /// coefficient.
    coeff_weights: Vec<Vec<f64>>,
    /// Position scale: `(w - 1) / 2`, or 1 for a single-sample window.
    scale: f64,
}

impl WindowFit {
    fn new(window: usize, degree: usize) -> Result<Self> {
        let center = (window as f64 - 1.0) / 2.0;
        let scale = if window == 1 { 1.0 } else { center };
        let positions: Vec<f64> = (0..window)
            .map(|j| (j as f64 - center) / scale)
            .collect();

        // Design matrix A[j][m] = u_j^m and Gram matrix G = A^T A.
        let terms = degree + 1;
        let design: Vec<Vec<f64>> = positions
            .iter()
            .map(|&u| {
                let mut row = Vec::with_capacity(terms);
                let mut p = 1.0;
                for _ in 0..terms {
                    row.push(p);
                    p *= u;
                }
                row
            })
            .collect();
        let mut gram = vec![vec![0.0; terms]; terms];
        for row in &design {
            for (a, &ra) in row.iter().enumerate() {
                for (b, &rb) in row.iter().enumerate() {
                    gram[a][b] += ra * rb;
                }
            }
        }

        // Solve G X = A^T for the coefficient weight rows X (terms x window).
        let mut rhs = vec![vec![0.0; window]; terms];
        for (j, row) in design.iter().enumerate() {
            for (m, &v) in row.iter().enumerate() {
                rhs[m][j] = v;
            }
        }
        let coeff_weights = solve_symmetric(gram, rhs)?;

        // Collapse the coefficient weights into value/slope weights at the
        // right edge u = positions[window - 1]: the fitted value there is
        // sum_m edge^m c_m and the slope is sum_m m edge^(m-1) c_m.
        let edge = positions[window - 1];
        let mut value_weights = vec![0.0; window];
        let mut deriv_weights = vec![0.0; window];
        let mut power = 1.0; // edge^(m-1) on entry to iteration m >= 1
        for (m, row) in coeff_weights.iter().enumerate() {
            let (p, q) = if m == 0 {
                (1.0, 0.0)
            } else {
                let q = m as f64 * power;
                power *= edge;
                (power, q)
            };
            for (j, &w) in row.iter().enumerate() {
                value_weights[j] += p * w;
                deriv_weights[j] += q * w;
            }
        }

        Ok(Self {
            positions,
            value_weights,
            deriv_weights,
            coeff_weights,
            scale,
        })
    }

    /// Fitted polynomial coefficients (ascending powers of `u`) for one
    /// window of samples.
    fn coefficients(&self, segment: &[f64]) -> Vec<f64> {
        self.coeff_weights
            .iter()
            .map(|row| row.iter().zip(segment).map(|(&w, &s)| w * s).sum())
            .collect()
    }
}

/// Value and first derivative of a polynomial (ascending coefficients) at
/// `u`, by simultaneous Horner evaluation.
fn eval_poly(coeffs: &[f64], u: f64) -> (f64, f64) {
    let mut value = 0.0;
    let mut slope = 0.0;
    for &c in coeffs.iter().rev() {
        slope = slope * u + value;
        value = value * u + c;
    }
    (value, slope)
}

/// Gauss-Jordan solve of `G X = B` for a small symmetric positive-definite
/// `G`, with partial pivoting. `B` is given and returned row-wise.
///
/// Textbook in-place elimination: the index loops pair reads of the pivot
/// row with writes to another row of the same matrix, which iterator forms
/// would only express through split borrows.
#[allow(clippy::needless_range_loop)]
fn solve_symmetric(mut g: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let n = g.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| g[x][col].abs().total_cmp(&g[y][col].abs()))
            .expect("non-empty pivot range");
        if g[pivot][col].abs() < f64::MIN_POSITIVE {
            return Err(Error::InvalidParameter(
                "singular normal equations in polynomial fit".to_owned(),
            ));
        }
        g.swap(col, pivot);
        b.swap(col, pivot);

        let inv = 1.0 / g[col][col];
        for k in 0..n {
            g[col][k] *= inv;
        }
        for k in 0..b[col].len() {
            b[col][k] *= inv;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = g[row][col];
            if factor == 0.0 {
                continue;
            }
            for k in 0..n {
                let v = g[col][k];
                g[row][k] -= factor * v;
            }
            for k in 0..b[row].len() {
                let v = b[col][k];
                b[row][k] -= factor * v;
            }
        }
    }
    Ok(b)
}
