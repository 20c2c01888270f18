//! Trend-following option pricing and tracking-control delta hedging.
//!
//! The crate decomposes a price series into a smooth trend plus a quick
//! fluctuation, prices European calls on the trend with a rolling
//! volatility estimate, and sizes a dynamic hedge so the trend-valued
//! portfolio tracks a risk-free growth path. The pieces:
//!
//! - [`timeseries`]: price/return containers, CSV loading, and an
//!   exact-discretization geometric Brownian motion simulator;
//! - [`trend`]: causal sliding-window polynomial trend extraction with
//!   derivative estimates, and the additive trend/fluctuation split;
//! - [`stats`]: rolling annualized volatility, a low-pass filter, a
//!   two-sided change-point detector on standardized returns, and a
//!   change-point-adaptive volatility variant;
//! - [`pricing`]: European call quotes (value, delta, theta) evaluated on
//!   the trend, with the deterministic zero-volatility limit handled
//!   exactly;
//! - [`hedging`]: the tracking-control hedge ratio, a self-financing
//!   backtest at raw prices, and summary metrics.
//!
//! All algorithms are causal: outputs at step `t` depend only on samples
//! up to `t`. Given identical inputs every function is bit-for-bit
//! deterministic, including the simulator (seeded counter-mode RNG).

pub mod error;
pub mod hedging;
pub mod pricing;
pub mod stats;
pub mod timeseries;
pub mod trend;

pub use error::{Error, Result};
