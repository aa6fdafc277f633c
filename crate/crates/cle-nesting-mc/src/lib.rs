//! Monte Carlo verification layer for the nesting statistics.
//!
//! The analytic crate predicts exponential decay rates for window
//! probabilities of the renewal count N_r (and of jointly windowed weighted
//! sums). This crate estimates the same probabilities directly:
//!
//! * [`simulate_window`] / [`simulate_weighted_window`] — importance-sampled
//!   renewal simulation with exact likelihood-ratio reweighting, reported as
//!   a [`SimReport`] whose implied rate −log(p̂)/r can be held against the
//!   analytic `theory_rate`;
//! * [`convolution_oracle`] — an FFT convolution benchmark, sharing no
//!   sampling machinery with the engine, for small ⌊ν₂ r⌋;
//! * [`overshoot_tail_test`] / [`geometric_sum_tail_test`] — empirical
//!   survival curves for the two exponential tail bounds, fitted with
//!   [`fit_log_slope`].
//!
//! Estimates are bit-deterministic: paths live in fixed logical batches
//! with per-batch RNG streams, so a seed pins the result for any worker
//! count.

pub mod engine;
pub mod error;
pub mod oracle;
pub mod sim;
pub mod tail;

pub use engine::{simulate_window, simulate_weighted_window};
pub use error::{Error, Result};
pub use oracle::convolution_oracle;
pub use sim::{SimConfig, SimReport, TiltChoice};
pub use tail::{fit_log_slope, geometric_sum_tail_test, overshoot_tail_test};
