//! Link-level simulator and statistics library for multi-beam LEO satellite
//! downlink under shadowed Rician fading.
//!
//! The crate is organized around the pipeline that turns geometry and RF
//! configuration into metric distributions:
//!
//! - [`specfun`]: special-function kernel (Bessel J1, confluent
//!   hypergeometric, incomplete gamma) with documented accuracy targets.
//! - [`sr_stats`]: the shadowed Rician / squared-SR distribution family:
//!   PDFs, CDFs, means, linear-scaling relations, integer-order closed
//!   forms, outage probabilities and a validated power sampler.
//! - [`geometry`]: satellite-Earth-user geometry and the hexagonal cell
//!   layout with frequency-reuse coloring.
//! - [`antenna`]: dish spot-beam gain pattern and aperture sizing.
//! - [`link_budget`]: path loss, noise, large-scale SNR/INR and SIR, and
//!   per-realization metric composition.
//! - [`sim_engine`]: scenario orchestration, Monte Carlo realization, maps,
//!   empirical/closed-form CDFs and parameter sweeps.
//! - [`cli`]: command-line front end emitting CSV plus a JSON run manifest.
//!
//! All quantities are carried in linear units internally; dB conversion
//! happens only at reporting boundaries.

pub mod antenna;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod link_budget;
pub mod quad;
pub mod sim_engine;
pub mod specfun;
pub mod sr_stats;

pub use error::Error;

/// Convert a linear power ratio to dB.
pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Convert dB to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Floor applied when converting non-positive or vanishing linear metrics
/// to dB, so sorted sample arrays stay finite.
pub const DB_FLOOR: f64 = -200.0;

/// Ceiling for unbounded ratios (e.g. SIR with no co-channel interferers).
pub const DB_CEIL: f64 = 200.0;

/// Convert a linear metric value to dB, clamped to [`DB_FLOOR`], [`DB_CEIL`].
pub fn metric_to_db(lin: f64) -> f64 {
    if lin <= 0.0 {
        return DB_FLOOR;
    }
    linear_to_db(lin).clamp(DB_FLOOR, DB_CEIL)
}
