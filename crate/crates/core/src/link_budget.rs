//! Large-scale link quantities and per-realization metric composition.
//!
//! The large-scale SNR and INR exclude the random channel power; one
//! shared |h|^2 realization multiplies both (the desired and every
//! interfering beam ride the same sky-to-ground channel), which makes the
//! SIR deterministic for a fixed geometry.

use crate::antenna::DishPattern;
use crate::error::{Error, Result};
use crate::geometry::{
    off_boresight_angle, satellite_position, user_slant_and_elevation, BeamLayout, GroundPoint,
    SatelliteState, Vec3,
};
use serde::{Deserialize, Serialize};

pub const BOLTZMANN_J_PER_K: f64 = 1.380649e-23;
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// RF chain configuration; defaults follow the simulated Ka-band system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfConfig {
    pub carrier_ghz: f64,
    pub bandwidth_mhz: f64,
    /// EIRP spectral density; conducted power is this plus bandwidth minus
    /// the peak transmit gain.
    pub eirp_density_dbw_per_mhz: f64,
    pub peak_tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub noise_figure_db: f64,
    pub antenna_temp_k: f64,
    pub zenith_attenuation_db: f64,
}

impl Default for RfConfig {
    fn default() -> Self {
        Self {
            carrier_ghz: 20.0,
            bandwidth_mhz: 400.0,
            eirp_density_dbw_per_mhz: 4.0,
            peak_tx_gain_dbi: 38.5,
            rx_gain_dbi: 39.7,
            noise_figure_db: 1.2,
            antenna_temp_k: 150.0,
            zenith_attenuation_db: 0.9,
        }
    }
}

impl RfConfig {
    pub fn validate(&self) -> Result<()> {
        if self.carrier_ghz <= 0.0 || self.bandwidth_mhz <= 0.0 || self.antenna_temp_k <= 0.0 {
            return Err(Error::InvalidParameter(
                "carrier, bandwidth and antenna temperature must be > 0".into(),
            ));
        }
        if self.zenith_attenuation_db < 0.0 {
            return Err(Error::InvalidParameter("zenith attenuation must be >= 0".into()));
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT_M_PER_S / (self.carrier_ghz * 1e9)
    }

    /// Conducted per-beam transmit power in dBW.
    pub fn conducted_power_dbw(&self) -> f64 {
        self.eirp_density_dbw_per_mhz + 10.0 * self.bandwidth_mhz.log10() - self.peak_tx_gain_dbi
    }
}

/// Free-space path loss in dB with the carrier in GHz and the distance in
/// meters: 32.45 + 20 log10(f) + 20 log10(d).
pub fn fspl_db(distance_km: f64, carrier_ghz: f64) -> f64 {
    32.45 + 20.0 * carrier_ghz.log10() + 20.0 * (distance_km * 1000.0).log10()
}

/// Gaseous absorption A_zen / sin(elevation) in dB.
pub fn atmospheric_loss_db(elevation_deg: f64, zenith_attenuation_db: f64) -> Result<f64> {
    if !(elevation_deg > 0.0 && elevation_deg <= 90.0) {
        return Err(Error::InvalidParameter(format!(
            "elevation must lie in (0, 90], got {elevation_deg}"
        )));
    }
    Ok(zenith_attenuation_db / elevation_deg.to_radians().sin())
}

/// Thermal noise power 10 log10(kB * Tsys * B) in dBW, with
/// Tsys = T_antenna + 290 (10^(NF/10) - 1).
pub fn noise_power_dbw(cfg: &RfConfig) -> f64 {
    let t_sys = cfg.antenna_temp_k + 290.0 * (10f64.powf(cfg.noise_figure_db / 10.0) - 1.0);
    10.0 * (BOLTZMANN_J_PER_K * t_sys * cfg.bandwidth_mhz * 1e6).log10()
}

/// Deterministic link quantities at one user location, linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    /// Large-scale SNR (excludes channel fading).
    pub snr_bar: f64,
    /// Large-scale INR; zero when no co-channel beam exists.
    pub inr_bar: f64,
    /// Signal-to-interference ratio; infinite when inr_bar is zero.
    /// Depends only on beam gains (transmit power, path loss and receive
    /// gain cancel).
    pub sir: f64,
}

/// Precomputed per-scenario state for evaluating many user locations.
pub struct LinkCalculator<'a> {
    cfg: &'a RfConfig,
    layout: &'a BeamLayout,
    pattern: &'a DishPattern,
    sat_pos: Vec3,
    /// p_tx * g_rx / noise in linear units; per-user path loss divides in.
    budget_lin: f64,
    co_channel: Vec<Vec<usize>>,
}

impl<'a> LinkCalculator<'a> {
    pub fn new(
        cfg: &'a RfConfig,
        layout: &'a BeamLayout,
        sat: &SatelliteState,
        pattern: &'a DishPattern,
    ) -> Result<Self> {
        cfg.validate()?;
        let sat_pos = satellite_position(sat)?;
        let budget_db = cfg.conducted_power_dbw() + cfg.rx_gain_dbi - noise_power_dbw(cfg);
        let co_channel = (0..layout.n_beams()).map(|i| layout.co_channel(i)).collect();
        Ok(Self {
            cfg,
            layout,
            pattern,
            sat_pos,
            budget_lin: crate::db_to_linear(budget_db),
            co_channel,
        })
    }

    pub fn sat_pos(&self) -> &Vec3 {
        &self.sat_pos
    }

    /// Linear gain the serving beam delivers to `user`.
    pub fn delivered_gain(&self, user: &GroundPoint, serving_cell: usize) -> Result<f64> {
        let zeta =
            off_boresight_angle(&self.sat_pos, &self.layout.cell_centers[serving_cell], user)?;
        self.pattern.gain_toward(zeta)
    }

    /// Large-scale SNR/INR/SIR at one user location.
    pub fn link_at(&self, user: &GroundPoint, serving_cell: usize) -> Result<LinkState> {
        if serving_cell >= self.layout.n_beams() {
            return Err(Error::InvalidParameter(format!(
                "serving cell index {serving_cell} out of range"
            )));
        }
        let (dist_km, elev_deg) = user_slant_and_elevation(&self.sat_pos, user)?;
        let pl_db = fspl_db(dist_km, self.cfg.carrier_ghz)
            + atmospheric_loss_db(elev_deg, self.cfg.zenith_attenuation_db)?;
        let pl_lin = crate::db_to_linear(pl_db);

        let g0 = self.delivered_gain(user, serving_cell)?;
        let mut g_int = 0.0;
        for &i in &self.co_channel[serving_cell] {
            let zeta = off_boresight_angle(&self.sat_pos, &self.layout.cell_centers[i], user)?;
            g_int += self.pattern.gain_toward(zeta)?;
        }

        let scale = self.budget_lin / pl_lin;
        Ok(LinkState {
            snr_bar: scale * g0,
            inr_bar: scale * g_int,
            sir: if g_int > 0.0 { g0 / g_int } else { f64::INFINITY },
        })
    }
}

/// One-shot form of [`LinkCalculator::link_at`].
pub fn large_scale_link(
    cfg: &RfConfig,
    layout: &BeamLayout,
    sat: &SatelliteState,
    user: &GroundPoint,
    serving_cell: usize,
    pattern: &DishPattern,
) -> Result<LinkState> {
    LinkCalculator::new(cfg, layout, sat, pattern)?.link_at(user, serving_cell)
}

/// Compose one channel-power realization with the large-scale link:
/// snr = snr_bar h2, inr = inr_bar h2, sinr = snr / (1 + inr).
pub fn realize_metrics(link: &LinkState, h2: f64) -> (f64, f64, f64) {
    let snr = link.snr_bar * h2;
    let inr = link.inr_bar * h2;
    (snr, inr, snr / (1.0 + inr))
}
