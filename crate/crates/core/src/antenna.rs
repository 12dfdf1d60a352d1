//! Dish spot-beam gain pattern.
//!
//! Normalized Bessel-aperture model:
//!
//! ```text
//! G(zeta) = 1                                   zeta = 0
//!         = 4 | J1(k a sin zeta) / (k a sin zeta) |^2   otherwise
//! ```
//!
//! with `a` the dish radius and `k = 2 pi / lambda` the wave number.
//! Sidelobes are kept as-is; interference results depend on genuine
//! sidelobe leakage.

use crate::error::{Error, Result};
use crate::specfun::bessel_j1;

/// First positive root of J1; end of the main lobe in `k a sin(zeta)`.
pub const J1_FIRST_ROOT: f64 = 3.8317059702075123;

/// Abscissa where the normalized pattern crosses one half (-3 dB),
/// root of 4 (J1(x)/x)^2 = 1/2.
pub const HALF_POWER_ABSCISSA: f64 = 1.6163399483107032;

/// Steerable dish pattern with a fixed peak gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DishPattern {
    pub aperture_radius_m: f64,
    pub wavelength_m: f64,
    pub peak_gain_dbi: f64,
}

impl DishPattern {
    pub fn new(aperture_radius_m: f64, wavelength_m: f64, peak_gain_dbi: f64) -> Result<Self> {
        if !(aperture_radius_m > 0.0 && aperture_radius_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "aperture radius must be > 0, got {aperture_radius_m}"
            )));
        }
        if !(wavelength_m > 0.0 && wavelength_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "wavelength must be > 0, got {wavelength_m}"
            )));
        }
        if !peak_gain_dbi.is_finite() {
            return Err(Error::InvalidParameter("peak gain must be finite".into()));
        }
        Ok(Self { aperture_radius_m, wavelength_m, peak_gain_dbi })
    }

    /// k a = 2 pi a / lambda.
    pub fn ka(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.aperture_radius_m / self.wavelength_m
    }

    /// Normalized pattern in [0, 1]; exactly 1 at boresight.
    pub fn normalized_gain(&self, zeta_deg: f64) -> Result<f64> {
        if !(0.0..=90.0).contains(&zeta_deg) {
            return Err(Error::InvalidParameter(format!(
                "off-boresight angle must lie in [0, 90] degrees, got {zeta_deg}"
            )));
        }
        let x = self.ka() * zeta_deg.to_radians().sin();
        let j1_over_x = if x < 1e-4 {
            // removable singularity: J1(x)/x -> 1/2 - x^2/16 + O(x^4)
            0.5 - x * x / 16.0
        } else {
            bessel_j1(x)? / x
        };
        Ok(4.0 * j1_over_x * j1_over_x)
    }

    /// Linear gain toward an off-boresight angle: peak times the
    /// normalized pattern.
    pub fn gain_toward(&self, zeta_deg: f64) -> Result<f64> {
        Ok(10f64.powf(self.peak_gain_dbi / 10.0) * self.normalized_gain(zeta_deg)?)
    }
}

/// Aperture radius placing the -3 dB contour of the pattern at the nadir
/// cell edge: solves `4 (J1(x)/x)^2 = 1/2` on the main lobe by bisection
/// and maps the root back through `x = k a sin(atan(r / H))`.
pub fn calibrate_aperture(
    cell_radius_km: f64,
    altitude_km: f64,
    wavelength_m: f64,
) -> Result<f64> {
    if cell_radius_km <= 0.0 || altitude_km <= 0.0 || wavelength_m <= 0.0 {
        return Err(Error::InvalidParameter("calibration inputs must be > 0".into()));
    }
    let g = |x: f64| {
        let j = bessel_j1(x).expect("finite x");
        4.0 * (j / x) * (j / x) - 0.5
    };
    let (mut lo, mut hi) = (1e-9, J1_FIRST_ROOT);
    if !(g(lo) > 0.0 && g(hi) < 0.0) {
        return Err(Error::NoRoot("half-power point not bracketed on the main lobe".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x_half = 0.5 * (lo + hi);
    let zeta_edge = (cell_radius_km / altitude_km).atan();
    let k = 2.0 * std::f64::consts::PI / wavelength_m;
    Ok(x_half / (k * zeta_edge.sin()))
}

/// Aperture radius of a uniformly illuminated circular dish whose
/// boresight gain equals `peak_gain_dbi`: peak gain = (k a)^2, so
/// a = lambda sqrt(G) / (2 pi).
pub fn aperture_from_peak_gain(peak_gain_dbi: f64, wavelength_m: f64) -> Result<f64> {
    if wavelength_m <= 0.0 || !peak_gain_dbi.is_finite() {
        return Err(Error::InvalidParameter("invalid aperture-from-gain inputs".into()));
    }
    let g = 10f64.powf(peak_gain_dbi / 10.0);
    Ok(wavelength_m * g.sqrt() / (2.0 * std::f64::consts::PI))
}
