//! Python extension module exposing the main leolink types and operations:
//! shadowed Rician statistics, the dish pattern, geometry helpers, and the
//! scenario engine (maps, CDFs, quantiles).
//!
//! Build with `cargo build --release -p leolink-py`; the resulting
//! `libleolink_py.so` imports as `leolink_py` once renamed/symlinked onto
//! the Python path (see python/smoke_test.py).

use leolink::antenna;
use leolink::geometry;
use leolink::link_budget::LinkCalculator;
use leolink::sim_engine::{
    run_cdf, run_spatial_map, Metric, Region, Scenario, Statistic,
};
use leolink::sr_stats;
use leolink::sr_stats::{ShadowingLevel, SsrSampler};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pyerr(e: leolink::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_scenario(config_json: &str) -> PyResult<Scenario> {
    let scenario: Scenario = serde_json::from_str(config_json)
        .map_err(|e| PyValueError::new_err(format!("scenario json: {e}")))?;
    scenario.validate().map_err(pyerr)?;
    Ok(scenario)
}

/// Shadowed Rician parameter triple (b, m, omega), linear units.
#[pyclass(name = "SrParams", frozen, from_py_object)]
#[derive(Clone)]
struct PySrParams {
    inner: sr_stats::SrParams,
}

#[pymethods]
impl PySrParams {
    #[new]
    fn new(b: f64, m: f64, omega: f64) -> PyResult<Self> {
        Ok(Self { inner: sr_stats::SrParams::new(b, m, omega).map_err(pyerr)? })
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }

    #[getter]
    fn m(&self) -> f64 {
        self.inner.m
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    /// Mean channel power 2b + omega.
    fn mean_power(&self) -> f64 {
        self.inner.mean_power()
    }

    fn variance_power(&self) -> f64 {
        self.inner.variance_power()
    }

    /// Scaled law: k * Y ~ SSR(k b, m, k omega).
    fn scaled(&self, k: f64) -> PyResult<Self> {
        Ok(Self { inner: sr_stats::scale_ssr(&self.inner, k).map_err(pyerr)? })
    }

    fn __repr__(&self) -> String {
        format!(
            "SrParams(b={}, m={}, omega={})",
            self.inner.b, self.inner.m, self.inner.omega
        )
    }
}

/// Squared-SR law with its rounded integer fading order.
#[pyclass(name = "SsrDistribution", frozen)]
struct PySsrDistribution {
    params: sr_stats::SrParams,
    inner: sr_stats::SsrDistribution,
}

#[pymethods]
impl PySsrDistribution {
    #[new]
    fn new(params: PySrParams) -> Self {
        Self { params: params.inner, inner: sr_stats::SsrDistribution::new(params.inner) }
    }

    #[getter]
    fn m_rounded(&self) -> u32 {
        self.inner.m_rounded()
    }

    /// PDF with the true (possibly non-integer) fading order.
    fn pdf(&self, y: f64) -> PyResult<f64> {
        sr_stats::ssr_pdf(&self.params, y).map_err(pyerr)
    }

    /// Closed-form PDF with the rounded integer order.
    fn pdf_int(&self, y: f64) -> PyResult<f64> {
        sr_stats::ssr_pdf_int(&self.inner, y).map_err(pyerr)
    }

    /// Closed-form CDF with the rounded integer order.
    fn cdf_int(&self, y: f64) -> PyResult<f64> {
        sr_stats::ssr_cdf_int(&self.inner, y).map_err(pyerr)
    }

    /// CDF with the true order, by adaptive quadrature of the PDF.
    fn cdf(&self, y: f64) -> PyResult<f64> {
        sr_stats::ssr_cdf_general(&self.params, y).map_err(pyerr)
    }

    fn mean(&self) -> f64 {
        sr_stats::ssr_mean_int(&self.inner)
    }

    /// P(SNR <= gamma) for SNR = snr_bar * |h|^2 (linear units).
    fn snr_outage(&self, snr_bar: f64, gamma: f64) -> PyResult<f64> {
        sr_stats::snr_outage(snr_bar, &self.inner, gamma).map_err(pyerr)
    }

    /// P(SNR <= SIR), the probability the link is not noise-limited.
    fn prob_not_noise_limited(&self, snr_bar: f64, sir: f64) -> PyResult<f64> {
        sr_stats::prob_not_noise_limited(snr_bar, sir, &self.inner).map_err(pyerr)
    }

    /// Seeded |h|^2 realizations (deterministic per seed).
    fn sample(&self, n: usize, seed: u64) -> PyResult<Vec<f64>> {
        let sampler = SsrSampler::new(&self.params).map_err(pyerr)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..n).map(|_| sampler.sample(&mut rng)).collect())
    }
}

/// Dish spot-beam pattern.
#[pyclass(name = "DishPattern", frozen)]
struct PyDishPattern {
    inner: antenna::DishPattern,
}

#[pymethods]
impl PyDishPattern {
    #[new]
    fn new(aperture_radius_m: f64, wavelength_m: f64, peak_gain_dbi: f64) -> PyResult<Self> {
        Ok(Self {
            inner: antenna::DishPattern::new(aperture_radius_m, wavelength_m, peak_gain_dbi)
                .map_err(pyerr)?,
        })
    }

    fn normalized_gain(&self, zeta_deg: f64) -> PyResult<f64> {
        self.inner.normalized_gain(zeta_deg).map_err(pyerr)
    }

    fn gain_toward(&self, zeta_deg: f64) -> PyResult<f64> {
        self.inner.gain_toward(zeta_deg).map_err(pyerr)
    }
}

#[pyfunction]
fn shadowing_params(level: &str) -> PyResult<PySrParams> {
    Ok(PySrParams { inner: ShadowingLevel::from_name(level).map_err(pyerr)?.params() })
}

#[pyfunction]
fn bessel_j1(x: f64) -> PyResult<f64> {
    leolink::specfun::bessel_j1(x).map_err(pyerr)
}

#[pyfunction]
fn confluent_1f1(a: f64, b: f64, x: f64) -> PyResult<f64> {
    let r = leolink::specfun::confluent_1f1(a, b, x).map_err(pyerr)?;
    if !r.converged {
        return Err(PyValueError::new_err("1F1 series did not converge"));
    }
    Ok(r.value)
}

#[pyfunction]
fn kummer_polynomial(m: u32, x: f64) -> PyResult<f64> {
    leolink::specfun::kummer_polynomial(m, x).map_err(pyerr)
}

#[pyfunction]
fn lower_incomplete_gamma(a: u32, x: f64) -> PyResult<f64> {
    leolink::specfun::lower_incomplete_gamma_int(a, x).map_err(pyerr)
}

#[pyfunction]
fn slant_distance(altitude_km: f64, elevation_deg: f64) -> PyResult<f64> {
    geometry::slant_distance(altitude_km, elevation_deg).map_err(pyerr)
}

#[pyfunction]
fn calibrate_aperture(cell_radius_km: f64, altitude_km: f64, wavelength_m: f64) -> PyResult<f64> {
    antenna::calibrate_aperture(cell_radius_km, altitude_km, wavelength_m).map_err(pyerr)
}

#[pyfunction]
fn aperture_from_peak_gain(peak_gain_dbi: f64, wavelength_m: f64) -> PyResult<f64> {
    antenna::aperture_from_peak_gain(peak_gain_dbi, wavelength_m).map_err(pyerr)
}

/// Hexagonal layout as a list of (x_km, y_km, color) tuples.
#[pyfunction]
fn hex_layout(cell_radius_km: f64, rings: u32, reuse_factor: u32) -> PyResult<Vec<(f64, f64, u8)>> {
    let layout = geometry::build_hex_layout(cell_radius_km, rings, reuse_factor).map_err(pyerr)?;
    Ok(layout
        .cell_centers
        .iter()
        .zip(&layout.colors)
        .map(|(c, &col)| (c.x_km, c.y_km, col))
        .collect())
}

/// Large-scale link at one user point of a scenario:
/// (snr_bar_db, inr_bar_db, sir_db).
#[pyfunction]
fn large_scale_link(config_json: &str, x_km: f64, y_km: f64) -> PyResult<(f64, f64, f64)> {
    let scenario = parse_scenario(config_json)?;
    let layout = scenario.build_layout().map_err(pyerr)?;
    let pattern = scenario.dish_pattern().map_err(pyerr)?;
    let calc =
        LinkCalculator::new(&scenario.rf, &layout, &scenario.satellite, &pattern).map_err(pyerr)?;
    let user = geometry::GroundPoint::new(x_km, y_km).map_err(pyerr)?;
    let link = calc.link_at(&user, layout.nearest_cell(&user)).map_err(pyerr)?;
    Ok((
        leolink::metric_to_db(link.snr_bar),
        leolink::metric_to_db(link.inr_bar),
        leolink::metric_to_db(link.sir),
    ))
}

/// Pooled metric quantiles (dB) of a scenario at the given probabilities
/// in (0, 1].
#[pyfunction]
fn run_cdf_quantiles(
    config_json: &str,
    metric: &str,
    region: &str,
    probs: Vec<f64>,
) -> PyResult<Vec<f64>> {
    let scenario = parse_scenario(config_json)?;
    let metric = Metric::from_name(metric).map_err(pyerr)?;
    let region = Region::from_name(region).map_err(pyerr)?;
    let dist = run_cdf(&scenario, metric, region).map_err(pyerr)?;
    for &p in &probs {
        if !(0.0 < p && p <= 1.0) {
            return Err(PyValueError::new_err(format!("probability {p} outside (0, 1]")));
        }
    }
    Ok(probs.iter().map(|&p| dist.percentile(p * 100.0)).collect())
}

/// Metric map over the scenario's rectangular grid:
/// (nx, ny, row-major values in dB).
#[pyfunction]
fn run_map(
    config_json: &str,
    metric: &str,
    statistic: &str,
) -> PyResult<(usize, usize, Vec<f64>)> {
    let scenario = parse_scenario(config_json)?;
    let metric = Metric::from_name(metric).map_err(pyerr)?;
    let statistic = Statistic::from_name(statistic).map_err(pyerr)?;
    let map = run_spatial_map(&scenario, metric, statistic).map_err(pyerr)?;
    Ok((map.shape.nx, map.shape.ny, map.values_db))
}

#[pymodule]
fn leolink_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySrParams>()?;
    m.add_class::<PySsrDistribution>()?;
    m.add_class::<PyDishPattern>()?;
    m.add_function(wrap_pyfunction!(shadowing_params, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j1, m)?)?;
    m.add_function(wrap_pyfunction!(confluent_1f1, m)?)?;
    m.add_function(wrap_pyfunction!(kummer_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(lower_incomplete_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(slant_distance, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_aperture, m)?)?;
    m.add_function(wrap_pyfunction!(aperture_from_peak_gain, m)?)?;
    m.add_function(wrap_pyfunction!(hex_layout, m)?)?;
    m.add_function(wrap_pyfunction!(large_scale_link, m)?)?;
    m.add_function(wrap_pyfunction!(run_cdf_quantiles, m)?)?;
    m.add_function(wrap_pyfunction!(run_map, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
