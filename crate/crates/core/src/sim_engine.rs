//! Scenario orchestration: user grids, Monte Carlo realization, spatial
//! maps, empirical and closed-form CDFs, and parameter sweeps.
//!
//! Execution is embarrassingly parallel over grid points. Every point
//! draws its channel realizations from its own counter-derived RNG
//! substream and results merge in grid order, so output bytes are
//! independent of the thread count.

use crate::antenna::{aperture_from_peak_gain, calibrate_aperture, DishPattern};
use crate::error::{Error, Result};
use crate::geometry::{build_hex_layout, BeamLayout, GroundPoint, SatelliteState};
use crate::link_budget::{realize_metrics, LinkCalculator, LinkState, RfConfig};
use crate::sr_stats::{
    scale_ssr, ssr_cdf_int, ShadowingLevel, SrParams, SsrDistribution, SsrSampler,
};
use crate::{metric_to_db, Error as CrateError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Scalar metric of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Gain,
    Snr,
    Inr,
    Sinr,
    Sir,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Gain => "gain",
            Metric::Snr => "snr",
            Metric::Inr => "inr",
            Metric::Sinr => "sinr",
            Metric::Sir => "sir",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gain" => Ok(Metric::Gain),
            "snr" => Ok(Metric::Snr),
            "inr" => Ok(Metric::Inr),
            "sinr" => Ok(Metric::Sinr),
            "sir" => Ok(Metric::Sir),
            other => Err(Error::Config(format!("unknown metric '{other}'"))),
        }
    }
}

/// What a spatial map shows at each point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// Deterministic large-scale quantity (gain, SNR-bar, INR-bar, SIR).
    LargeScale,
    /// One channel realization per point.
    SingleRealization,
    /// Closed-form mean: large-scale value times (2b + Omega).
    Mean,
}

impl Statistic {
    pub fn from_name(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "large-scale" => Ok(Statistic::LargeScale),
            "single-realization" => Ok(Statistic::SingleRealization),
            "mean" => Ok(Statistic::Mean),
            other => Err(Error::Config(format!("unknown statistic '{other}'"))),
        }
    }
}

/// Which user points feed a pooled CDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    CenterCell,
    Footprint,
}

impl Region {
    pub fn from_name(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "center-cell" => Ok(Region::CenterCell),
            "footprint" => Ok(Region::Footprint),
            other => Err(Error::Config(format!("unknown region '{other}'"))),
        }
    }
}

/// Hexagonal layout parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutSpec {
    pub cell_radius_km: f64,
    pub rings: u32,
    pub reuse_factor: u32,
}

impl Default for LayoutSpec {
    fn default() -> Self {
        Self { cell_radius_km: 10.0, rings: 2, reuse_factor: 1 }
    }
}

/// How the dish aperture radius is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", deny_unknown_fields)]
pub enum ApertureSpec {
    /// Uniform-aperture identity: peak gain = (k a)^2. Default; pins the
    /// sidelobe structure to the stated peak gain and reproduces the
    /// reported interference levels.
    #[default]
    #[serde(rename = "peak-gain")]
    PeakGain,
    /// Place the -3 dB contour at the nadir cell edge.
    #[serde(rename = "edge-3db")]
    EdgeHalfPower,
    /// Fixed radius in meters.
    #[serde(rename = "explicit")]
    Explicit { radius_m: f64 },
}

/// User-point specification: either a rectangular grid (half-width and
/// resolution, centered on the origin) or an explicit point list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Extent {
        extent_km: f64,
        resolution_km: f64,
    },
    Points {
        points: Vec<[f64; 2]>,
    },
}

impl Default for GridSpec {
    fn default() -> Self {
        // center-cell bounding box at 0.25 km resolution
        GridSpec::Extent { extent_km: 10.0, resolution_km: 0.25 }
    }
}

/// Row-major rectangular grid geometry backing a [`SpatialMap`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridShape {
    pub x_min: f64,
    pub y_min: f64,
    pub resolution_km: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridShape {
    pub fn point(&self, iy: usize, ix: usize) -> (f64, f64) {
        (
            self.x_min + ix as f64 * self.resolution_km,
            self.y_min + iy as f64 * self.resolution_km,
        )
    }
}

/// A complete experiment description; fixed seed means byte-identical
/// outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub rf: RfConfig,
    pub layout: LayoutSpec,
    pub satellite: SatelliteState,
    pub shadowing: ShadowingLevel,
    pub aperture: ApertureSpec,
    pub user_grid: GridSpec,
    pub realizations_per_point: u32,
    pub seed: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            rf: RfConfig::default(),
            layout: LayoutSpec::default(),
            satellite: SatelliteState { altitude_km: 600.0, elevation_deg: 90.0, azimuth_deg: 0.0 },
            shadowing: ShadowingLevel::Light,
            aperture: ApertureSpec::default(),
            user_grid: GridSpec::default(),
            realizations_per_point: 200,
            seed: 1,
        }
    }
}

impl Scenario {
    /// SHA-256 of the canonical JSON form; identifies every output.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("scenario serializes");
        let digest = Sha256::digest(json.as_bytes());
        let mut hex = String::with_capacity(64);
        for b in digest {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    }

    pub fn validate(&self) -> Result<()> {
        self.rf.validate()?;
        SatelliteState::new(
            self.satellite.altitude_km,
            self.satellite.elevation_deg,
            self.satellite.azimuth_deg,
        )?;
        if self.realizations_per_point < 1 {
            return Err(Error::Config("realizations_per_point must be >= 1".into()));
        }
        if let GridSpec::Extent { extent_km, resolution_km } = self.user_grid {
            if !(extent_km > 0.0 && resolution_km > 0.0) {
                return Err(Error::Config("grid extent and resolution must be > 0".into()));
            }
        }
        Ok(())
    }

    /// Resolve the dish pattern according to the aperture spec.
    pub fn dish_pattern(&self) -> Result<DishPattern> {
        let lambda = self.rf.wavelength_m();
        let radius = match self.aperture {
            ApertureSpec::PeakGain => aperture_from_peak_gain(self.rf.peak_tx_gain_dbi, lambda)?,
            ApertureSpec::EdgeHalfPower => calibrate_aperture(
                self.layout.cell_radius_km,
                self.satellite.altitude_km,
                lambda,
            )?,
            ApertureSpec::Explicit { radius_m } => radius_m,
        };
        DishPattern::new(radius, lambda, self.rf.peak_tx_gain_dbi)
    }

    pub fn build_layout(&self) -> Result<BeamLayout> {
        build_hex_layout(self.layout.cell_radius_km, self.layout.rings, self.layout.reuse_factor)
    }

    /// Materialize user points (row-major for extent grids) plus the grid
    /// shape when rectangular.
    pub fn user_points(&self) -> Result<(Vec<GroundPoint>, Option<GridShape>)> {
        match &self.user_grid {
            GridSpec::Extent { extent_km, resolution_km } => {
                let steps = (2.0 * extent_km / resolution_km).round() as usize;
                let n = steps + 1;
                let mut points = Vec::with_capacity(n * n);
                for iy in 0..n {
                    for ix in 0..n {
                        points.push(GroundPoint::new(
                            -extent_km + ix as f64 * resolution_km,
                            -extent_km + iy as f64 * resolution_km,
                        )?);
                    }
                }
                let shape = GridShape {
                    x_min: -extent_km,
                    y_min: -extent_km,
                    resolution_km: *resolution_km,
                    nx: n,
                    ny: n,
                };
                Ok((points, Some(shape)))
            }
            GridSpec::Points { points } => {
                let pts = points
                    .iter()
                    .map(|p| GroundPoint::new(p[0], p[1]))
                    .collect::<Result<Vec<_>>>()?;
                if pts.is_empty() {
                    return Err(Error::Config("explicit point list is empty".into()));
                }
                Ok((pts, None))
            }
        }
    }
}

/// Per-point RNG substream: ChaCha keyed by the master seed with the point
/// index as the stream counter, so parallel and serial execution draw
/// identical values.
pub fn point_rng(seed: u64, point_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(point_index);
    rng
}

/// Run `f` on a dedicated rayon pool of `threads` threads; `None` uses the
/// global default. Results do not depend on the choice.
pub fn with_thread_count<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}

/// Evaluated large-scale links for every user point of a scenario.
pub struct PointLinks {
    pub points: Vec<GroundPoint>,
    pub serving: Vec<usize>,
    pub links: Vec<LinkState>,
    pub shape: Option<GridShape>,
    pub center_cell: usize,
}

/// Compute the large-scale link at every user point (location-based cell
/// association; points outside the tessellation attach to the nearest
/// cell).
pub fn evaluate_links(scenario: &Scenario) -> Result<PointLinks> {
    scenario.validate()?;
    let layout = scenario.build_layout()?;
    let pattern = scenario.dish_pattern()?;
    let (points, shape) = scenario.user_points()?;
    let calc = LinkCalculator::new(&scenario.rf, &layout, &scenario.satellite, &pattern)?;
    let serving: Vec<usize> = points.iter().map(|p| layout.nearest_cell(p)).collect();
    let links = points
        .par_iter()
        .zip(serving.par_iter())
        .map(|(p, &s)| calc.link_at(p, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(PointLinks { points, serving, links, shape, center_cell: layout.center_cell() })
}

/// Empirical or closed-form CDF of a metric in the dB domain.
#[derive(Debug, Clone, PartialEq)]
pub enum CdfData {
    /// Sorted pooled samples.
    Empirical { samples_db: Vec<f64> },
    /// CDF evaluated on a dB grid.
    ClosedForm { grid_db: Vec<f64>, cum_prob: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricDistribution {
    pub metric: Metric,
    pub data: CdfData,
    /// Scenario fingerprint (plus sweep label when applicable).
    pub source: String,
}

impl MetricDistribution {
    pub fn n_samples(&self) -> usize {
        match &self.data {
            CdfData::Empirical { samples_db } => samples_db.len(),
            CdfData::ClosedForm { grid_db, .. } => grid_db.len(),
        }
    }

    /// P(metric <= x_db).
    pub fn cdf_at(&self, x_db: f64) -> f64 {
        match &self.data {
            CdfData::Empirical { samples_db } => {
                let k = samples_db.partition_point(|&s| s <= x_db);
                k as f64 / samples_db.len() as f64
            }
            CdfData::ClosedForm { grid_db, cum_prob } => {
                let k = grid_db.partition_point(|&g| g <= x_db);
                if k == 0 {
                    0.0
                } else {
                    cum_prob[k - 1]
                }
            }
        }
    }

    /// Percentile in dB for `p` in (0, 100].
    pub fn percentile(&self, p: f64) -> f64 {
        match &self.data {
            CdfData::Empirical { samples_db } => {
                let n = samples_db.len();
                let idx = ((p / 100.0 * n as f64).ceil() as usize).clamp(1, n) - 1;
                samples_db[idx]
            }
            CdfData::ClosedForm { grid_db, cum_prob } => {
                let target = p / 100.0;
                match cum_prob.iter().position(|&c| c >= target) {
                    Some(0) | None if cum_prob.is_empty() => f64::NAN,
                    Some(0) => grid_db[0],
                    Some(i) => {
                        // linear interpolation between bracketing grid points
                        let (c0, c1) = (cum_prob[i - 1], cum_prob[i]);
                        let (g0, g1) = (grid_db[i - 1], grid_db[i]);
                        if c1 > c0 {
                            g0 + (target - c0) / (c1 - c0) * (g1 - g0)
                        } else {
                            g1
                        }
                    }
                    None => *grid_db.last().unwrap(),
                }
            }
        }
    }

    pub fn median(&self) -> f64 {
        self.percentile(50.0)
    }
}

/// Metric map over a rectangular grid, dB values in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialMap {
    pub metric: Metric,
    pub statistic: Statistic,
    pub shape: GridShape,
    pub values_db: Vec<f64>,
}

impl SpatialMap {
    pub fn value_at(&self, iy: usize, ix: usize) -> f64 {
        self.values_db[iy * self.shape.nx + ix]
    }
}

fn metric_value(metric: Metric, link: &LinkState, gain: f64, h2: Option<f64>) -> f64 {
    match (metric, h2) {
        (Metric::Gain, _) => gain,
        (Metric::Sir, _) => link.sir,
        (Metric::Snr, None) => link.snr_bar,
        (Metric::Inr, None) => link.inr_bar,
        (Metric::Snr, Some(h2)) => realize_metrics(link, h2).0,
        (Metric::Inr, Some(h2)) => realize_metrics(link, h2).1,
        (Metric::Sinr, Some(h2)) => realize_metrics(link, h2).2,
        (Metric::Sinr, None) => unreachable!("sinr requires a realization"),
    }
}

/// Map a metric over the scenario grid.
///
/// `LargeScale` emits deterministic quantities only (gain, SNR-bar,
/// INR-bar, SIR); `SingleRealization` draws one channel power per point;
/// `Mean` multiplies the large-scale value by the mean channel power
/// 2b + Omega.
pub fn run_spatial_map(scenario: &Scenario, metric: Metric, statistic: Statistic) -> Result<SpatialMap> {
    if metric == Metric::Sinr && statistic != Statistic::SingleRealization {
        return Err(Error::Config(
            "sinr maps require the single-realization statistic".into(),
        ));
    }
    let eval = evaluate_links(scenario)?;
    let shape = eval.shape.ok_or_else(|| {
        CrateError::Config("spatial maps require a rectangular extent grid".into())
    })?;
    let layout = scenario.build_layout()?;
    let pattern = scenario.dish_pattern()?;
    let calc = LinkCalculator::new(&scenario.rf, &layout, &scenario.satellite, &pattern)?;
    let params = scenario.shadowing.params();
    let sampler = SsrSampler::new(&params)?;
    let mean_power = params.mean_power();
    let seed = scenario.seed;

    let values_db = (0..eval.points.len())
        .into_par_iter()
        .map(|i| {
            let gain = calc.delivered_gain(&eval.points[i], eval.serving[i])?;
            let link = &eval.links[i];
            let lin = match statistic {
                Statistic::LargeScale => metric_value(metric, link, gain, None),
                Statistic::SingleRealization => {
                    let mut rng = point_rng(seed, i as u64);
                    let h2 = sampler.sample(&mut rng);
                    match metric {
                        Metric::Gain => gain,
                        _ => metric_value(metric, link, gain, Some(h2)),
                    }
                }
                Statistic::Mean => match metric {
                    Metric::Gain => gain,
                    Metric::Sir => link.sir,
                    Metric::Snr => link.snr_bar * mean_power,
                    Metric::Inr => link.inr_bar * mean_power,
                    Metric::Sinr => unreachable!("rejected above"),
                },
            };
            Ok(metric_to_db(lin))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SpatialMap { metric, statistic, shape, values_db })
}

/// Pooled empirical CDF across user locations in `region` and channel
/// realizations (one substream per point).
pub fn run_cdf(scenario: &Scenario, metric: Metric, region: Region) -> Result<MetricDistribution> {
    if metric == Metric::Gain {
        return Err(Error::Config("gain is deterministic; request a map instead".into()));
    }
    let eval = evaluate_links(scenario)?;
    let params = scenario.shadowing.params();
    let sampler = SsrSampler::new(&params)?;
    let n_real = scenario.realizations_per_point as usize;
    let seed = scenario.seed;

    let selected: Vec<usize> = (0..eval.points.len())
        .filter(|&i| match region {
            Region::Footprint => true,
            Region::CenterCell => eval.serving[i] == eval.center_cell,
        })
        .collect();
    if selected.is_empty() {
        return Err(Error::Config("no user points fall inside the requested region".into()));
    }

    let mut samples_db: Vec<f64> = selected
        .par_iter()
        .flat_map_iter(|&i| {
            let link = eval.links[i];
            let mut rng = point_rng(seed, i as u64);
            let sampler = &sampler;
            (0..n_real).map(move |_| {
                let h2 = sampler.sample(&mut rng);
                let (snr, inr, sinr) = realize_metrics(&link, h2);
                let lin = match metric {
                    Metric::Snr => snr,
                    Metric::Inr => inr,
                    Metric::Sinr => sinr,
                    Metric::Sir => link.sir,
                    Metric::Gain => unreachable!("rejected above"),
                };
                metric_to_db(lin)
            })
        })
        .collect();
    samples_db.sort_by(|a, b| a.partial_cmp(b).unwrap());

    Ok(MetricDistribution {
        metric,
        data: CdfData::Empirical { samples_db },
        source: format!("{}:{}:{:?}", scenario.fingerprint(), metric.name(), region),
    })
}

/// Closed-form CDF of SNR or INR at a fixed link, on a dB grid, through
/// the linear-scaling relation and the integer-order CDF.
pub fn closed_form_cdf(
    link: &LinkState,
    shadowing: ShadowingLevel,
    metric: Metric,
    grid_db: &[f64],
) -> Result<MetricDistribution> {
    let scale = match metric {
        Metric::Snr => link.snr_bar,
        Metric::Inr => {
            if link.inr_bar <= 0.0 {
                return Err(Error::InvalidParameter(
                    "closed-form INR CDF requires inr_bar > 0".into(),
                ));
            }
            link.inr_bar
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "closed-form CDF supports snr and inr, not {}",
                other.name()
            )))
        }
    };
    let scaled: SrParams = scale_ssr(&shadowing.params(), scale)?;
    let dist = SsrDistribution::new(scaled);
    let cum_prob = grid_db
        .iter()
        .map(|&g| ssr_cdf_int(&dist, crate::db_to_linear(g)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricDistribution {
        metric,
        data: CdfData::ClosedForm { grid_db: grid_db.to_vec(), cum_prob },
        source: format!("closed-form:{}:{}", metric.name(), shadowing.name()),
    })
}

/// Sweep axes for comparative CDFs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Elevation,
    Shadowing,
    Reuse,
}

impl SweepAxis {
    pub fn from_name(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "elevation" => Ok(SweepAxis::Elevation),
            "shadowing" => Ok(SweepAxis::Shadowing),
            "reuse" => Ok(SweepAxis::Reuse),
            other => Err(Error::Config(format!("unknown sweep axis '{other}'"))),
        }
    }

    /// Parse one swept value and return the modified scenario. The seed is
    /// left untouched so differences are attributable to the axis alone.
    pub fn apply(self, base: &Scenario, value: &str) -> Result<Scenario> {
        let mut s = base.clone();
        match self {
            SweepAxis::Elevation => {
                let e: f64 = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad elevation value '{value}'")))?;
                s.satellite = s.satellite.with_elevation(e)?;
            }
            SweepAxis::Shadowing => {
                s.shadowing = ShadowingLevel::from_name(value)?;
            }
            SweepAxis::Reuse => {
                let r: u32 = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad reuse value '{value}'")))?;
                if r != 1 && r != 3 {
                    return Err(Error::Config(format!("reuse factor must be 1 or 3, got {r}")));
                }
                s.layout.reuse_factor = r;
            }
        }
        Ok(s)
    }
}

/// One pooled CDF per swept value, all under the same seed base.
pub fn sweep(
    base: &Scenario,
    axis: SweepAxis,
    values: &[String],
    metric: Metric,
    region: Region,
) -> Result<Vec<(String, MetricDistribution)>> {
    if values.is_empty() {
        return Err(Error::Config("sweep requires at least one value".into()));
    }
    values
        .iter()
        .map(|v| {
            let scenario = axis.apply(base, v)?;
            let mut dist = run_cdf(&scenario, metric, region)?;
            dist.source = format!("{}:{v}", dist.source);
            Ok((v.clone(), dist))
        })
        .collect()
}
