//! Command-line front end: scenario ingestion, experiment execution, and
//! CSV emission with a JSON run manifest alongside every output set.
//!
//! Subcommands: `dist`, `map`, `cdf`, `sweep`, `outage`. Scenario configs
//! are JSON mirroring [`Scenario`]; unknown keys are a hard error. All
//! values cross the CLI boundary in dB; everything inside stays linear.
//! Repeat runs with the same config and seed produce byte-identical files.
//! `LEOLINK_THREADS` caps the engine's thread count (results do not
//! depend on it).

use crate::error::{Error, Result};
use crate::sim_engine::{
    run_cdf, run_spatial_map, sweep as engine_sweep, with_thread_count, CdfData, Metric,
    MetricDistribution, Region, Scenario, SpatialMap, Statistic, SweepAxis,
};
use crate::sr_stats::{
    prob_not_noise_limited, snr_outage, ssr_cdf_int, ssr_cdf_on_grid, ssr_pdf, ssr_pdf_int,
    ShadowingLevel, SrParams, SsrDistribution,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "leolink", version, about = "Multi-beam LEO satellite downlink simulator")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory for CSV files and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the squared-SR PDF or CDF on a grid.
    Dist(DistArgs),
    /// Map a metric over ground-user positions.
    Map(MapArgs),
    /// Pooled metric CDF across user locations and channel realizations.
    Cdf(CdfArgs),
    /// CDFs swept along one axis (elevation, shadowing or reuse).
    Sweep(SweepArgs),
    /// Closed-form SNR outage and noise-limitedness per user point.
    Outage(OutageArgs),
}

#[derive(Args, Debug)]
struct DistArgs {
    /// Tabulated shadowing level (light, average, heavy).
    #[arg(long, conflicts_with_all = ["b", "m", "omega"])]
    level: Option<String>,
    /// Half the NLOS average power (with --m and --omega).
    #[arg(long, requires_all = ["m", "omega"])]
    b: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    /// pdf or cdf.
    #[arg(long, default_value = "pdf")]
    which: String,
    /// general, integer, or both.
    #[arg(long, default_value = "both")]
    mode: String,
    #[arg(long, default_value_t = 0.0)]
    min: f64,
    #[arg(long, default_value_t = 5.0)]
    max: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

#[derive(Args, Debug)]
struct MapArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    metric: String,
    /// large-scale, single-realization, or mean.
    #[arg(long, default_value = "large-scale")]
    statistic: String,
}

#[derive(Args, Debug)]
struct CdfArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    metric: String,
    /// center-cell or footprint.
    #[arg(long, default_value = "center-cell")]
    region: String,
    /// Optional sweep axis; with --values this behaves like `sweep`.
    #[arg(long, requires = "values")]
    axis: Option<String>,
    #[arg(long, value_delimiter = ',')]
    values: Vec<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    metric: String,
    #[arg(long)]
    axis: String,
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<String>,
    #[arg(long, default_value = "center-cell")]
    region: String,
}

#[derive(Args, Debug)]
struct OutageArgs {
    #[arg(long)]
    config: PathBuf,
    /// Thresholds in dB, comma-separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    thresholds: Vec<f64>,
}

/// Written alongside every output set.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub seed: u64,
    pub tool_version: String,
    pub outputs: Vec<String>,
}

/// Parse `std::env::args`, execute, report errors on stderr; returns the
/// process exit code.
pub fn run() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    match Cli::try_parse_from(&argv) {
        Ok(cli) => {
            let threads = std::env::var("LEOLINK_THREADS")
                .ok()
                .and_then(|v| v.parse::<usize>().ok());
            match with_thread_count(threads, || execute(&cli, &argv.join(" "))) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            // clap handles --help/--version with its own formatting
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}

/// Execute a parsed invocation. Exposed for integration tests.
pub fn execute(cli: &Cli, command_line: &str) -> Result<()> {
    match &cli.command {
        Command::Dist(a) => cmd_dist(a, cli, command_line),
        Command::Map(a) => cmd_map(a, cli, command_line),
        Command::Cdf(a) => cmd_cdf(a, cli, command_line),
        Command::Sweep(a) => {
            let cdf_args = CdfArgs {
                config: a.config.clone(),
                metric: a.metric.clone(),
                region: a.region.clone(),
                axis: Some(a.axis.clone()),
                values: a.values.clone(),
            };
            cmd_cdf(&cdf_args, cli, command_line)
        }
        Command::Outage(a) => cmd_outage(a, cli, command_line),
    }
}

pub fn parse_cli_from<I, T>(args: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(args)
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq)]
enum DistMode {
    General,
    Integer,
    Both,
}

fn cmd_dist(a: &DistArgs, cli: &Cli, command_line: &str) -> Result<()> {
    let params = match (&a.level, a.b, a.m, a.omega) {
        (Some(level), None, None, None) => ShadowingLevel::from_name(level)?.params(),
        (None, Some(b), Some(m), Some(omega)) => SrParams::new(b, m, omega)?,
        _ => {
            return Err(Error::Config(
                "provide either --level or all of --b, --m, --omega".into(),
            ))
        }
    };
    let mode = match a.mode.as_str() {
        "general" => DistMode::General,
        "integer" => DistMode::Integer,
        "both" => DistMode::Both,
        other => return Err(Error::Config(format!("unknown mode '{other}'"))),
    };
    if a.which != "pdf" && a.which != "cdf" {
        return Err(Error::Config(format!("unknown --which '{}'", a.which)));
    }
    if !(a.step > 0.0 && a.max > a.min && a.min >= 0.0) {
        return Err(Error::Config("need min >= 0, max > min, step > 0".into()));
    }

    let n = ((a.max - a.min) / a.step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..n).map(|i| a.min + i as f64 * a.step).collect();
    let dist = SsrDistribution::new(params);

    let general: Option<Vec<f64>> = if mode != DistMode::Integer {
        Some(match a.which.as_str() {
            "pdf" => grid.iter().map(|&y| ssr_pdf(&params, y)).collect::<Result<_>>()?,
            _ => ssr_cdf_on_grid(&params, &grid)?,
        })
    } else {
        None
    };
    let integer: Option<Vec<f64>> = if mode != DistMode::General {
        Some(
            grid.iter()
                .map(|&y| match a.which.as_str() {
                    "pdf" => ssr_pdf_int(&dist, y),
                    _ => ssr_cdf_int(&dist, y),
                })
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };

    let mut csv = String::new();
    match (&general, &integer) {
        (Some(g), Some(i)) => {
            csv.push_str("y,general,integer\n");
            for (k, &y) in grid.iter().enumerate() {
                let _ = writeln!(csv, "{},{},{}", g12(y), g12(g[k]), g12(i[k]));
            }
        }
        (Some(v), None) | (None, Some(v)) => {
            csv.push_str("y,value\n");
            for (k, &y) in grid.iter().enumerate() {
                let _ = writeln!(csv, "{},{}", g12(y), g12(v[k]));
            }
        }
        (None, None) => unreachable!(),
    }

    let digest_src = serde_json::json!({
        "params": params, "which": a.which, "mode": a.mode,
        "min": a.min, "max": a.max, "step": a.step,
    });
    let file = format!("dist_{}.csv", a.which);
    emit(cli, command_line, &digest(&digest_src.to_string()), 0, &[(file, csv)])
}

fn load_scenario(path: &Path, seed_override: Option<u64>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut scenario: Scenario = serde_json::from_str(&text).map_err(|e| {
        Error::Config(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
    })?;
    if let Some(seed) = seed_override {
        scenario.seed = seed;
    }
    scenario.validate()?;
    Ok(scenario)
}

fn cmd_map(a: &MapArgs, cli: &Cli, command_line: &str) -> Result<()> {
    let scenario = load_scenario(&a.config, cli.seed)?;
    let metric = Metric::from_name(&a.metric)?;
    let statistic = Statistic::from_name(&a.statistic)?;
    let map = run_spatial_map(&scenario, metric, statistic)?;
    let csv = map_csv(&map);
    let file = format!("map_{}_{}.csv", a.metric, a.statistic);
    emit(cli, command_line, &scenario.fingerprint(), scenario.seed, &[(file, csv)])
}

fn map_csv(map: &SpatialMap) -> String {
    let mut csv = String::from("x_km,y_km,value_dB\n");
    for iy in 0..map.shape.ny {
        for ix in 0..map.shape.nx {
            let (x, y) = map.shape.point(iy, ix);
            let _ = writeln!(csv, "{},{},{}", g12(x), g12(y), g12(map.value_at(iy, ix)));
        }
    }
    csv
}

/// Empirical CDFs are serialized on a fixed 2000-point percentile grid.
fn cdf_csv(dist: &MetricDistribution) -> String {
    let mut csv = String::from("value_dB,cum_prob\n");
    match &dist.data {
        CdfData::Empirical { .. } => {
            for k in 1..=2000u32 {
                let p = (f64::from(k) - 0.5) / 2000.0 * 100.0;
                let _ = writeln!(csv, "{},{}", g12(dist.percentile(p)), g12(p / 100.0));
            }
        }
        CdfData::ClosedForm { grid_db, cum_prob } => {
            for (g, c) in grid_db.iter().zip(cum_prob) {
                let _ = writeln!(csv, "{},{}", g12(*g), g12(*c));
            }
        }
    }
    csv
}

fn cmd_cdf(a: &CdfArgs, cli: &Cli, command_line: &str) -> Result<()> {
    let scenario = load_scenario(&a.config, cli.seed)?;
    let metric = Metric::from_name(&a.metric)?;
    let region = Region::from_name(&a.region)?;

    let mut files: Vec<(String, String)> = Vec::new();
    match &a.axis {
        None => {
            let dist = run_cdf(&scenario, metric, region)?;
            files.push((format!("cdf_{}.csv", a.metric), cdf_csv(&dist)));
        }
        Some(axis_name) => {
            let axis = SweepAxis::from_name(axis_name)?;
            let results = engine_sweep(&scenario, axis, &a.values, metric, region)?;
            let mut combined = String::from("sweep_value,value_dB,cum_prob\n");
            for (value, dist) in &results {
                let per = cdf_csv(dist);
                // long-format rows reuse the per-value body
                for line in per.lines().skip(1) {
                    let _ = writeln!(combined, "{value},{line}");
                }
                files.push((format!("cdf_{}_{}_{}.csv", a.metric, axis_name, value), per));
            }
            files.push((format!("cdf_{}_{}_combined.csv", a.metric, axis_name), combined));
        }
    }
    emit(cli, command_line, &scenario.fingerprint(), scenario.seed, &files)
}

fn cmd_outage(a: &OutageArgs, cli: &Cli, command_line: &str) -> Result<()> {
    let scenario = load_scenario(&a.config, cli.seed)?;
    if a.thresholds.is_empty() {
        return Err(Error::Config("at least one threshold is required".into()));
    }
    let eval = crate::sim_engine::evaluate_links(&scenario)?;
    let dist = SsrDistribution::new(scenario.shadowing.params());

    let mut csv = String::from("user_x,user_y,threshold_dB,p_snr_outage,p_not_noise_limited\n");
    for (i, point) in eval.points.iter().enumerate() {
        let link = &eval.links[i];
        // P(SNR <= SIR) does not depend on the threshold
        let p_nnl = if link.inr_bar > 0.0 {
            prob_not_noise_limited(link.snr_bar, link.sir, &dist)?
        } else {
            // no co-channel interference: SNR <= SIR holds surely
            1.0
        };
        for &thr_db in &a.thresholds {
            let p_out = snr_outage(link.snr_bar, &dist, crate::db_to_linear(thr_db))?;
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                g12(point.x_km),
                g12(point.y_km),
                g12(thr_db),
                g12(p_out),
                g12(p_nnl)
            );
        }
    }
    emit(cli, command_line, &scenario.fingerprint(), scenario.seed, &[("outage.csv".into(), csv)])
}

// ---------------------------------------------------------------------------
// output plumbing
// ---------------------------------------------------------------------------

fn digest(text: &str) -> String {
    let d = Sha256::digest(text.as_bytes());
    let mut hex = String::with_capacity(64);
    for b in d {
        let _ = write!(hex, "{b:02x}");
    }
    hex
}

/// Write every CSV and the manifest. Files are only created once all
/// results are computed, so failures never leave partial output behind.
fn emit(
    cli: &Cli,
    command_line: &str,
    config_digest: &str,
    seed: u64,
    files: &[(String, String)],
) -> Result<()> {
    std::fs::create_dir_all(&cli.out)?;
    let mut outputs = Vec::new();
    for (name, body) in files {
        let path = cli.out.join(name);
        std::fs::write(&path, body)?;
        outputs.push(path.display().to_string());
    }
    let manifest = RunManifest {
        command: command_line.to_string(),
        config_digest: config_digest.to_string(),
        seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs,
    };
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
    text.push('\n');
    std::fs::write(cli.out.join("manifest.json"), text)?;
    Ok(())
}

/// Fixed 12-significant-digit decimal formatting (deterministic across
/// runs and platforms).
pub fn g12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("scientific form");
    let e: i32 = exp.parse().expect("exponent");
    if (-4..12).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        let trimmed = fixed.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        let m = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{e}")
    }
}
