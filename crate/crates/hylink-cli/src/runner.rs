//! Sweep orchestration: builds the context from files and flags, schedules
//! rows over a bounded worker pool, and writes the outputs.
//!
//! Rows are pure functions of their index, so workers pull indices from a
//! shared counter and the gathered rows are re-sorted by index before the
//! write. Output bytes are identical for any worker count.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use hylink_core::rf::FadingMode;
use hylink_core::sweep::{self, PreparedSweep, SweepKind, SweepMode, SweepOutput, SweepSpec, XRange};

use crate::config;
use crate::csvout;
use crate::hash;
use crate::CliError;

/// Everything `run`, `report`, and `verify` need to rebuild a sweep.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub scenario_path: Option<PathBuf>,
    pub calibration_path: Option<PathBuf>,
    pub seed: Option<u64>,
    pub modes: Option<Vec<SweepMode>>,
    pub range: Option<XRange>,
    pub strict_paper: bool,
    pub deterministic_fading: bool,
    pub workers: usize,
}

/// Context plus the raw scenario text that feeds the fingerprint.
pub struct LoadedConfig {
    pub ctx: sweep::SweepContext,
    pub scenario_seed: u64,
    pub scenario_toml: String,
}

pub fn load(opts: &RunOptions) -> Result<LoadedConfig, CliError> {
    let (scenario, raw) = config::load_scenario(opts.scenario_path.as_deref(), opts.strict_paper)?;
    let calib = config::load_calibration(opts.calibration_path.as_deref())?;
    let ctx = sweep::SweepContext {
        calib,
        ..sweep::SweepContext::default()
    }
    .with_scenario(&scenario);
    Ok(LoadedConfig {
        ctx,
        scenario_seed: scenario.seed,
        scenario_toml: raw,
    })
}

/// Build the effective spec for a kind under the given options.
pub fn build_spec(kind: SweepKind, opts: &RunOptions, scenario_seed: u64) -> SweepSpec {
    SweepSpec {
        kind,
        modes: opts.modes.clone().unwrap_or_else(|| kind.default_modes()),
        range: opts.range.unwrap_or_else(|| kind.default_range()),
        seed: opts.seed.unwrap_or(scenario_seed),
        fading: if opts.deterministic_fading {
            FadingMode::Deterministic
        } else {
            FadingMode::Rayleigh
        },
    }
}

/// Compute all rows of a prepared sweep across `workers` threads.
pub fn compute_rows(prepared: &PreparedSweep<'_>, workers: usize) -> Vec<Vec<f64>> {
    let n = prepared.row_count();
    let workers = workers.max(1).min(n.max(1));
    if workers == 1 {
        return (0..n).map(|i| prepared.compute_row(i)).collect();
    }
    let next = AtomicUsize::new(0);
    let collected: Mutex<Vec<(usize, Vec<f64>)>> = Mutex::new(Vec::with_capacity(n));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                let mut local: Vec<(usize, Vec<f64>)> = Vec::new();
                loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= n {
                        break;
                    }
                    local.push((i, prepared.compute_row(i)));
                }
                collected.lock().unwrap().extend(local);
            });
        }
    });
    let mut rows = collected.into_inner().unwrap();
    rows.sort_by_key(|(i, _)| *i);
    rows.into_iter().map(|(_, r)| r).collect()
}

/// Run one sweep end to end, returning the output and its fingerprint.
pub fn run_sweep(
    kind: SweepKind,
    opts: &RunOptions,
    loaded: &LoadedConfig,
) -> Result<(SweepOutput, u64), CliError> {
    let spec = build_spec(kind, opts, loaded.scenario_seed);
    let digest = hash::config_hash(&loaded.scenario_toml, &loaded.ctx.calib, &spec);
    let prepared = sweep::prepare(&loaded.ctx, spec).map_err(CliError::config)?;
    let rows = compute_rows(&prepared, opts.workers);
    let mut output = prepared.into_result(rows);
    output.result.meta.config_hash = Some(digest);
    Ok((output, digest))
}

/// Run a sweep and write `<out_dir>/<kind>.csv` (plus the handover event log
/// when the walker produced events). Returns the written paths.
pub fn run_and_write(
    kind: SweepKind,
    opts: &RunOptions,
    loaded: &LoadedConfig,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let (output, _) = run_sweep(kind, opts, loaded)?;
    let mut written = Vec::new();

    let path = out_dir.join(format!("{}.csv", kind.name()));
    csvout::write_atomic(&path, &csvout::render_csv(&output.result))?;
    written.push(path);

    // the SINR sweep is the canonical source of the handover event log;
    // other sweeps walk the same policy internally but do not re-emit it
    if kind == SweepKind::SinrVsDistance && !output.handover_events.is_empty() {
        let path = out_dir.join("handover_events.csv");
        csvout::write_atomic(
            &path,
            &csvout::render_handover_csv(&output.handover_events, &output.result.meta),
        )?;
        written.push(path);
    }
    Ok(written)
}

/// The sweeps a summary report aggregates; its fingerprint is their xor.
pub const REPORT_KINDS: [SweepKind; 4] = [
    SweepKind::SarVsDepth,
    SweepKind::PdVsDepth,
    SweepKind::EeVsDistance,
    SweepKind::BatteryVsDistance,
];

/// Re-derive the fingerprint of an emitted file from the current config and
/// compare it to the embedded one.
pub fn verify_file(path: &Path, opts: &RunOptions) -> Result<bool, CliError> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let embedded = csvout::metadata_value(&content, "config_hash")
        .ok_or_else(|| CliError::Config(format!("{}: no config_hash metadata", path.display())))?;
    let embedded = u64::from_str_radix(embedded.trim(), 16)
        .map_err(|e| CliError::Config(format!("{}: bad config_hash: {e}", path.display())))?;

    // standalone MAC simulation dumps carry their own parameter fingerprint
    if let Some(cells) = csvout::metadata_value(&content, "cells") {
        let get = |key: &str| -> Result<u64, CliError> {
            csvout::metadata_value(&content, key)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| CliError::Config(format!("{}: missing {key} metadata", path.display())))
        };
        let cells: u32 = cells
            .trim()
            .parse()
            .map_err(|e| CliError::Config(format!("{}: bad cells: {e}", path.display())))?;
        let devices = get("devices")? as u32;
        let duration = get("duration_ms")?;
        let seed = get("seed")?;
        let superframe = hylink_core::mac::Superframe {
            beacon_interval_ms: get("beacon_interval_ms")?,
            cap_slots: get("cap_slots")? as u32,
            data_slots: get("data_slots")? as u32,
            bands: get("bands")? as u32,
        };
        return Ok(hash::mac_sim_hash(cells, devices, duration, seed, &superframe) == embedded);
    }

    let seed: u64 = csvout::metadata_value(&content, "seed")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| CliError::Config(format!("{}: missing seed metadata", path.display())))?;
    let fading = match csvout::metadata_value(&content, "fading") {
        Some("rayleigh") => FadingMode::Rayleigh,
        _ => FadingMode::Deterministic,
    };

    // summary reports aggregate the four default sweeps
    if csvout::metadata_value(&content, "calibration").is_some() {
        let loaded = load(opts)?;
        let mut expected = 0u64;
        for kind in REPORT_KINDS {
            let spec = SweepSpec {
                kind,
                modes: kind.default_modes(),
                range: kind.default_range(),
                seed,
                fading,
            };
            expected ^= hash::config_hash(&loaded.scenario_toml, &loaded.ctx.calib, &spec);
        }
        return Ok(expected == embedded);
    }

    let kind = csvout::metadata_value(&content, "kind")
        .and_then(SweepKind::from_name)
        .ok_or_else(|| CliError::Config(format!("{}: missing kind metadata", path.display())))?;
    let modes = csvout::metadata_value(&content, "modes")
        .map(|s| {
            s.split(',')
                .filter(|p| !p.is_empty())
                .filter_map(SweepMode::from_name)
                .collect::<Vec<_>>()
        })
        .unwrap_or_default();
    let range = csvout::metadata_value(&content, "range")
        .and_then(parse_range)
        .ok_or_else(|| CliError::Config(format!("{}: missing range metadata", path.display())))?;

    let loaded = load(opts)?;
    let spec = SweepSpec {
        kind,
        modes,
        range,
        seed,
        fading,
    };
    let expected = hash::config_hash(&loaded.scenario_toml, &loaded.ctx.calib, &spec);
    Ok(expected == embedded)
}

/// Parse `start:stop:step`.
pub fn parse_range(s: &str) -> Option<XRange> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    if parts.len() != 3 {
        return None;
    }
    Some(XRange::new(
        parts[0].parse().ok()?,
        parts[1].parse().ok()?,
        parts[2].parse().ok()?,
    ))
}

/// Parse a comma-separated mode list.
pub fn parse_modes(s: &str) -> Result<Vec<SweepMode>, CliError> {
    s.split(',')
        .map(|p| {
            SweepMode::from_name(p.trim())
                .ok_or_else(|| CliError::Config(format!("unknown mode `{p}`")))
        })
        .collect()
}
