use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hylink_cli::config;
use hylink_cli::csvout;
use hylink_cli::hash;
use hylink_cli::report;
use hylink_cli::runner::{self, RunOptions};
use hylink_cli::CliError;
use hylink_core::calib::{
    Calibration, COMPLEXITY_ACTIVE_ANCHOR_PCT, COMPLEXITY_PURE_VLC_ANCHOR_PCT,
};
use hylink_core::exposure::BioheatOptions;
use hylink_core::sweep::{self, SweepKind, SweepMode};

/// Deterministic link-level simulator for indoor hybrid RF+VLC access:
/// channel, handover, MAC, exposure, and energy sweeps with CSV outputs.
#[derive(Parser)]
#[command(name = "hylink", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Scenario file (TOML); the bundled third-floor layout when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Calibration override file (TOML); shipped defaults when omitted.
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Seed override (defaults to the scenario seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated mode list, e.g. `vlc,vlc-handover,wifi`.
    #[arg(long)]
    modes: Option<String>,
    /// Sweep grid as `start:stop:step`.
    #[arg(long)]
    range: Option<String>,
    /// Enforce the reference AP counts (6 Wi-Fi, 4 VLC).
    #[arg(long)]
    strict_paper: bool,
    /// Fading magnitude pinned to 1 instead of seeded Rayleigh draws.
    #[arg(long)]
    deterministic_fading: bool,
    /// Worker threads for sweep rows.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

impl CommonOpts {
    fn to_run_options(&self) -> Result<RunOptions, CliError> {
        let modes = match &self.modes {
            Some(s) => Some(runner::parse_modes(s)?),
            None => None,
        };
        let range = match &self.range {
            Some(s) => Some(
                runner::parse_range(s)
                    .ok_or_else(|| CliError::Config(format!("bad range `{s}`")))?,
            ),
            None => None,
        };
        Ok(RunOptions {
            scenario_path: self.scenario.clone(),
            calibration_path: self.calibration.clone(),
            seed: self.seed,
            modes,
            range,
            strict_paper: self.strict_paper,
            deterministic_fading: self.deterministic_fading,
            workers: self.workers,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one sweep (or `all`) and write CSV outputs.
    Run {
        /// Sweep kind: sinr-vs-distance, ee-vs-distance, battery-vs-distance,
        /// sar-vs-depth, pd-vs-depth, temp-field, complexity-vs-distance,
        /// mac-trace, or `all`.
        kind: String,
        #[command(flatten)]
        opts: CommonOpts,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Parse and validate a scenario file.
    Validate {
        scenario: PathBuf,
        #[arg(long)]
        strict_paper: bool,
    },
    /// Compute the summary report (headline reductions and energy metrics).
    Report {
        #[command(flatten)]
        opts: CommonOpts,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the optical-cell MAC simulation and dump its event trace.
    MacSim {
        #[arg(long, default_value_t = 3)]
        cells: u32,
        #[arg(long, default_value_t = 6)]
        devices: u32,
        #[arg(long, default_value_t = 3000)]
        duration_ms: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        beacon_interval_ms: u64,
        #[arg(long, default_value_t = 8)]
        cap_slots: u32,
        #[arg(long, default_value_t = 16)]
        data_slots: u32,
        #[arg(long, default_value_t = 3)]
        bands: u32,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Regenerate the fitted calibration values from their anchors.
    Calibrate {
        /// Write the calibration TOML here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Starting calibration (defaults to the shipped one).
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Re-check the config fingerprints embedded in emitted files.
    Verify {
        files: Vec<PathBuf>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { kind, opts, out } => cmd_run(&kind, &opts, &out),
        Command::Validate {
            scenario,
            strict_paper,
        } => cmd_validate(&scenario, strict_paper),
        Command::Report { opts, out } => cmd_report(&opts, &out),
        Command::MacSim {
            cells,
            devices,
            duration_ms,
            seed,
            beacon_interval_ms,
            cap_slots,
            data_slots,
            bands,
            out,
        } => {
            let superframe = hylink_core::mac::Superframe {
                beacon_interval_ms,
                cap_slots,
                data_slots,
                bands,
            };
            cmd_mac_sim(cells, devices, duration_ms, seed, superframe, &out)
        }
        Command::Calibrate { out, calibration } => cmd_calibrate(out.as_deref(), calibration.as_deref()),
        Command::Verify {
            files,
            scenario,
            calibration,
        } => cmd_verify(&files, scenario, calibration),
    }
}

fn cmd_run(kind: &str, opts: &CommonOpts, out: &Path) -> Result<(), CliError> {
    let run_opts = opts.to_run_options()?;
    let loaded = runner::load(&run_opts)?;
    let kinds: Vec<SweepKind> = if kind == "all" {
        SweepKind::ALL.to_vec()
    } else {
        vec![SweepKind::from_name(kind)
            .ok_or_else(|| CliError::Config(format!("unknown sweep kind `{kind}`")))?]
    };
    if kind == "all" && (run_opts.modes.is_some() || run_opts.range.is_some()) {
        eprintln!("note: --modes and --range apply per kind; `run all` uses each kind's defaults");
    }
    for k in kinds {
        // explicit modes/range only make sense for a single kind
        let per_kind = if kind == "all" {
            RunOptions {
                modes: None,
                range: None,
                ..run_opts.clone()
            }
        } else {
            run_opts.clone()
        };
        let written = runner::run_and_write(k, &per_kind, &loaded, out)?;
        for path in written {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_validate(scenario: &Path, strict_paper: bool) -> Result<(), CliError> {
    let (s, _) = config::load_scenario(Some(scenario), strict_paper)?;
    println!(
        "ok: {} rooms, {} APs, {} UEs, seed {}",
        s.floor.rooms.len(),
        s.aps.len(),
        s.ues.len(),
        s.seed
    );
    Ok(())
}

fn cmd_report(opts: &CommonOpts, out: &Path) -> Result<(), CliError> {
    let run_opts = opts.to_run_options()?;
    let loaded = runner::load(&run_opts)?;
    let mut results = Vec::new();
    let mut digest = 0u64;
    for kind in runner::REPORT_KINDS {
        let per_kind = RunOptions {
            modes: None,
            range: None,
            ..run_opts.clone()
        };
        let (output, h) = runner::run_sweep(kind, &per_kind, &loaded)?;
        digest ^= h;
        results.push(output.result);
    }
    let summary = report::report_summary(&results, SweepMode::Wifi, SweepMode::Vlc, &loaded.ctx)?;
    let meta = report::SummaryMeta {
        tool_version: format!("hylink {}", env!("CARGO_PKG_VERSION")),
        seed: run_opts.seed.unwrap_or(loaded.scenario_seed),
        fading: if run_opts.deterministic_fading {
            hylink_core::rf::FadingMode::Deterministic
        } else {
            hylink_core::rf::FadingMode::Rayleigh
        },
        config_hash: digest,
    };
    let rendered = report::render_summary(&summary, &meta);
    let path = out.join("summary.csv");
    csvout::write_atomic(&path, &rendered)?;
    print!("{rendered}");
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_mac_sim(
    cells: u32,
    devices: u32,
    duration_ms: u64,
    seed: u64,
    superframe: hylink_core::mac::Superframe,
    out: &Path,
) -> Result<(), CliError> {
    if cells == 0 || devices == 0 {
        return Err(CliError::Config("cells and devices must be positive".into()));
    }
    if superframe.cap_slots == 0 || superframe.bands == 0 || superframe.data_slots == 0 {
        return Err(CliError::Config("superframe fields must be positive".into()));
    }
    let sim = sweep::scripted_mac_sim_with(cells, devices, duration_ms, seed, superframe);
    let digest = hash::mac_sim_hash(cells, devices, duration_ms, seed, &superframe);
    let mut content = format!(
        "# hylink {}\n# cells: {cells}\n# devices: {devices}\n# duration_ms: {duration_ms}\n# seed: {seed}\n# beacon_interval_ms: {}\n# cap_slots: {}\n# data_slots: {}\n# bands: {}\n# config_hash: {digest:016x}\n",
        env!("CARGO_PKG_VERSION"),
        superframe.beacon_interval_ms,
        superframe.cap_slots,
        superframe.data_slots,
        superframe.bands
    );
    content.push_str(&sweep::mac_trace_header().join(","));
    content.push('\n');
    for e in sim.trace() {
        let row = sweep::mac_event_row(e);
        let cells_str: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        content.push_str(&cells_str.join(","));
        content.push('\n');
    }
    let path = out.join("mac_trace.csv");
    csvout::write_atomic(&path, &content)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_calibrate(out: Option<&std::path::Path>, base: Option<&std::path::Path>) -> Result<(), CliError> {
    let mut calib: Calibration = config::load_calibration(base)?;

    // exposure: closed-form anchors, then the solver-backed multipliers
    calib.exposure.incident_ratio_vlc_over_wifi = calib.exposure.fit_incident_ratio();
    calib.exposure.alpha_vlc_per_m[0] = calib.exposure.fit_alpha_vlc_epidermis();
    let opts = BioheatOptions {
        duration_s: calib.exposure.duration_s,
        ..BioheatOptions::default()
    };
    calib.exposure.mode_pd_multipliers = calib
        .exposure
        .fit_mode_multipliers(&opts)
        .map_err(CliError::runtime)?;

    // complexity intercepts from the 60 m anchors
    let cx = &mut calib.energy.complexity;
    cx.active.base_w = hylink_core::calib::EnergyCalib::fit_active_intercept(
        COMPLEXITY_ACTIVE_ANCHOR_PCT,
        cx.active.slope_w_per_m,
        cx.sweep_max_m,
    );
    let active_max = cx.active.power_w(cx.sweep_max_m);
    cx.pure_vlc.base_w = hylink_core::calib::EnergyCalib::fit_pure_vlc_intercept(
        COMPLEXITY_PURE_VLC_ANCHOR_PCT,
        cx.pure_vlc.slope_w_per_m,
        active_max,
    );

    // demand behind the hybrid EE improvement anchor
    let ctx = sweep::SweepContext {
        calib: calib.clone(),
        ..sweep::SweepContext::default()
    };
    calib.energy.video_demand_bps =
        sweep::fit_video_demand(&ctx, calib.energy.ee_improvement_target_pct)
            .map_err(CliError::runtime)?;

    let doc = config::calibration_to_toml(&calib)?;
    match out {
        Some(path) => {
            csvout::write_atomic(path, &doc)?;
            println!("wrote {}", path.display());
        }
        None => print!("{doc}"),
    }
    Ok(())
}

fn cmd_verify(
    files: &[PathBuf],
    scenario: Option<PathBuf>,
    calibration: Option<PathBuf>,
) -> Result<(), CliError> {
    if files.is_empty() {
        return Err(CliError::Config("verify needs at least one file".into()));
    }
    let opts = RunOptions {
        scenario_path: scenario,
        calibration_path: calibration,
        ..RunOptions::default()
    };
    let mut all_ok = true;
    for f in files {
        let ok = runner::verify_file(f, &opts)?;
        println!("{}: {}", f.display(), if ok { "ok" } else { "MISMATCH" });
        all_ok &= ok;
    }
    if all_ok {
        Ok(())
    } else {
        Err(CliError::Runtime("config hash mismatch".into()))
    }
}
