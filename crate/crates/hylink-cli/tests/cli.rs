//! End-to-end checks of the binary: subcommands, exit codes, file outputs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hylink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hylink"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn bundled_scenario() -> &'static Path {
    Path::new(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../scenarios/campus_floor3.toml"
    ))
}

#[test]
fn validate_accepts_the_bundled_scenario() {
    let out = hylink(&[
        "validate",
        bundled_scenario().to_str().unwrap(),
        "--strict-paper",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("10 APs"), "{stdout}");
}

#[test]
fn validate_rejects_garbage_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    fs::write(&path, "seed = \"not a number\"").unwrap();
    let out = hylink(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = hylink(&[
        "run",
        "ee-vs-distance",
        "--range",
        "0:10:0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_kind_and_mode_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = hylink(&["run", "bogus", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = hylink(&[
        "run",
        "ee-vs-distance",
        "--modes",
        "warp-drive",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unsupported_mode_for_kind_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = hylink(&[
        "run",
        "ee-vs-distance",
        "--modes",
        "active-mode",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_and_verify_accepts() {
    let dir = tempfile::tempdir().unwrap();
    let out = hylink(&[
        "run",
        "complexity-vs-distance",
        "--out",
        dir.path().to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    let csv = dir.path().join("complexity-vs-distance.csv");
    assert!(csv.exists());

    let out = hylink(&["verify", csv.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok"));

    // tampering with the metadata makes verify exit 3
    let content = fs::read_to_string(&csv).unwrap();
    let tampered = content.replace("# seed: 7", "# seed: 8");
    fs::write(&csv, tampered).unwrap();
    let out = hylink(&["verify", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn runs_are_byte_identical_for_fixed_seed() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let out = hylink(&[
            "run",
            "sinr-vs-distance",
            "--out",
            d.path().to_str().unwrap(),
            "--seed",
            "99",
        ]);
        assert!(out.status.success());
    }
    let a = fs::read(d1.path().join("sinr-vs-distance.csv")).unwrap();
    let b = fs::read(d2.path().join("sinr-vs-distance.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seeded_fading_changes_with_seed() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for (d, seed) in [(&d1, "1"), (&d2, "2")] {
        let out = hylink(&[
            "run",
            "sinr-vs-distance",
            "--out",
            d.path().to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert!(out.status.success());
    }
    let a = fs::read_to_string(d1.path().join("sinr-vs-distance.csv")).unwrap();
    let b = fs::read_to_string(d2.path().join("sinr-vs-distance.csv")).unwrap();
    // drop the metadata block before comparing rows
    let rows = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| !l.starts_with('#'))
            .map(String::from)
            .collect()
    };
    assert_ne!(rows(&a), rows(&b), "Rayleigh fading must track the seed");
}

#[test]
fn deterministic_fading_flag_pins_the_wifi_curve() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for (d, seed) in [(&d1, "1"), (&d2, "2")] {
        let out = hylink(&[
            "run",
            "sinr-vs-distance",
            "--deterministic-fading",
            "--out",
            d.path().to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert!(out.status.success());
    }
    let rows = |p: &Path| -> Vec<String> {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(String::from)
            .collect()
    };
    assert_eq!(
        rows(&d1.path().join("sinr-vs-distance.csv")),
        rows(&d2.path().join("sinr-vs-distance.csv"))
    );
}

#[test]
fn mac_sim_writes_a_verifiable_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = hylink(&[
        "mac-sim",
        "--cells",
        "4",
        "--devices",
        "8",
        "--duration-ms",
        "2000",
        "--seed",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let path = dir.path().join("mac_trace.csv");
    let content = fs::read_to_string(&path).unwrap();
    assert!(content.contains("time_ms,cell_i,cell_j,device,event_kind,band,slot"));
    assert!(content.contains("# config_hash:"));

    let out = hylink(&["verify", path.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn report_emits_calibrated_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = hylink(&["report", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let path = dir.path().join("summary.csv");
    let summary = fs::read_to_string(&path).unwrap();
    assert!(summary.contains("# calibration: calibrated"));
    assert!(summary.contains("sar_reduction"));
    assert!(summary.contains("absorbed_pd_reduction"));
    assert!(summary.contains("ee_improvement"));
    assert!(summary.contains("battery_life_delta"));

    // the summary fingerprint is re-checkable like any other output
    let out = hylink(&["verify", path.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn handover_log_is_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let out = hylink(&[
        "run",
        "sinr-vs-distance",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let path = dir.path().join("handover_events.csv");
    let out = hylink(&["verify", path.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn scenario_policy_override_moves_the_handover() {
    // raising the SINR floor to 5 dB pulls the intra handover in from ~79 m
    let base = fs::read_to_string(bundled_scenario()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strict-policy.toml");
    fs::write(&path, format!("{base}\n[policy]\nvlc_min_sinr_db = 5.0\n")).unwrap();

    let out = hylink(&[
        "run",
        "sinr-vs-distance",
        "--scenario",
        path.to_str().unwrap(),
        "--deterministic-fading",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let events = fs::read_to_string(dir.path().join("handover_events.csv")).unwrap();
    let intra_time: f64 = events
        .lines()
        .find(|l| l.contains("intra-vlc"))
        .and_then(|l| l.split(',').next())
        .and_then(|t| t.parse().ok())
        .expect("intra handover logged");
    assert!(
        (60.0..75.0).contains(&intra_time),
        "intra handover at {intra_time} m under the 5 dB floor"
    );
}

#[test]
fn strict_paper_flag_gates_ap_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("thin.toml");
    fs::write(
        &path,
        r#"
seed = 3
[floor]
width_m = 40.0
depth_m = 30.0
[[aps]]
id = "wifi-1"
kind = "wi-fi"
position = { x = 1.0, y = 1.0, z = 2.8 }
p_on_w = 10.0
p_data_max_w = 4.0
[aps.wifi]
"#,
    )
    .unwrap();
    let ok = hylink(&["validate", path.to_str().unwrap()]);
    assert!(ok.status.success());
    let strict = hylink(&["validate", path.to_str().unwrap(), "--strict-paper"]);
    assert_eq!(strict.status.code(), Some(2));
}
