//! Scenario and calibration file handling.
//!
//! The scenario file is a TOML document with the keys `floor`, `aps`, `ues`,
//! and `seed`; the bundled `scenarios/campus_floor3.toml` reproduces the
//! reference third-floor layout and is used whenever no path is given.

use std::fs;
use std::path::Path;

use hylink_core::calib::Calibration;
use hylink_core::scenario::Scenario;

use crate::CliError;

/// The bundled default scenario, compiled in so the tool runs standalone.
pub const DEFAULT_SCENARIO_TOML: &str = include_str!("../../../scenarios/campus_floor3.toml");

/// Load and validate a scenario file; `None` loads the bundled default.
/// Returns the raw TOML alongside (it feeds the config fingerprint).
pub fn load_scenario(
    path: Option<&Path>,
    strict_paper: bool,
) -> Result<(Scenario, String), CliError> {
    let raw = match path {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| CliError::Config(format!("cannot read scenario {}: {e}", p.display())))?,
        None => DEFAULT_SCENARIO_TOML.to_string(),
    };
    let scenario: Scenario = toml::from_str(&raw)
        .map_err(|e| CliError::Config(format!("scenario parse error: {e}")))?;
    scenario
        .validate(strict_paper)
        .map_err(CliError::config)?;
    Ok((scenario, raw))
}

/// Load a calibration override, or the shipped defaults.
pub fn load_calibration(path: Option<&Path>) -> Result<Calibration, CliError> {
    match path {
        None => Ok(Calibration::default()),
        Some(p) => {
            let raw = fs::read_to_string(p).map_err(|e| {
                CliError::Config(format!("cannot read calibration {}: {e}", p.display()))
            })?;
            let calib: Calibration = toml::from_str(&raw)
                .map_err(|e| CliError::Config(format!("calibration parse error: {e}")))?;
            calib
                .validate()
                .map_err(|m| CliError::Config(format!("calibration: {m}")))?;
            Ok(calib)
        }
    }
}

/// Serialize a calibration to TOML (the `calibrate` output format).
pub fn calibration_to_toml(calib: &Calibration) -> Result<String, CliError> {
    toml::to_string_pretty(calib).map_err(CliError::runtime)
}
