//! Configuration fingerprinting. Every emitted file embeds an FNV-1a hash of
//! the inputs that produced it, so `verify` can flag stale outputs.

use hylink_core::calib::Calibration;
use hylink_core::sweep::SweepSpec;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Fingerprint over the scenario document, the calibration, and the sweep
/// parameters. Field order in the serialized calibration is fixed by the
/// struct definition, so the digest is stable.
pub fn config_hash(scenario_toml: &str, calib: &Calibration, spec: &SweepSpec) -> u64 {
    let calib_doc = toml::to_string(calib).unwrap_or_default();
    let modes: Vec<&str> = spec.modes.iter().map(|m| m.name()).collect();
    let tail = format!(
        "{};{};{};{};{};{:?};{:?}",
        spec.kind.name(),
        spec.seed,
        spec.range.start,
        spec.range.stop,
        spec.range.step,
        modes,
        spec.fading,
    );
    let mut bytes = Vec::with_capacity(scenario_toml.len() + calib_doc.len() + tail.len());
    bytes.extend_from_slice(scenario_toml.as_bytes());
    bytes.extend_from_slice(calib_doc.as_bytes());
    bytes.extend_from_slice(tail.as_bytes());
    fnv1a64(&bytes)
}

/// Fingerprint of a standalone MAC simulation run.
pub fn mac_sim_hash(
    cells: u32,
    devices: u32,
    duration_ms: u64,
    seed: u64,
    superframe: &hylink_core::mac::Superframe,
) -> u64 {
    fnv1a64(
        format!(
            "mac-sim;{cells};{devices};{duration_ms};{seed};{};{};{};{}",
            superframe.beacon_interval_ms,
            superframe.cap_slots,
            superframe.data_slots,
            superframe.bands
        )
        .as_bytes(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use hylink_core::sweep::{SweepKind, SweepSpec};

    #[test]
    fn fnv_reference_vector() {
        // FNV-1a 64 of "a" is 0xaf63dc4c8601ec8c
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
    }

    #[test]
    fn hash_tracks_every_input() {
        let calib = Calibration::default();
        let spec = SweepSpec::new(SweepKind::SinrVsDistance, 42);
        let base = config_hash("scenario", &calib, &spec);
        assert_eq!(base, config_hash("scenario", &calib, &spec));
        assert_ne!(base, config_hash("other", &calib, &spec));
        let mut spec2 = spec.clone();
        spec2.seed = 43;
        assert_ne!(base, config_hash("scenario", &calib, &spec2));
        let mut calib2 = calib.clone();
        calib2.energy.video_demand_bps += 1.0;
        assert_ne!(base, config_hash("scenario", &calib2, &spec));
    }
}
