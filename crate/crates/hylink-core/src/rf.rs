//! Wi-Fi wideband channel, SINR, and rate models.
//!
//! The channel composes a log-distance large-scale loss with a small-scale
//! fading magnitude: `h = sqrt(10^(-L(d)/10)) * h_w`. The large-scale model
//! is free-space loss at 1 m plus `10 eta log10(d)` with an indoor default
//! exponent of 3. Fading is a unit-mean-power Rayleigh magnitude drawn from
//! a seeded generator, or exactly 1 in deterministic mode.

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::maths;

/// Propagation speed used by the free-space intercept, m/s.
const LIGHT_SPEED_M_PER_S: f64 = 3.0e8;

/// Wi-Fi access-point parameters (defaults: 10 W on-power, 2 MHz channel at
/// 2.4 GHz, 14 W max consumption, -90 dBm noise level).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WifiApParams {
    /// Power to keep the AP on, watts.
    pub p_on_w: f64,
    /// Total RF transmit power, watts.
    pub p_rf_w: f64,
    /// Total channel bandwidth, Hz.
    pub bandwidth_hz: f64,
    /// Carrier frequency, Hz.
    pub carrier_hz: f64,
    /// Maximum AP power consumption, watts.
    pub p_max_w: f64,
    /// Integrated noise level over the channel bandwidth, dBm.
    pub noise_floor_dbm: f64,
    /// Efficiency factor scaling data-utilisation into electrical power.
    pub efficiency_factor: f64,
    /// Log-distance path-loss exponent eta.
    pub path_loss_exponent: f64,
}

impl Default for WifiApParams {
    fn default() -> Self {
        Self {
            p_on_w: 10.0,
            p_rf_w: 10.0,
            bandwidth_hz: 2e6,
            carrier_hz: 2.4e9,
            p_max_w: 14.0,
            noise_floor_dbm: -90.0,
            efficiency_factor: 0.1,
            path_loss_exponent: 3.0,
        }
    }
}

impl WifiApParams {
    /// Noise power spectral density implied by the integrated noise level,
    /// W/Hz (defaults give 5e-19, about -153 dBm/Hz).
    pub fn noise_density_w_per_hz(&self) -> f64 {
        maths::from_db(self.noise_floor_dbm - 30.0) / self.bandwidth_hz
    }

    /// Integrated noise power over the full channel, watts.
    pub fn noise_power_w(&self) -> f64 {
        maths::from_db(self.noise_floor_dbm - 30.0)
    }
}

/// One evaluated RF link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfLinkSample {
    /// Magnitude channel coefficient.
    pub gain: f64,
    /// Large-scale loss at the sample distance, dB.
    pub large_scale_loss_db: f64,
    /// Small-scale fading magnitude that was applied.
    pub fading: f64,
    /// Co-channel interference power at the receiver, watts.
    pub interference_w: f64,
}

/// OFDM sub-channel allocation for one user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubchannelAllocation {
    /// Indices of the granted sub-channels.
    pub subchannels: Vec<u32>,
    /// Bandwidth per sub-channel, Hz.
    pub delta_b_hz: f64,
    /// Transmit power per sub-channel, watts.
    pub delta_p_w: f64,
}

impl SubchannelAllocation {
    /// Aggregate bandwidth and power must fit inside the AP budget.
    pub fn validate(&self, ap: &WifiApParams) -> Result<(), RfError> {
        let n = self.subchannels.len() as f64;
        if self.delta_b_hz <= 0.0
            || n * self.delta_b_hz > ap.bandwidth_hz
            || n * self.delta_p_w > ap.p_rf_w
        {
            return Err(RfError::InvalidAllocation);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfError {
    /// Below the 0.1 m validity limit of the log-distance model.
    DistanceTooSmall,
    ZeroUsers,
    InvalidAllocation,
    GainCountMismatch,
}

impl fmt::Display for RfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RfError::DistanceTooSmall => write!(f, "path loss needs d >= 0.1 m"),
            RfError::ZeroUsers => write!(f, "shared rate needs at least one user"),
            RfError::InvalidAllocation => write!(f, "sub-channel allocation exceeds the AP budget"),
            RfError::GainCountMismatch => {
                write!(f, "one gain per allocated sub-channel is required")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RfError {}

/// Log-distance large-scale loss in dB: FSPL(1 m) + 10 eta log10(d).
pub fn path_loss_db(d_m: f64, carrier_hz: f64, exponent: f64) -> Result<f64, RfError> {
    if d_m < 0.1 {
        return Err(RfError::DistanceTooSmall);
    }
    let fspl_1m = 20.0 * maths::log10(4.0 * core::f64::consts::PI * carrier_hz / LIGHT_SPEED_M_PER_S);
    Ok(fspl_1m + 10.0 * exponent * maths::log10(d_m))
}

/// Magnitude channel coefficient: sqrt of the linear large-scale loss times
/// the fading sample.
pub fn rf_channel_gain(
    d_m: f64,
    fading_sample: f64,
    carrier_hz: f64,
    exponent: f64,
) -> Result<f64, RfError> {
    let loss_db = path_loss_db(d_m, carrier_hz, exponent)?;
    Ok(maths::sqrt(maths::from_db(-loss_db)) * fading_sample)
}

/// Per-sub-channel SINR: |h|^2 dP / (N0 dB + I).
pub fn rf_sinr(gain: f64, delta_p_w: f64, delta_b_hz: f64, n0_w_per_hz: f64, interference_w: f64) -> f64 {
    gain * gain * delta_p_w / (n0_w_per_hz * delta_b_hz + interference_w)
}

/// Sum-rate over the allocated sub-channels, one gain per sub-channel.
/// An empty allocation carries no data and returns zero.
pub fn rf_rate_subchannels(
    alloc: &SubchannelAllocation,
    gains: &[f64],
    n0_w_per_hz: f64,
) -> Result<f64, RfError> {
    if gains.len() != alloc.subchannels.len() {
        return Err(RfError::GainCountMismatch);
    }
    Ok(gains
        .iter()
        .map(|&h| {
            alloc.delta_b_hz
                * maths::log2(1.0 + h * h * alloc.delta_p_w / (n0_w_per_hz * alloc.delta_b_hz))
        })
        .sum())
}

/// Demand-shared achievable rate: the full band is split among `users`.
pub fn rf_rate_shared(
    bandwidth_hz: f64,
    gain: f64,
    p_rf_w: f64,
    n0_w_per_hz: f64,
    users: u32,
) -> Result<f64, RfError> {
    if users == 0 {
        return Err(RfError::ZeroUsers);
    }
    let sinr = gain * gain * p_rf_w / (n0_w_per_hz * bandwidth_hz);
    Ok(bandwidth_hz / users as f64 * maths::log2(1.0 + sinr))
}

/// Evaluate one RF link at a distance: large-scale loss plus the given
/// fading sample, with the interference the receiver currently sees.
pub fn sample_rf_link(
    d_m: f64,
    fading_sample: f64,
    ap: &WifiApParams,
    interference_w: f64,
) -> Result<RfLinkSample, RfError> {
    let loss_db = path_loss_db(d_m, ap.carrier_hz, ap.path_loss_exponent)?;
    Ok(RfLinkSample {
        gain: maths::sqrt(maths::from_db(-loss_db)) * fading_sample,
        large_scale_loss_db: loss_db,
        fading: fading_sample,
        interference_w,
    })
}

/// Small-scale fading mode for sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FadingMode {
    /// Fading magnitude exactly 1 (golden-file runs).
    Deterministic,
    /// Unit-mean-power Rayleigh magnitude from the run seed.
    Rayleigh,
}

/// One unit-mean-power Rayleigh magnitude: |h|^2 is Exp(1), so E[|h|^2] = 1.
pub fn rayleigh_unit_power<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    maths::sqrt(-maths::ln(1.0 - u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    const REL: f64 = 1e-9;

    fn rel_eq(a: f64, b: f64) -> bool {
        (a - b).abs() <= REL * b.abs().max(a.abs())
    }

    #[test]
    fn path_loss_oracles() {
        // 20 log10(4 pi 2.4e9 / 3e8) = 40.0459970...
        let one_metre = path_loss_db(1.0, 2.4e9, 3.0).unwrap();
        let oracle = 20.0 * (4.0 * core::f64::consts::PI * 2.4e9 / 3.0e8).log10();
        assert!(rel_eq(one_metre, oracle));
        assert!((one_metre - 40.05).abs() < 0.01);

        // one decade adds 10 * eta dB
        let ten_metres = path_loss_db(10.0, 2.4e9, 3.0).unwrap();
        assert!(rel_eq(ten_metres, one_metre + 30.0));

        assert_eq!(path_loss_db(0.01, 2.4e9, 3.0), Err(RfError::DistanceTooSmall));
    }

    #[test]
    fn channel_gain_oracles() {
        assert_eq!(rf_channel_gain(10.0, 0.0, 2.4e9, 3.0).unwrap(), 0.0);
        // hand evaluation: sqrt(10^(-70.046/10)) = 3.1456e-4
        let g = rf_channel_gain(10.0, 1.0, 2.4e9, 3.0).unwrap();
        let loss = path_loss_db(10.0, 2.4e9, 3.0).unwrap();
        assert!(rel_eq(g, (10.0f64.powf(-loss / 10.0)).sqrt()));
        assert!((g - 3.1456e-4).abs() < 1e-7);
    }

    #[test]
    fn sinr_cases() {
        assert_eq!(rf_sinr(0.0, 1.0, 2e6, 5e-19, 0.0), 0.0);
        // |h|^2 dP == N0 dB -> 1.0
        let n0: f64 = 5e-19;
        let db = 2e6;
        let h = (n0 * db).sqrt();
        assert!(rel_eq(rf_sinr(h, 1.0, db, n0, 0.0), 1.0));
        // matching interference halves it
        assert!(rel_eq(rf_sinr(h, 1.0, db, n0, n0 * db), 0.5));
    }

    #[test]
    fn subchannel_rates() {
        let ap = WifiApParams::default();
        let n0 = ap.noise_density_w_per_hz();
        let empty = SubchannelAllocation {
            subchannels: vec![],
            delta_b_hz: 5e5,
            delta_p_w: 2.0,
        };
        assert_eq!(rf_rate_subchannels(&empty, &[], n0).unwrap(), 0.0);

        // per-sub SINR of 1 yields dB * log2(2) = dB
        let one = SubchannelAllocation {
            subchannels: vec![0],
            delta_b_hz: 5e5,
            delta_p_w: 2.0,
        };
        one.validate(&ap).unwrap();
        let h = (n0 * 5e5 / 2.0).sqrt();
        assert!(rel_eq(rf_rate_subchannels(&one, &[h], n0).unwrap(), 5e5));

        // four identical sub-channels quadruple the rate
        let four = SubchannelAllocation {
            subchannels: vec![0, 1, 2, 3],
            delta_b_hz: 5e5,
            delta_p_w: 2.0,
        };
        four.validate(&ap).unwrap();
        let r4 = rf_rate_subchannels(&four, &[h, h, h, h], n0).unwrap();
        assert!(rel_eq(r4, 4.0 * 5e5));

        let over = SubchannelAllocation {
            subchannels: vec![0, 1, 2, 3, 4],
            delta_b_hz: 5e5,
            delta_p_w: 2.0,
        };
        assert_eq!(over.validate(&ap), Err(RfError::InvalidAllocation));
    }

    #[test]
    fn shared_rate_oracles() {
        let n0: f64 = 5e-19;
        // |h|^2 P == N0 B with B = 2 MHz -> 2 Mbps
        let h = (n0 * 2e6 / 10.0).sqrt();
        let r1 = rf_rate_shared(2e6, h, 10.0, n0, 1).unwrap();
        assert!(rel_eq(r1, 2e6));
        let r2 = rf_rate_shared(2e6, h, 10.0, n0, 2).unwrap();
        assert!(rel_eq(r1, 2.0 * r2));
        assert_eq!(rf_rate_shared(2e6, 0.0, 10.0, n0, 1).unwrap(), 0.0);
        assert!(rf_rate_shared(2e6, h, 10.0, n0, 0).is_err());
    }

    #[test]
    fn sampled_link_composes_loss_and_fading() {
        let ap = WifiApParams::default();
        let s = sample_rf_link(10.0, 0.8, &ap, 1e-13).unwrap();
        assert!(rel_eq(s.gain, rf_channel_gain(10.0, 0.8, ap.carrier_hz, 3.0).unwrap()));
        assert!(rel_eq(s.large_scale_loss_db, path_loss_db(10.0, ap.carrier_hz, 3.0).unwrap()));
        let sinr = rf_sinr(s.gain, ap.p_rf_w, ap.bandwidth_hz, ap.noise_density_w_per_hz(), s.interference_w);
        let clean = rf_sinr(s.gain, ap.p_rf_w, ap.bandwidth_hz, ap.noise_density_w_per_hz(), 0.0);
        assert!(sinr < clean);
    }

    #[test]
    fn rayleigh_unit_power_normalisation() {
        // E[|h|^2] over 1e5 seeded draws within 1%
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 100_000;
        let mean_sq: f64 = (0..n).map(|_| {
            let h = rayleigh_unit_power(&mut rng);
            h * h
        }).sum::<f64>() / n as f64;
        assert!((mean_sq - 1.0).abs() < 0.01, "mean |h|^2 = {mean_sq}");
    }

    #[test]
    fn fading_is_bit_identical_per_seed() {
        let draw = |seed: u64| -> Vec<f64> {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            (0..32).map(|_| rayleigh_unit_power(&mut rng)).collect()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    proptest! {
        #[test]
        fn rates_non_negative_and_monotone_in_power(p in 0.1f64..20.0, d in 1.0f64..150.0) {
            let n0 = 5e-19;
            let h = rf_channel_gain(d, 1.0, 2.4e9, 3.0).unwrap();
            let r = rf_rate_shared(2e6, h, p, n0, 1).unwrap();
            let r_more = rf_rate_shared(2e6, h, p * 2.0, n0, 1).unwrap();
            prop_assert!(r >= 0.0);
            prop_assert!(r_more > r);
        }

        #[test]
        fn path_loss_monotone_in_distance(d in 0.1f64..200.0, step in 0.1f64..50.0) {
            let near = path_loss_db(d, 2.4e9, 3.0).unwrap();
            let far = path_loss_db(d + step, 2.4e9, 3.0).unwrap();
            prop_assert!(far > near);
        }
    }
}
