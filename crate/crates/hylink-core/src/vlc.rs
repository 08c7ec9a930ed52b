//! Lambertian LOS optical channel, VLC SINR, and achievable rate.
//!
//! The LOS gain of a generalised-Lambertian LED towards a photodiode with a
//! non-imaging concentrator is
//!
//! ```text
//! H = (n + 1) * A_pd / (2 pi D^r) * T_of * G(theta) * cos^n(phi) * cos(theta)
//! ```
//!
//! for incidence inside the receiver field of view and zero outside it,
//! where `n` is the Lambertian order set by the half-intensity semi-angle.
//! The electrical SINR squares the photocurrent terms: interfering lamps
//! enter the denominator as a sum of squared per-interferer terms, treating
//! co-channel light as noise.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::geom::LinkGeometry;
use crate::maths;

/// VLC access-point parameters (defaults follow the reference indoor setup:
/// 15 W optical power, 30 deg semi-angle, 100 MHz channel).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VlcApParams {
    /// Optical transmit power, watts.
    pub p_op_w: f64,
    /// Half-intensity semi-angle, radians.
    pub phi_half_rad: f64,
    /// Electrical power to keep the AP on, watts.
    pub p_on_w: f64,
    /// Channel bandwidth, Hz.
    pub bandwidth_hz: f64,
    /// LED luminosity efficacy, lm/W.
    pub luminosity_efficacy_lm_per_w: f64,
    /// DC efficiency factor scaling data-utilisation into electrical power.
    pub dc_efficiency: f64,
}

impl Default for VlcApParams {
    fn default() -> Self {
        Self {
            p_op_w: 15.0,
            phi_half_rad: 30.0_f64.to_radians(),
            p_on_w: 15.0,
            bandwidth_hz: 100e6,
            luminosity_efficacy_lm_per_w: 150.0,
            dc_efficiency: 0.1,
        }
    }
}

/// VLC receiver front-end parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VlcReceiverParams {
    /// Photodiode area, m^2.
    pub area_m2: f64,
    /// Field-of-view half-angle, radians.
    pub fov_half_rad: f64,
    /// Optical filter gain.
    pub optical_filter_gain: f64,
    /// Refractive index of the concentrator lens.
    pub lens_refractive_index: f64,
    /// Optical-to-electrical conversion, A/W.
    pub responsivity_a_per_w: f64,
    /// Noise power spectral density, A^2/Hz. The default spreads the
    /// 4.7e-14 A^2 constant Gaussian noise of the reference receiver over
    /// the 100 MHz channel.
    pub noise_density_a2_per_hz: f64,
    /// Path-loss exponent `r` in the D^r denominator (2 = inverse square).
    pub path_loss_exponent: f64,
}

impl Default for VlcReceiverParams {
    fn default() -> Self {
        Self {
            area_m2: 1.0e-4,
            fov_half_rad: FRAC_PI_2,
            optical_filter_gain: 1.0,
            lens_refractive_index: 1.5,
            responsivity_a_per_w: 0.54,
            noise_density_a2_per_hz: 4.7e-14 / 100e6,
            path_loss_exponent: 2.0,
        }
    }
}

/// One evaluated VLC link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VlcLinkSample {
    pub gain: f64,
    pub sinr: f64,
    pub geometry: LinkGeometry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlcError {
    /// Half-power semi-angle outside (0, pi/2).
    HalfAngleOutOfRange,
    ZeroDistance,
    ZeroUsers,
}

impl fmt::Display for VlcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VlcError::HalfAngleOutOfRange => {
                write!(f, "half-intensity angle must lie strictly inside (0, pi/2)")
            }
            VlcError::ZeroDistance => write!(f, "channel gain is undefined at zero distance"),
            VlcError::ZeroUsers => write!(f, "shared rate needs at least one user"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for VlcError {}

/// Lambertian order n = -1 / log2(cos(phi_half)).
pub fn lambertian_order(phi_half_rad: f64) -> Result<f64, VlcError> {
    if phi_half_rad <= 0.0 || phi_half_rad >= FRAC_PI_2 {
        return Err(VlcError::HalfAngleOutOfRange);
    }
    Ok(-1.0 / maths::log2(maths::cos(phi_half_rad)))
}

/// Gain of the non-imaging concentrator: n_rf^2 / sin^2(theta_F) inside the
/// field of view, zero outside.
pub fn concentrator_gain(theta_rad: f64, lens_refractive_index: f64, fov_half_rad: f64) -> f64 {
    if theta_rad >= 0.0 && theta_rad <= fov_half_rad {
        let s = maths::sin(fov_half_rad);
        lens_refractive_index * lens_refractive_index / (s * s)
    } else {
        0.0
    }
}

/// LOS optical channel gain H(0) for the given link geometry.
pub fn channel_gain(
    geom: &LinkGeometry,
    ap: &VlcApParams,
    rx: &VlcReceiverParams,
) -> Result<f64, VlcError> {
    if geom.distance_m <= 0.0 {
        return Err(VlcError::ZeroDistance);
    }
    if geom.incidence_rad > rx.fov_half_rad {
        return Ok(0.0);
    }
    let n = lambertian_order(ap.phi_half_rad)?;
    let g = concentrator_gain(geom.incidence_rad, rx.lens_refractive_index, rx.fov_half_rad);
    let gain = (n + 1.0) * rx.area_m2 / (2.0 * PI * maths::powf(geom.distance_m, rx.path_loss_exponent))
        * rx.optical_filter_gain
        * g
        * maths::powf(maths::cos(geom.irradiance_rad), n)
        * maths::cos(geom.incidence_rad);
    Ok(gain.max(0.0))
}

/// Electrical SINR of a VLC link: squared photocurrent of the serving lamp
/// over thermal noise plus the sum of squared interferer photocurrents.
pub fn vlc_sinr(
    serving_gain: f64,
    interferer_gains: &[f64],
    per_user_bandwidth_hz: f64,
    ap: &VlcApParams,
    rx: &VlcReceiverParams,
) -> f64 {
    let current = |h: f64| rx.responsivity_a_per_w * ap.p_op_w * h;
    let signal = current(serving_gain) * current(serving_gain);
    let mut denom = rx.noise_density_a2_per_hz * per_user_bandwidth_hz;
    for &h in interferer_gains {
        let i = current(h);
        denom += i * i;
    }
    signal / denom
}

/// Evaluate gain and SINR of one VLC link in a field of interfering lamps.
/// Interferers outside the receiver FoV contribute zero gain.
pub fn sample_vlc_link(
    geom: LinkGeometry,
    interferer_geoms: &[LinkGeometry],
    per_user_bandwidth_hz: f64,
    ap: &VlcApParams,
    rx: &VlcReceiverParams,
) -> Result<VlcLinkSample, VlcError> {
    let gain = channel_gain(&geom, ap, rx)?;
    let interference: Vec<f64> = interferer_geoms
        .iter()
        .map(|g| channel_gain(g, ap, rx))
        .collect::<Result<_, _>>()?;
    let sinr = vlc_sinr(gain, &interference, per_user_bandwidth_hz, ap, rx);
    Ok(VlcLinkSample { gain, sinr, geometry: geom })
}

/// IM/DD achievable rate: half the bandwidth carries real-valued signals.
pub fn vlc_rate(bandwidth_hz: f64, sinr: f64) -> f64 {
    bandwidth_hz / 2.0 * maths::log2(1.0 + sinr)
}

/// Round-robin share of the IM/DD rate among `users` on the same lamp.
pub fn vlc_rate_shared(bandwidth_hz: f64, sinr: f64, users: u32) -> Result<f64, VlcError> {
    if users == 0 {
        return Err(VlcError::ZeroUsers);
    }
    Ok(bandwidth_hz / (2.0 * users as f64) * maths::log2(1.0 + sinr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const REL: f64 = 1e-9;

    fn rel_eq(a: f64, b: f64) -> bool {
        (a - b).abs() <= REL * b.abs().max(a.abs())
    }

    #[test]
    fn lambertian_order_at_60_degrees_is_one() {
        // cos 60 deg = 0.5, log2 = -1
        let n = lambertian_order(60.0_f64.to_radians()).unwrap();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambertian_order_at_30_degrees() {
        let n = lambertian_order(30.0_f64.to_radians()).unwrap();
        let oracle = -1.0 / (30.0_f64.to_radians().cos()).log2();
        assert!(rel_eq(n, oracle));
        assert!(rel_eq(n, 4.818841679306421));
    }

    #[test]
    fn lambertian_order_domain_edges() {
        assert!(lambertian_order(FRAC_PI_2).is_err());
        assert!(lambertian_order(0.0).is_err());
        let near_edge = lambertian_order(FRAC_PI_2 - 1e-6).unwrap();
        assert!(near_edge.is_finite() && near_edge > 0.0);
    }

    #[test]
    fn concentrator_gain_branches() {
        let fov = FRAC_PI_2;
        assert_eq!(concentrator_gain(fov + 0.1, 1.5, fov), 0.0);
        assert!(rel_eq(concentrator_gain(0.0, 1.5, fov), 2.25));
        assert!(rel_eq(concentrator_gain(0.3, 1.0, fov), 1.0));
    }

    #[test]
    fn channel_gain_axial_oracle() {
        // n=1 (60 deg), A=1e-4, D=2, r=2, unity filter and concentrator:
        // H = 2 * 1e-4 / (2 pi 4) = 1e-4 / (4 pi)
        let ap = VlcApParams {
            phi_half_rad: 60.0_f64.to_radians(),
            ..VlcApParams::default()
        };
        let rx = VlcReceiverParams {
            lens_refractive_index: 1.0,
            ..VlcReceiverParams::default()
        };
        let h = channel_gain(&LinkGeometry::boresight(2.0), &ap, &rx).unwrap();
        assert!(rel_eq(h, 1e-4 / (4.0 * core::f64::consts::PI)));
        assert!(rel_eq(h, 7.957747154594767e-6));
    }

    #[test]
    fn channel_gain_fov_cutoff_and_inverse_square() {
        let ap = VlcApParams::default();
        let rx = VlcReceiverParams {
            fov_half_rad: 0.5,
            ..VlcReceiverParams::default()
        };
        let outside = LinkGeometry {
            distance_m: 2.0,
            irradiance_rad: 0.6,
            incidence_rad: 0.6,
        };
        assert_eq!(channel_gain(&outside, &ap, &rx).unwrap(), 0.0);

        let rx = VlcReceiverParams::default();
        let h1 = channel_gain(&LinkGeometry::boresight(2.0), &ap, &rx).unwrap();
        let h2 = channel_gain(&LinkGeometry::boresight(4.0), &ap, &rx).unwrap();
        assert!(rel_eq(h1 / h2, 4.0));
        assert!(channel_gain(&LinkGeometry::boresight(0.0), &ap, &rx).is_err());
    }

    #[test]
    fn sinr_zero_signal_and_unit_cases() {
        let ap = VlcApParams::default();
        let rx = VlcReceiverParams::default();
        assert_eq!(vlc_sinr(0.0, &[], 100e6, &ap, &rx), 0.0);

        // construct (gamma P h)^2 == N0 B  ->  SINR 1.0 (0 dB)
        let b = 100e6;
        let target = (rx.noise_density_a2_per_hz * b).sqrt();
        let h = target / (rx.responsivity_a_per_w * ap.p_op_w);
        assert!(rel_eq(vlc_sinr(h, &[], b, &ap, &rx), 1.0));

        // one interferer at the serving gain, negligible noise: direct
        // summation oracle (s^2)/(s^2 + ~0) ~= 1
        let s = vlc_sinr(1e-4, &[1e-4], 1e-3, &ap, &rx);
        assert!((s - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sampled_link_filters_interferers_by_fov() {
        let ap = VlcApParams::default();
        let rx = VlcReceiverParams {
            fov_half_rad: 0.8,
            ..VlcReceiverParams::default()
        };
        let serving = LinkGeometry::boresight(3.0);
        let inside = LinkGeometry {
            distance_m: 3.0,
            irradiance_rad: 0.5,
            incidence_rad: 0.5,
        };
        let outside = LinkGeometry {
            distance_m: 3.0,
            irradiance_rad: 1.2,
            incidence_rad: 1.2,
        };
        let clean = sample_vlc_link(serving, &[outside], 100e6, &ap, &rx).unwrap();
        let loaded = sample_vlc_link(serving, &[inside], 100e6, &ap, &rx).unwrap();
        // a lamp outside the FoV contributes nothing
        assert_eq!(clean.sinr, vlc_sinr(clean.gain, &[], 100e6, &ap, &rx));
        assert!(loaded.sinr < clean.sinr);
        assert_eq!(clean.geometry, serving);
    }

    #[test]
    fn rate_oracles() {
        assert_eq!(vlc_rate(100e6, 0.0), 0.0);
        // 50e6 * log2(4) = 100 Mbps
        assert!(rel_eq(vlc_rate(100e6, 3.0), 100e6));
        let single = vlc_rate_shared(100e6, 3.0, 1).unwrap();
        let dual = vlc_rate_shared(100e6, 3.0, 2).unwrap();
        assert!(rel_eq(single, 2.0 * dual));
        assert!(vlc_rate_shared(100e6, 3.0, 0).is_err());
    }

    proptest! {
        #[test]
        fn gain_monotone_non_increasing_in_distance(d1 in 0.5f64..50.0, factor in 1.0f64..4.0) {
            let ap = VlcApParams::default();
            let rx = VlcReceiverParams::default();
            let h1 = channel_gain(&LinkGeometry::boresight(d1), &ap, &rx).unwrap();
            let h2 = channel_gain(&LinkGeometry::boresight(d1 * factor), &ap, &rx).unwrap();
            prop_assert!(h2 <= h1 + 1e-18);
        }

        #[test]
        fn gain_continuous_inside_fov(theta in 0.0f64..1.4) {
            // continuity probe: small angle change moves the gain a little
            let ap = VlcApParams::default();
            let rx = VlcReceiverParams::default();
            let g = |t: f64| LinkGeometry { distance_m: 3.0, irradiance_rad: t, incidence_rad: t };
            let h = channel_gain(&g(theta), &ap, &rx).unwrap();
            let h_eps = channel_gain(&g(theta + 1e-9), &ap, &rx).unwrap();
            // the angular derivative scales like (n+1) tan(theta) near the edge
            prop_assert!((h - h_eps).abs() < 1e-6 * h.max(1e-12));
        }

        #[test]
        fn interferers_only_reduce_sinr(h in 1e-8f64..1e-3, hi in 0.0f64..1e-3) {
            let ap = VlcApParams::default();
            let rx = VlcReceiverParams::default();
            let clean = vlc_sinr(h, &[], 100e6, &ap, &rx);
            let with = vlc_sinr(h, &[hi], 100e6, &ap, &rx);
            prop_assert!(with <= clean + 1e-18);
        }

        #[test]
        fn rate_increases_in_sinr_and_bandwidth(s in 0.0f64..1e4, b in 1e6f64..2e8) {
            prop_assert!(vlc_rate(b, s + 1.0) > vlc_rate(b, s));
            prop_assert!(vlc_rate(b * 1.5, s + 1.0) > vlc_rate(b, s + 1.0));
            let shared = vlc_rate_shared(b, s, 1).unwrap();
            prop_assert!((shared - vlc_rate(b, s)).abs() <= 1e-12 * shared.max(1.0));
        }
    }
}
