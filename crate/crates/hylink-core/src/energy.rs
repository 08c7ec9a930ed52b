//! Energy efficiency, battery lifetime, and complexity metrics.

use core::fmt;

use serde::{Deserialize, Serialize};

use crate::exposure::ExposureMode;

/// Device battery abstraction: constant-current discharge with a derating
/// factor covering external battery-draining events.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatteryModel {
    pub capacity_mah: f64,
    pub energy_wh: f64,
    pub derating: f64,
}

impl Default for BatteryModel {
    fn default() -> Self {
        // capacity and energy are independent nameplate values, never
        // cross-derived
        Self {
            capacity_mah: 5000.0,
            energy_wh: 5.45,
            derating: 0.70,
        }
    }
}

/// Consumed-power split of one serving AP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    /// Power to keep the AP on, watts.
    pub p_on_w: f64,
    /// Additional power spent on carrying data, watts.
    pub p_data_w: f64,
    pub mode: ExposureMode,
}

impl PowerBreakdown {
    pub fn total_w(&self) -> f64 {
        self.p_on_w + self.p_data_w
    }
}

/// Data power from the utilisation of the AP's data budget: the efficiency
/// factor scales airtime utilisation into electrical power.
pub fn data_power_w(p_data_max_w: f64, efficiency_factor: f64, utilisation: f64) -> f64 {
    p_data_max_w * efficiency_factor * utilisation.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyError {
    ZeroPower,
    ZeroLoad,
    NegativeTime,
}

impl fmt::Display for EnergyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergyError::ZeroPower => write!(f, "energy efficiency needs positive total power"),
            EnergyError::ZeroLoad => write!(f, "battery lifetime needs a positive load current"),
            EnergyError::NegativeTime => write!(f, "transfer time must be non-negative"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EnergyError {}

/// Bits per joule delivered by an AP with the given power breakdown.
pub fn energy_efficiency(data_rate_bps: f64, pb: &PowerBreakdown) -> Result<f64, EnergyError> {
    let total = pb.total_w();
    if total <= 0.0 {
        return Err(EnergyError::ZeroPower);
    }
    Ok(data_rate_bps / total)
}

/// Energy drawn from the battery over a transfer lasting `t_s` seconds, Wh.
pub fn transfer_energy_wh(battery: &BatteryModel, t_s: f64) -> Result<f64, EnergyError> {
    if t_s < 0.0 {
        return Err(EnergyError::NegativeTime);
    }
    Ok(battery.energy_wh * t_s / 3600.0)
}

/// Battery lifetime in hours: capacity over load current, derated.
pub fn battery_lifetime_h(battery: &BatteryModel, i_load_ma: f64) -> Result<f64, EnergyError> {
    if i_load_ma <= 0.0 {
        return Err(EnergyError::ZeroLoad);
    }
    Ok(battery.capacity_mah / i_load_ma * battery.derating)
}

/// Linear UE power draw versus serving distance: `base + slope * d`, watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadModel {
    pub base_w: f64,
    pub slope_w_per_m: f64,
}

impl LoadModel {
    pub fn power_w(&self, distance_m: f64) -> f64 {
        self.base_w + self.slope_w_per_m * distance_m
    }

    /// Load current at the nominal device voltage, mA.
    pub fn current_ma(&self, distance_m: f64, device_voltage_v: f64) -> f64 {
        self.power_w(distance_m) / device_voltage_v * 1000.0
    }
}

/// Per-mode uplink+downlink consumed-power lines behind the complexity
/// metric, with the sweep range that normalises it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityModel {
    pub active: LoadModel,
    pub tr: LoadModel,
    pub hybrid: LoadModel,
    pub pure_vlc: LoadModel,
    /// End of the reference distance sweep, metres.
    pub sweep_max_m: f64,
}

impl ComplexityModel {
    pub fn line(&self, mode: ExposureMode) -> &LoadModel {
        match mode {
            ExposureMode::ActiveMode | ExposureMode::WiFi => &self.active,
            ExposureMode::TrMode => &self.tr,
            ExposureMode::Hybrid => &self.hybrid,
            ExposureMode::PureVlc | ExposureMode::Vlc => &self.pure_vlc,
        }
    }
}

/// Percent complexity: consumed uplink+downlink power at `distance_m`
/// normalised by the active-mode maximum over the reference sweep.
pub fn complexity_percent(mode: ExposureMode, distance_m: f64, model: &ComplexityModel) -> f64 {
    let reference = model.active.power_w(model.sweep_max_m);
    100.0 * model.line(mode).power_w(distance_m) / reference
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const REL: f64 = 1e-9;

    fn rel_eq(a: f64, b: f64) -> bool {
        (a - b).abs() <= REL * b.abs().max(a.abs())
    }

    fn pb(p_on: f64, p_data: f64) -> PowerBreakdown {
        PowerBreakdown {
            p_on_w: p_on,
            p_data_w: p_data,
            mode: ExposureMode::Vlc,
        }
    }

    #[test]
    fn energy_efficiency_oracles() {
        assert_eq!(energy_efficiency(0.0, &pb(15.0, 5.0)).unwrap(), 0.0);
        // 100 Mbps over 20 W
        assert!(rel_eq(energy_efficiency(100e6, &pb(15.0, 5.0)).unwrap(), 5e6));
        let single = energy_efficiency(50e6, &pb(15.0, 5.0)).unwrap();
        let double = energy_efficiency(100e6, &pb(15.0, 5.0)).unwrap();
        assert!(rel_eq(double, 2.0 * single));
        assert!(energy_efficiency(1.0, &pb(0.0, 0.0)).is_err());
    }

    #[test]
    fn transfer_energy_oracles() {
        let b = BatteryModel::default();
        assert_eq!(transfer_energy_wh(&b, 0.0).unwrap(), 0.0);
        assert!(rel_eq(transfer_energy_wh(&b, 3600.0).unwrap(), 5.45));
        assert!(rel_eq(transfer_energy_wh(&b, 1800.0).unwrap(), 2.725));
        assert!(transfer_energy_wh(&b, -1.0).is_err());
    }

    #[test]
    fn battery_lifetime_oracles() {
        let b = BatteryModel::default();
        // 5000 mAh / 500 mA * 0.70 = 7.00 h, exact
        assert!((battery_lifetime_h(&b, 500.0).unwrap() - 7.0).abs() < 1e-12);
        assert!(rel_eq(battery_lifetime_h(&b, 5000.0).unwrap(), 0.70));
        let unit = BatteryModel {
            derating: 1.0,
            ..BatteryModel::default()
        };
        assert!(rel_eq(battery_lifetime_h(&unit, 1000.0).unwrap(), 5.0));
        assert!(battery_lifetime_h(&b, 0.0).is_err());
    }

    #[test]
    fn complexity_anchors() {
        let model = crate::calib::Calibration::default().energy.complexity;
        let am60 = complexity_percent(ExposureMode::ActiveMode, 60.0, &model);
        let vlc60 = complexity_percent(ExposureMode::PureVlc, 60.0, &model);
        assert!((am60 - 62.5).abs() < 2.0, "AM at 60 m: {am60}");
        assert!((vlc60 - 41.0).abs() < 2.0, "pure VLC at 60 m: {vlc60}");
        let am_max = complexity_percent(ExposureMode::ActiveMode, model.sweep_max_m, &model);
        assert!(rel_eq(am_max, 100.0));
    }

    #[test]
    fn complexity_bounded_and_mode_ordered() {
        let model = crate::calib::Calibration::default().energy.complexity;
        let modes = [
            ExposureMode::ActiveMode,
            ExposureMode::TrMode,
            ExposureMode::Hybrid,
            ExposureMode::PureVlc,
        ];
        let mut d = 0.0;
        while d <= model.sweep_max_m {
            let values: alloc::vec::Vec<f64> = modes
                .iter()
                .map(|&m| complexity_percent(m, d, &model))
                .collect();
            for pair in values.windows(2) {
                assert!(pair[0] >= pair[1], "mode ordering broken at {d} m");
            }
            for &v in &values {
                assert!((0.0..=100.0).contains(&v));
            }
            d += 5.0;
        }
    }

    proptest! {
        #[test]
        fn lifetime_is_homogeneous(scale in 0.1f64..10.0, load in 10.0f64..5000.0) {
            let b = BatteryModel::default();
            let scaled = BatteryModel { capacity_mah: b.capacity_mah * scale, ..b };
            let base = battery_lifetime_h(&b, load).unwrap();
            let same = battery_lifetime_h(&scaled, load * scale).unwrap();
            prop_assert!((base - same).abs() <= 1e-9 * base);
        }

        #[test]
        fn complexity_monotone_in_distance(d in 0.0f64..145.0, step in 0.1f64..5.0) {
            let model = crate::calib::Calibration::default().energy.complexity;
            for mode in [ExposureMode::ActiveMode, ExposureMode::TrMode,
                         ExposureMode::Hybrid, ExposureMode::PureVlc] {
                let near = complexity_percent(mode, d, &model);
                let far = complexity_percent(mode, d + step, &model);
                prop_assert!(far >= near);
            }
        }
    }
}
