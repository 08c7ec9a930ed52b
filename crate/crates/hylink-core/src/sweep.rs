//! Scripted sweeps: one kind per reproduced analysis, each producing a
//! rectangular table of numeric rows.
//!
//! Distance sweeps run on the abstract 1-D axis of [`crate::calib::AxisLayout`]:
//! every AP sits on the axis and the UE walks outward from the origin, with
//! boresight link geometry and distances clamped at the minimum standoff.
//! Rows are pure functions of (seed, kind, row index), so results are
//! identical no matter how rows are scheduled across workers.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::calib::Calibration;
use crate::energy::{self, BatteryModel, PowerBreakdown};
use crate::exposure::{
    self, bioheat_solve, BioheatOptions, ExposureMode, SurfaceBc, CoreBc,
};
use crate::geom::LinkGeometry;
use crate::link::{self, HandoverEvent, HandoverPolicy, LinkError, SinrSnapshot};
use crate::mac::{MacEvent, MacSim, Superframe};
use crate::maths;
use crate::rf::{self, FadingMode, RfError, WifiApParams};
use crate::vlc::{self, VlcApParams, VlcError, VlcReceiverParams};

/// One sweep family per reproduced figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    SinrVsDistance,
    EeVsDistance,
    BatteryVsDistance,
    SarVsDepth,
    PdVsDepth,
    TempField,
    ComplexityVsDistance,
    MacTrace,
}

impl SweepKind {
    pub const ALL: [SweepKind; 8] = [
        SweepKind::SinrVsDistance,
        SweepKind::EeVsDistance,
        SweepKind::BatteryVsDistance,
        SweepKind::SarVsDepth,
        SweepKind::PdVsDepth,
        SweepKind::TempField,
        SweepKind::ComplexityVsDistance,
        SweepKind::MacTrace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepKind::SinrVsDistance => "sinr-vs-distance",
            SweepKind::EeVsDistance => "ee-vs-distance",
            SweepKind::BatteryVsDistance => "battery-vs-distance",
            SweepKind::SarVsDepth => "sar-vs-depth",
            SweepKind::PdVsDepth => "pd-vs-depth",
            SweepKind::TempField => "temp-field",
            SweepKind::ComplexityVsDistance => "complexity-vs-distance",
            SweepKind::MacTrace => "mac-trace",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    fn code(self) -> u64 {
        match self {
            SweepKind::SinrVsDistance => 1,
            SweepKind::EeVsDistance => 2,
            SweepKind::BatteryVsDistance => 3,
            SweepKind::SarVsDepth => 4,
            SweepKind::PdVsDepth => 5,
            SweepKind::TempField => 6,
            SweepKind::ComplexityVsDistance => 7,
            SweepKind::MacTrace => 8,
        }
    }

    pub fn default_range(self) -> XRange {
        match self {
            SweepKind::SinrVsDistance
            | SweepKind::EeVsDistance
            | SweepKind::BatteryVsDistance
            | SweepKind::ComplexityVsDistance => XRange::new(0.0, 150.0, 1.0),
            SweepKind::SarVsDepth | SweepKind::PdVsDepth => XRange::new(0.0, 12.8, 0.02),
            SweepKind::TempField => XRange::new(0.0, 12.8, 0.1),
            SweepKind::MacTrace => XRange::new(0.0, 3000.0, 100.0),
        }
    }

    pub fn default_modes(self) -> Vec<SweepMode> {
        match self {
            SweepKind::SinrVsDistance | SweepKind::BatteryVsDistance => {
                vec![SweepMode::Vlc, SweepMode::VlcHandover, SweepMode::Wifi]
            }
            SweepKind::EeVsDistance => vec![SweepMode::Vlc, SweepMode::Wifi, SweepMode::Hybrid],
            SweepKind::SarVsDepth => vec![SweepMode::Wifi, SweepMode::Vlc, SweepMode::VlcHandover],
            SweepKind::PdVsDepth => vec![SweepMode::Wifi, SweepMode::Vlc],
            SweepKind::TempField | SweepKind::ComplexityVsDistance => vec![
                SweepMode::ActiveMode,
                SweepMode::TrMode,
                SweepMode::Hybrid,
                SweepMode::PureVlc,
            ],
            SweepKind::MacTrace => vec![],
        }
    }

    fn allowed_modes(self) -> &'static [SweepMode] {
        match self {
            SweepKind::SinrVsDistance | SweepKind::BatteryVsDistance => {
                &[SweepMode::Vlc, SweepMode::VlcHandover, SweepMode::Wifi]
            }
            SweepKind::EeVsDistance => &[SweepMode::Vlc, SweepMode::Wifi, SweepMode::Hybrid],
            SweepKind::SarVsDepth => &[SweepMode::Wifi, SweepMode::Vlc, SweepMode::VlcHandover],
            SweepKind::PdVsDepth => &[SweepMode::Wifi, SweepMode::Vlc],
            SweepKind::TempField | SweepKind::ComplexityVsDistance => &[
                SweepMode::ActiveMode,
                SweepMode::TrMode,
                SweepMode::Hybrid,
                SweepMode::PureVlc,
            ],
            SweepKind::MacTrace => &[],
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Curves that a sweep can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    Vlc,
    VlcHandover,
    Wifi,
    Hybrid,
    ActiveMode,
    TrMode,
    PureVlc,
}

impl SweepMode {
    pub fn name(self) -> &'static str {
        match self {
            SweepMode::Vlc => "vlc",
            SweepMode::VlcHandover => "vlc-handover",
            SweepMode::Wifi => "wifi",
            SweepMode::Hybrid => "hybrid",
            SweepMode::ActiveMode => "active-mode",
            SweepMode::TrMode => "tr-mode",
            SweepMode::PureVlc => "pure-vlc",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            SweepMode::Vlc,
            SweepMode::VlcHandover,
            SweepMode::Wifi,
            SweepMode::Hybrid,
            SweepMode::ActiveMode,
            SweepMode::TrMode,
            SweepMode::PureVlc,
        ]
        .into_iter()
        .find(|m| m.name() == name)
    }

    fn column_tag(self) -> &'static str {
        match self {
            SweepMode::Vlc => "vlc",
            SweepMode::VlcHandover => "vlc_ho",
            SweepMode::Wifi => "wifi",
            SweepMode::Hybrid => "hybrid",
            SweepMode::ActiveMode => "active_mode",
            SweepMode::TrMode => "tr_mode",
            SweepMode::PureVlc => "pure_vlc",
        }
    }

    fn exposure_mode(self) -> ExposureMode {
        match self {
            SweepMode::Vlc | SweepMode::VlcHandover | SweepMode::PureVlc => ExposureMode::Vlc,
            SweepMode::Wifi => ExposureMode::WiFi,
            SweepMode::Hybrid => ExposureMode::Hybrid,
            SweepMode::ActiveMode => ExposureMode::ActiveMode,
            SweepMode::TrMode => ExposureMode::TrMode,
        }
    }

    fn bioheat_mode(self) -> ExposureMode {
        match self {
            SweepMode::PureVlc => ExposureMode::PureVlc,
            other => other.exposure_mode(),
        }
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Half-open numeric grid: start, start+step, ... up to stop (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl XRange {
    /// Upper bound on grid points; rejects runaway step values.
    pub const MAX_POINTS: f64 = 5e6;

    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn is_valid(&self) -> bool {
        self.step > 0.0
            && self.start < self.stop
            && self.start.is_finite()
            && self.stop.is_finite()
            && (self.stop - self.start) / self.step <= Self::MAX_POINTS
    }

    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut i = 0u64;
        loop {
            let x = self.start + i as f64 * self.step;
            if x > self.stop + self.step * 1e-9 {
                break;
            }
            out.push(x);
            i += 1;
        }
        out
    }
}

/// Full specification of one sweep run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub modes: Vec<SweepMode>,
    pub range: XRange,
    pub seed: u64,
    pub fading: FadingMode,
}

impl SweepSpec {
    pub fn new(kind: SweepKind, seed: u64) -> Self {
        Self {
            kind,
            modes: kind.default_modes(),
            range: kind.default_range(),
            seed,
            fading: FadingMode::Deterministic,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if !self.range.is_valid() {
            return Err(SweepError::BadRange);
        }
        if self.kind != SweepKind::MacTrace {
            if self.modes.is_empty() {
                return Err(SweepError::EmptyModes);
            }
            for m in &self.modes {
                if !self.kind.allowed_modes().contains(m) {
                    return Err(SweepError::UnsupportedMode(self.kind, *m));
                }
            }
        }
        Ok(())
    }
}

/// Result metadata embedded into every emitted file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub tool_version: String,
    pub kind: SweepKind,
    pub modes: Vec<SweepMode>,
    pub range: XRange,
    pub seed: u64,
    pub fading: FadingMode,
    /// Fingerprint of the effective configuration, set by the caller.
    pub config_hash: Option<u64>,
}

/// Rectangular numeric table plus metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: SweepMeta,
}

/// A sweep result together with the handover events its walker produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub result: SweepResult,
    pub handover_events: Vec<HandoverEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepError {
    BadRange,
    EmptyModes,
    UnsupportedMode(SweepKind, SweepMode),
    Link(LinkError),
    Vlc(VlcError),
    Rf(RfError),
    Exposure(exposure::ExposureError),
    Scenario(crate::scenario::ScenarioError),
}

impl fmt::Display for SweepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepError::BadRange => write!(
                f,
                "range needs step > 0, start < stop, and at most {} points",
                XRange::MAX_POINTS
            ),
            SweepError::EmptyModes => write!(f, "mode list must not be empty"),
            SweepError::UnsupportedMode(k, m) => {
                write!(f, "sweep `{k}` does not support mode `{m}`")
            }
            SweepError::Link(e) => write!(f, "{e}"),
            SweepError::Vlc(e) => write!(f, "{e}"),
            SweepError::Rf(e) => write!(f, "{e}"),
            SweepError::Exposure(e) => write!(f, "{e}"),
            SweepError::Scenario(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SweepError {}

impl From<LinkError> for SweepError {
    fn from(e: LinkError) -> Self {
        SweepError::Link(e)
    }
}
impl From<VlcError> for SweepError {
    fn from(e: VlcError) -> Self {
        SweepError::Vlc(e)
    }
}
impl From<RfError> for SweepError {
    fn from(e: RfError) -> Self {
        SweepError::Rf(e)
    }
}
impl From<exposure::ExposureError> for SweepError {
    fn from(e: exposure::ExposureError) -> Self {
        SweepError::Exposure(e)
    }
}
impl From<crate::scenario::ScenarioError> for SweepError {
    fn from(e: crate::scenario::ScenarioError) -> Self {
        SweepError::Scenario(e)
    }
}

/// Parameter bundles shared by every sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepContext {
    pub vlc_ap: VlcApParams,
    pub vlc_rx: VlcReceiverParams,
    pub wifi: WifiApParams,
    pub policy: HandoverPolicy,
    pub battery: BatteryModel,
    pub calib: Calibration,
    /// Users sharing the VLC lamp / the Wi-Fi AP.
    pub vlc_users: u32,
    pub wifi_users: u32,
}

impl Default for SweepContext {
    fn default() -> Self {
        Self {
            vlc_ap: VlcApParams::default(),
            vlc_rx: VlcReceiverParams::default(),
            wifi: WifiApParams::default(),
            policy: HandoverPolicy::default(),
            battery: BatteryModel::default(),
            calib: Calibration::default(),
            vlc_users: 1,
            wifi_users: 1,
        }
    }
}

impl SweepContext {
    /// Adopt the channel parameters a scenario carries: the first AP bundle
    /// of each kind (with the AP-level power figures), the receiver and
    /// policy overrides, and the first UE's battery.
    pub fn with_scenario(mut self, scenario: &crate::scenario::Scenario) -> Self {
        use crate::scenario::ApKind;
        if let Some(ap) = scenario.aps.iter().find(|a| a.kind == ApKind::Vlc) {
            if let Some(bundle) = ap.vlc {
                self.vlc_ap = VlcApParams {
                    p_on_w: ap.p_on_w,
                    ..bundle
                };
            }
            self.calib.energy.vlc_p_data_max_w = ap.p_data_max_w;
        }
        if let Some(ap) = scenario.aps.iter().find(|a| a.kind == ApKind::WiFi) {
            if let Some(bundle) = ap.wifi {
                self.wifi = WifiApParams {
                    p_on_w: ap.p_on_w,
                    p_max_w: ap.p_on_w + ap.p_data_max_w,
                    ..bundle
                };
            }
        }
        if let Some(rx) = scenario.receiver {
            self.vlc_rx = rx;
        }
        if let Some(policy) = scenario.policy {
            self.policy = policy;
        }
        if let Some(ue) = scenario.ues.first() {
            self.battery = ue.battery;
        }
        self
    }

    fn standoff(&self, ue_x: f64, ap_x: f64) -> f64 {
        maths::abs(ue_x - ap_x).max(self.calib.axis.min_standoff_m)
    }

    /// Linear SINR of the lamp at `ap_index` for a UE at axis position x.
    pub fn vlc_sinr_at(&self, ue_x: f64, ap_index: usize) -> f64 {
        let positions = &self.calib.axis.vlc_positions_m;
        let geom = LinkGeometry::boresight(self.standoff(ue_x, positions[ap_index]));
        let gain = vlc::channel_gain(&geom, &self.vlc_ap, &self.vlc_rx).unwrap_or(0.0);
        let interferers: Vec<f64> = if self.calib.axis.co_channel_interference {
            positions
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != ap_index)
                .map(|(_, &p)| {
                    let g = LinkGeometry::boresight(self.standoff(ue_x, p));
                    vlc::channel_gain(&g, &self.vlc_ap, &self.vlc_rx).unwrap_or(0.0)
                })
                .collect()
        } else {
            Vec::new()
        };
        let per_user_bw = self.vlc_ap.bandwidth_hz / self.vlc_users as f64;
        vlc::vlc_sinr(gain, &interferers, per_user_bw, &self.vlc_ap, &self.vlc_rx)
    }

    /// Linear SINR of the Wi-Fi AP at `ap_index` for a UE at position x.
    pub fn wifi_sinr_at(&self, ue_x: f64, ap_index: usize, fading: f64) -> f64 {
        let d = self.standoff(ue_x, self.calib.axis.wifi_positions_m[ap_index]);
        let gain = rf::rf_channel_gain(d, fading, self.wifi.carrier_hz, self.wifi.path_loss_exponent)
            .unwrap_or(0.0);
        gain * gain * self.wifi.p_rf_w / self.wifi.noise_power_w()
    }

    /// Achievable VLC rate at a serving distance, single-lamp link.
    pub fn vlc_rate_at_distance(&self, distance_m: f64) -> f64 {
        let geom = LinkGeometry::boresight(distance_m.max(self.calib.axis.min_standoff_m));
        let gain = vlc::channel_gain(&geom, &self.vlc_ap, &self.vlc_rx).unwrap_or(0.0);
        let per_user_bw = self.vlc_ap.bandwidth_hz / self.vlc_users as f64;
        let sinr = vlc::vlc_sinr(gain, &[], per_user_bw, &self.vlc_ap, &self.vlc_rx);
        vlc::vlc_rate_shared(self.vlc_ap.bandwidth_hz, sinr, self.vlc_users).unwrap_or(0.0)
    }

    /// Achievable Wi-Fi rate at a serving distance.
    pub fn wifi_rate_at_distance(&self, distance_m: f64, fading: f64) -> f64 {
        let d = distance_m.max(self.calib.axis.min_standoff_m);
        let gain = rf::rf_channel_gain(d, fading, self.wifi.carrier_hz, self.wifi.path_loss_exponent)
            .unwrap_or(0.0);
        rf::rf_rate_shared(
            self.wifi.bandwidth_hz,
            gain,
            self.wifi.p_rf_w,
            self.wifi.noise_density_w_per_hz(),
            self.wifi_users,
        )
        .unwrap_or(0.0)
    }

    /// AP electrical power while serving the demand on a link of the given
    /// capacity.
    pub fn vlc_ap_power_w(&self, capacity_bps: f64, demand_bps: f64) -> f64 {
        let util = if capacity_bps > 0.0 { (demand_bps / capacity_bps).min(1.0) } else { 1.0 };
        self.vlc_ap.p_on_w
            + energy::data_power_w(
                self.calib.energy.vlc_p_data_max_w,
                self.vlc_ap.dc_efficiency,
                util,
            )
    }

    pub fn wifi_ap_power_w(&self, capacity_bps: f64, demand_bps: f64) -> f64 {
        let util = if capacity_bps > 0.0 { (demand_bps / capacity_bps).min(1.0) } else { 1.0 };
        self.wifi.p_on_w
            + energy::data_power_w(
                self.wifi.p_max_w - self.wifi.p_on_w,
                self.wifi.efficiency_factor,
                util,
            )
    }

    fn vlc_ee_at(&self, x: f64) -> f64 {
        let demand = self.calib.energy.video_demand_bps;
        let rate = self.vlc_rate_at_distance(self.standoff(x, self.calib.axis.vlc_positions_m[0]));
        let pb = PowerBreakdown {
            p_on_w: self.vlc_ap.p_on_w,
            p_data_w: self.vlc_ap_power_w(rate, demand) - self.vlc_ap.p_on_w,
            mode: ExposureMode::Vlc,
        };
        energy::energy_efficiency(rate, &pb).unwrap_or(0.0)
    }

    fn wifi_ee_at(&self, x: f64, fading: f64) -> f64 {
        let demand = self.calib.energy.video_demand_bps;
        let rate = self.wifi_rate_at_distance(self.standoff(x, self.calib.axis.wifi_positions_m[0]), fading);
        let pb = PowerBreakdown {
            p_on_w: self.wifi.p_on_w,
            p_data_w: self.wifi_ap_power_w(rate, demand) - self.wifi.p_on_w,
            mode: ExposureMode::WiFi,
        };
        energy::energy_efficiency(rate, &pb).unwrap_or(0.0)
    }

    fn hybrid_ee_at(&self, x: f64, fading: f64) -> f64 {
        let demand = self.calib.energy.video_demand_bps;
        let tf = self.calib.energy.time_fractions;
        let rv = self.vlc_rate_at_distance(self.standoff(x, self.calib.axis.vlc_positions_m[0]));
        let rw = self.wifi_rate_at_distance(self.standoff(x, self.calib.axis.wifi_positions_m[0]), fading);
        let rates = link::compose_hybrid_rate(&tf, rv, rw);
        let power = tf.vlc_fraction * self.vlc_ap_power_w(rv, demand)
            + tf.rf_fraction * self.wifi_ap_power_w(rw, demand);
        rates.total_bps / power
    }
}

/// Per-AP SINR snapshot for a UE position on the floor plan. Every lamp is
/// evaluated against the co-channel interference of the other lamps (with
/// the receiver FoV filtering them), every Wi-Fi AP against its own noise
/// floor; the same small-scale fading sample applies to each RF link.
pub fn floor_snapshot(
    ctx: &SweepContext,
    scenario: &crate::scenario::Scenario,
    ue_pos: &crate::geom::Point3,
    fading: f64,
) -> Result<SinrSnapshot, SweepError> {
    use crate::scenario::{link_geometry, ApKind};
    let mut snap = SinrSnapshot::default();

    let lamps: Vec<_> = scenario
        .aps
        .iter()
        .filter(|a| a.kind == ApKind::Vlc)
        .collect();
    for (i, ap) in lamps.iter().enumerate() {
        let params = ap.vlc.unwrap_or(ctx.vlc_ap);
        let geom = link_geometry(&ap.position, ue_pos)?;
        let gain = vlc::channel_gain(&geom, &params, &ctx.vlc_rx)?;
        let mut interference = Vec::new();
        for (j, other) in lamps.iter().enumerate() {
            if i == j {
                continue;
            }
            let other_params = other.vlc.unwrap_or(ctx.vlc_ap);
            let g = link_geometry(&other.position, ue_pos)?;
            interference.push(vlc::channel_gain(&g, &other_params, &ctx.vlc_rx)?);
        }
        let per_user_bw = params.bandwidth_hz / ctx.vlc_users as f64;
        let sinr = vlc::vlc_sinr(gain, &interference, per_user_bw, &params, &ctx.vlc_rx);
        snap.vlc.push((ap.id.clone(), maths::to_db(sinr)));
    }

    for ap in scenario.aps.iter().filter(|a| a.kind == ApKind::WiFi) {
        let params = ap.wifi.unwrap_or(ctx.wifi);
        let d = ap.position.distance(ue_pos).max(0.1);
        let gain = rf::rf_channel_gain(d, fading, params.carrier_hz, params.path_loss_exponent)?;
        let sinr = gain * gain * params.p_rf_w / params.noise_power_w();
        snap.wifi.push((ap.id.clone(), maths::to_db(sinr)));
    }
    Ok(snap)
}

fn fading_sample(spec: &SweepSpec, row: usize, draws: usize) -> Vec<f64> {
    match spec.fading {
        FadingMode::Deterministic => vec![1.0; draws],
        FadingMode::Rayleigh => {
            let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
            rng.set_stream((spec.kind.code() << 40) | row as u64);
            (0..draws).map(|_| rf::rayleigh_unit_power(&mut rng)).collect()
        }
    }
}

/// Serving-link walk along the axis grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisWalk {
    /// True while a lamp serves the UE.
    pub serving_is_vlc: Vec<bool>,
    /// Distance to the serving AP (standoff-clamped), metres.
    pub serving_distance_m: Vec<f64>,
    /// Index of the serving VLC lamp while on VLC, of the Wi-Fi AP after.
    pub serving_index: Vec<usize>,
    pub events: Vec<HandoverEvent>,
}

/// Walk the serving state over the given axis positions.
pub fn walk_axis(ctx: &SweepContext, spec: &SweepSpec, xs: &[f64]) -> Result<AxisWalk, SweepError> {
    let mut snapshots = Vec::with_capacity(xs.len());
    for (row, &x) in xs.iter().enumerate() {
        let wifi_fades = fading_sample(spec, row, ctx.calib.axis.wifi_positions_m.len());
        let mut snap = SinrSnapshot::default();
        for i in 0..ctx.calib.axis.vlc_positions_m.len() {
            snap.vlc.push((format!("vlc-{i}"), maths::to_db(ctx.vlc_sinr_at(x, i))));
        }
        for (i, fade) in wifi_fades.iter().enumerate() {
            snap.wifi
                .push((format!("wifi-{i}"), maths::to_db(ctx.wifi_sinr_at(x, i, *fade))));
        }
        snapshots.push((x, snap));
    }
    let (states, events) = link::walk_snapshots("ue-0", &snapshots, &ctx.policy)?;

    let mut serving_is_vlc = Vec::with_capacity(xs.len());
    let mut serving_distance = Vec::with_capacity(xs.len());
    let mut serving_index = Vec::with_capacity(xs.len());
    for (state, &x) in states.iter().zip(xs) {
        let id = state.serving.ap_id();
        let idx: usize = id
            .rsplit('-')
            .next()
            .and_then(|s| s.parse().ok())
            .unwrap_or(0);
        let pos = if state.serving.is_vlc() {
            ctx.calib.axis.vlc_positions_m[idx]
        } else {
            ctx.calib.axis.wifi_positions_m[idx]
        };
        serving_is_vlc.push(state.serving.is_vlc());
        serving_distance.push(ctx.standoff(x, pos));
        serving_index.push(idx);
    }
    Ok(AxisWalk {
        serving_is_vlc,
        serving_distance_m: serving_distance,
        serving_index,
        events,
    })
}

/// Distance to the lamp that would serve at axis position `x` under the
/// handover policy (used by the with-handover exposure columns).
pub fn effective_vlc_distance(ctx: &SweepContext, x: f64) -> Result<f64, SweepError> {
    let spec = SweepSpec::new(SweepKind::SinrVsDistance, 0);
    let xs = spec.range.values();
    let walk = walk_axis(ctx, &spec, &xs)?;
    // nearest grid point at or below x
    let mut best = 0usize;
    for (i, &gx) in xs.iter().enumerate() {
        if gx <= x + 1e-9 {
            best = i;
        }
    }
    if walk.serving_is_vlc[best] {
        Ok(walk.serving_distance_m[best])
    } else {
        // off the VLC service range: fall back to the nearest lamp
        let d = ctx
            .calib
            .axis
            .vlc_positions_m
            .iter()
            .map(|&p| ctx.standoff(x, p))
            .fold(f64::INFINITY, f64::min);
        Ok(d)
    }
}

enum RowPlan {
    Grid { walk: Option<AxisWalk> },
    Fixed(Vec<Vec<f64>>),
}

/// A validated sweep with everything precomputed that rows share. Rows are
/// then pure functions of their index.
pub struct PreparedSweep<'a> {
    ctx: &'a SweepContext,
    pub spec: SweepSpec,
    pub header: Vec<String>,
    xs: Vec<f64>,
    plan: RowPlan,
    events: Vec<HandoverEvent>,
    /// Per compare-distance effective with-handover lamp distances.
    eff_vlc_dist: Vec<(f64, f64)>,
}

/// Validate a spec and precompute shared state.
pub fn prepare(ctx: &SweepContext, spec: SweepSpec) -> Result<PreparedSweep<'_>, SweepError> {
    spec.validate()?;
    let xs = spec.range.values();
    let mut events = Vec::new();
    let mut eff = Vec::new();

    let (header, plan) = match spec.kind {
        SweepKind::SinrVsDistance => {
            let mut header = vec!["d_m".to_string()];
            let needs_walk = spec.modes.contains(&SweepMode::VlcHandover);
            for m in &spec.modes {
                header.push(match m {
                    SweepMode::Vlc => "sinr_vlc_db".to_string(),
                    SweepMode::VlcHandover => "sinr_vlc_ho_db".to_string(),
                    SweepMode::Wifi => "sinr_wifi_db".to_string(),
                    _ => unreachable!("validated"),
                });
            }
            let walk = if needs_walk {
                header.push("serving_tech".to_string());
                let w = walk_axis(ctx, &spec, &xs)?;
                events = w.events.clone();
                Some(w)
            } else {
                None
            };
            (header, RowPlan::Grid { walk })
        }
        SweepKind::EeVsDistance => {
            let mut header = vec!["d_m".to_string()];
            for m in &spec.modes {
                header.push(format!("ee_{}_bits_per_j", m.column_tag()));
            }
            (header, RowPlan::Grid { walk: None })
        }
        SweepKind::BatteryVsDistance => {
            let mut header = vec!["d_m".to_string()];
            let needs_walk = spec.modes.contains(&SweepMode::VlcHandover);
            for m in &spec.modes {
                header.push(format!("life_{}_h", m.column_tag()));
            }
            let walk = if needs_walk {
                let w = walk_axis(ctx, &spec, &xs)?;
                events = w.events.clone();
                Some(w)
            } else {
                None
            };
            (header, RowPlan::Grid { walk })
        }
        SweepKind::SarVsDepth | SweepKind::PdVsDepth => {
            let mut header = vec!["depth_mm".to_string()];
            for &d in &ctx.calib.exposure.compare_distances_m {
                for m in &spec.modes {
                    if spec.kind == SweepKind::SarVsDepth {
                        header.push(format!("sar_{}_{}m_w_per_kg", m.column_tag(), d));
                    } else {
                        header.push(format!("pd_inc_{}_{}m_w_per_m2", m.column_tag(), d));
                        header.push(format!("pd_abs_{}_{}m_w_per_m2", m.column_tag(), d));
                    }
                }
                if spec.modes.contains(&SweepMode::VlcHandover) {
                    eff.push((d, effective_vlc_distance(ctx, d)?));
                } else {
                    eff.push((d, d));
                }
            }
            (header, RowPlan::Grid { walk: None })
        }
        SweepKind::TempField => {
            let mut header = vec!["depth_mm".to_string(), "time_s".to_string()];
            for m in &spec.modes {
                header.push(format!("dt_{}_c", m.column_tag()));
            }
            let rows = temp_field_rows(ctx, &spec)?;
            (header, RowPlan::Fixed(rows))
        }
        SweepKind::ComplexityVsDistance => {
            let mut header = vec!["d_m".to_string()];
            for m in &spec.modes {
                header.push(format!("complexity_{}_pct", m.column_tag()));
            }
            (header, RowPlan::Grid { walk: None })
        }
        SweepKind::MacTrace => {
            let header = mac_trace_header();
            let trace = scripted_mac_trace(spec.seed, spec.range.stop as u64);
            let rows = trace.iter().map(mac_event_row).collect();
            (header, RowPlan::Fixed(rows))
        }
    };

    Ok(PreparedSweep {
        ctx,
        spec,
        header,
        xs,
        plan,
        events,
        eff_vlc_dist: eff,
    })
}

impl PreparedSweep<'_> {
    pub fn row_count(&self) -> usize {
        match &self.plan {
            RowPlan::Grid { .. } => self.xs.len(),
            RowPlan::Fixed(rows) => rows.len(),
        }
    }

    pub fn handover_events(&self) -> &[HandoverEvent] {
        &self.events
    }

    /// Compute row `i`; independent of any other row.
    pub fn compute_row(&self, i: usize) -> Vec<f64> {
        match &self.plan {
            RowPlan::Fixed(rows) => rows[i].clone(),
            RowPlan::Grid { walk } => {
                let x = self.xs[i];
                let ctx = self.ctx;
                match self.spec.kind {
                    SweepKind::SinrVsDistance => {
                        let mut row = vec![x];
                        let fades = fading_sample(&self.spec, i, ctx.calib.axis.wifi_positions_m.len());
                        for m in &self.spec.modes {
                            let v = match m {
                                SweepMode::Vlc => maths::to_db(ctx.vlc_sinr_at(x, 0)),
                                SweepMode::VlcHandover => {
                                    let w = walk.as_ref().expect("walk prepared");
                                    // SINR the handover policy extracts from
                                    // the lamps at this point
                                    let idx = if w.serving_is_vlc[i] { w.serving_index[i] } else {
                                        best_vlc_index(ctx, x)
                                    };
                                    maths::to_db(ctx.vlc_sinr_at(x, idx))
                                }
                                SweepMode::Wifi => maths::to_db(ctx.wifi_sinr_at(x, 0, fades[0])),
                                _ => unreachable!(),
                            };
                            row.push(v);
                        }
                        if let Some(w) = walk {
                            row.push(if w.serving_is_vlc[i] { 0.0 } else { 1.0 });
                        }
                        row
                    }
                    SweepKind::EeVsDistance => {
                        let fades = fading_sample(&self.spec, i, 1);
                        let mut row = vec![x];
                        for m in &self.spec.modes {
                            row.push(match m {
                                SweepMode::Vlc => ctx.vlc_ee_at(x),
                                SweepMode::Wifi => ctx.wifi_ee_at(x, fades[0]),
                                SweepMode::Hybrid => ctx.hybrid_ee_at(x, fades[0]),
                                _ => unreachable!(),
                            });
                        }
                        row
                    }
                    SweepKind::BatteryVsDistance => {
                        let e = &ctx.calib.energy;
                        let mut row = vec![x];
                        for m in &self.spec.modes {
                            let (load, dist) = match m {
                                SweepMode::Vlc => (&e.ue_load_vlc, ctx.standoff(x, ctx.calib.axis.vlc_positions_m[0])),
                                SweepMode::Wifi => (&e.ue_load_wifi, ctx.standoff(x, ctx.calib.axis.wifi_positions_m[0])),
                                SweepMode::VlcHandover => {
                                    let w = walk.as_ref().expect("walk prepared");
                                    if w.serving_is_vlc[i] {
                                        (&e.ue_load_vlc, w.serving_distance_m[i])
                                    } else {
                                        (&e.ue_load_wifi, w.serving_distance_m[i])
                                    }
                                }
                                _ => unreachable!(),
                            };
                            let ma = load.current_ma(dist, e.device_voltage_v);
                            row.push(energy::battery_lifetime_h(&ctx.battery, ma).unwrap_or(0.0));
                        }
                        row
                    }
                    SweepKind::SarVsDepth | SweepKind::PdVsDepth => {
                        let depth_m = (x * 1e-3).min(tissue_span(ctx));
                        let mut row = vec![x];
                        for (slot, &d) in ctx.calib.exposure.compare_distances_m.iter().enumerate() {
                            for m in &self.spec.modes {
                                let distance = if *m == SweepMode::VlcHandover {
                                    self.eff_vlc_dist[slot].1
                                } else {
                                    d
                                };
                                let source = ctx.calib.exposure.depth_source(m.exposure_mode(), distance);
                                let tissue = ctx.calib.exposure.tissue_for_mode(m.exposure_mode());
                                if self.spec.kind == SweepKind::SarVsDepth {
                                    let v = exposure::sar_depth_profile(&source, &tissue, &[depth_m])
                                        .map(|v| v[0])
                                        .unwrap_or(0.0);
                                    row.push(v);
                                } else {
                                    let inc = source.incident_pd_w_per_m2().unwrap_or(0.0);
                                    let abs = exposure::absorbed_power_density_profile(
                                        &source, &tissue, &[depth_m],
                                    )
                                    .map(|v| v[0])
                                    .unwrap_or(0.0);
                                    row.push(inc);
                                    row.push(abs);
                                }
                            }
                        }
                        row
                    }
                    SweepKind::ComplexityVsDistance => {
                        let model = &ctx.calib.energy.complexity;
                        let mut row = vec![x];
                        for m in &self.spec.modes {
                            row.push(energy::complexity_percent(m.exposure_mode(), x, model));
                        }
                        row
                    }
                    SweepKind::TempField | SweepKind::MacTrace => unreachable!("fixed plans"),
                }
            }
        }
    }

    /// Assemble rows (computed in any order) into the final result.
    pub fn into_result(self, rows: Vec<Vec<f64>>) -> SweepOutput {
        let meta = SweepMeta {
            tool_version: format!("hylink {}", env!("CARGO_PKG_VERSION")),
            kind: self.spec.kind,
            modes: self.spec.modes.clone(),
            range: self.spec.range,
            seed: self.spec.seed,
            fading: self.spec.fading,
            config_hash: None,
        };
        SweepOutput {
            result: SweepResult {
                header: self.header,
                rows,
                meta,
            },
            handover_events: self.events,
        }
    }
}

fn best_vlc_index(ctx: &SweepContext, x: f64) -> usize {
    let mut best = 0;
    let mut best_sinr = f64::NEG_INFINITY;
    for i in 0..ctx.calib.axis.vlc_positions_m.len() {
        let s = ctx.vlc_sinr_at(x, i);
        if s > best_sinr {
            best_sinr = s;
            best = i;
        }
    }
    best
}

fn tissue_span(ctx: &SweepContext) -> f64 {
    ctx.calib
        .exposure
        .tissue_for_mode(ExposureMode::WiFi)
        .total_depth_m()
}

fn temp_field_rows(ctx: &SweepContext, spec: &SweepSpec) -> Result<Vec<Vec<f64>>, SweepError> {
    let calib = &ctx.calib.exposure;
    let opts = BioheatOptions {
        duration_s: calib.duration_s,
        surface: SurfaceBc::Convective,
        core: CoreBc::FixedZero,
        ..BioheatOptions::default()
    };
    let mut fields = Vec::new();
    for m in &spec.modes {
        let mode = m.bioheat_mode();
        let tissue = calib.tissue_for_mode(mode);
        let source = calib.temp_source(mode);
        fields.push(bioheat_solve(&tissue, &source, &opts)?);
    }
    let depths = &fields[0].depths_m;
    let stride = (depths.len() / 128).max(1);
    let mut rows = Vec::new();
    for (ti, &t) in opts.snapshot_times_s.iter().enumerate() {
        let mut zi = 0;
        while zi < depths.len() {
            let mut row = vec![depths[zi] * 1e3, t];
            for f in &fields {
                row.push(f.delta_t_c[ti][zi]);
            }
            rows.push(row);
            zi += stride;
        }
    }
    Ok(rows)
}

/// Numeric row of one MAC trace event: beacons carry device -1, and missing
/// band/slot fields print as -1.
pub fn mac_event_row(e: &MacEvent) -> Vec<f64> {
    vec![
        e.time_ms as f64,
        e.cell.cell as f64,
        e.cell.element as f64,
        if e.device == u32::MAX { -1.0 } else { e.device as f64 },
        e.kind.code() as f64,
        e.band.map(|b| b as f64).unwrap_or(-1.0),
        e.slot.map(|s| s as f64).unwrap_or(-1.0),
    ]
}

/// MAC trace column names shared by the sweep and the mac-sim command.
pub fn mac_trace_header() -> Vec<String> {
    vec![
        "time_ms".to_string(),
        "cell_i".to_string(),
        "cell_j".to_string(),
        "device".to_string(),
        "event_kind".to_string(),
        "band".to_string(),
        "slot".to_string(),
    ]
}

/// Scripted MAC scenario behind the mac-trace sweep: a strip of three cells,
/// six devices arriving in the first half, a third of them crossing to the
/// neighbour cell in the second half.
pub fn scripted_mac_trace(seed: u64, duration_ms: u64) -> Vec<MacEvent> {
    let sim = scripted_mac_sim(3, 6, duration_ms, seed);
    sim.trace().to_vec()
}

/// The same scripted scenario with its knobs exposed.
pub fn scripted_mac_sim(cells: u32, devices: u32, duration_ms: u64, seed: u64) -> MacSim {
    scripted_mac_sim_with(cells, devices, duration_ms, seed, Superframe::default())
}

/// Scripted scenario over a custom superframe layout.
pub fn scripted_mac_sim_with(
    cells: u32,
    devices: u32,
    duration_ms: u64,
    seed: u64,
    superframe: Superframe,
) -> MacSim {
    let mut sim = MacSim::new(cells, superframe, seed);
    for d in 0..devices {
        let cell = d % cells;
        let element = d % 4;
        sim.associate(d, cell, element, 0.5).expect("cell exists");
        sim.submit_request(d, (d as u64) * 37).expect("associated");
    }
    sim.run_until(duration_ms / 2);
    for d in (0..devices).step_by(3) {
        let cell = sim.serving_cell_of(d).unwrap_or(d % cells) as i64;
        let target = if cell + 1 < cells as i64 { cell + 1 } else { cell - 1 };
        let _ = sim.move_device(d, target, 0.5);
    }
    sim.run_until(duration_ms);
    sim
}

/// Run a sweep serially. The CLI's worker pool produces identical output by
/// computing the same rows out of order and re-sorting by index.
pub fn run_sweep(ctx: &SweepContext, spec: SweepSpec) -> Result<SweepOutput, SweepError> {
    let prepared = prepare(ctx, spec)?;
    let rows: Vec<Vec<f64>> = (0..prepared.row_count())
        .map(|i| prepared.compute_row(i))
        .collect();
    Ok(prepared.into_result(rows))
}

/// Sweep-aggregate energy efficiency of the handover-enabled hybrid system
/// against an always-Wi-Fi baseline, both serving the given demand over the
/// default distance grid. Positive percentages mean the hybrid delivers
/// more bits per joule.
pub fn ee_improvement_pct(ctx: &SweepContext, demand_bps: f64) -> Result<f64, SweepError> {
    let xs = SweepKind::SinrVsDistance.default_range().values();
    let walk_spec = SweepSpec::new(SweepKind::SinrVsDistance, 0);
    let walk = walk_axis(ctx, &walk_spec, &xs)?;

    let mut hybrid_bits = 0.0;
    let mut hybrid_energy = 0.0;
    let mut wifi_bits = 0.0;
    let mut wifi_energy = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let wifi_capacity = ctx.wifi_rate_at_distance(ctx.standoff(x, ctx.calib.axis.wifi_positions_m[0]), 1.0);
        let (capacity, power) = if walk.serving_is_vlc[i] {
            let c = ctx.vlc_rate_at_distance(walk.serving_distance_m[i]);
            (c, ctx.vlc_ap_power_w(c, demand_bps))
        } else {
            (wifi_capacity, ctx.wifi_ap_power_w(wifi_capacity, demand_bps))
        };
        hybrid_bits += capacity.min(demand_bps);
        hybrid_energy += power;
        wifi_bits += wifi_capacity.min(demand_bps);
        wifi_energy += ctx.wifi_ap_power_w(wifi_capacity, demand_bps);
    }
    let ee_h = hybrid_bits / hybrid_energy;
    let ee_w = wifi_bits / wifi_energy;
    Ok(100.0 * (ee_h - ee_w) / ee_w)
}

/// Fit the video demand so the hybrid EE improvement lands on the target.
pub fn fit_video_demand(ctx: &SweepContext, target_pct: f64) -> Result<f64, SweepError> {
    let mut lo = 1e7;
    let mut hi = 2e8;
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        let v = ee_improvement_pct(ctx, mid)?;
        if v < target_pct {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mean battery-life gain of the handover-enabled link over always-Wi-Fi
/// across the default grid, hours.
pub fn battery_life_delta_h(ctx: &SweepContext) -> Result<f64, SweepError> {
    let spec = SweepSpec::new(SweepKind::BatteryVsDistance, 0);
    let xs = spec.range.values();
    let walk = walk_axis(ctx, &spec, &xs)?;
    let e = &ctx.calib.energy;
    let mut acc = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let (load, dist) = if walk.serving_is_vlc[i] {
            (&e.ue_load_vlc, walk.serving_distance_m[i])
        } else {
            (&e.ue_load_wifi, walk.serving_distance_m[i])
        };
        let ho = energy::battery_lifetime_h(&ctx.battery, load.current_ma(dist, e.device_voltage_v))
            .unwrap_or(0.0);
        let wifi_dist = ctx.standoff(x, ctx.calib.axis.wifi_positions_m[0]);
        let wifi = energy::battery_lifetime_h(
            &ctx.battery,
            e.ue_load_wifi.current_ma(wifi_dist, e.device_voltage_v),
        )
        .unwrap_or(0.0);
        acc += ho - wifi;
    }
    Ok(acc / xs.len() as f64)
}
