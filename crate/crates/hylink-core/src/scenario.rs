//! The simulated indoor world: floor plan, access points, user equipment.
//!
//! A [`Scenario`] is immutable after validation and can be shared read-only
//! across parallel sweep workers. Distance sweeps beyond the floor extent run
//! in an abstract 1-D axis mode instead (see [`crate::sweep`]); the floor
//! plan feeds validation, trajectory queries, and the MAC cell layout.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::energy::BatteryModel;
use crate::geom::{LinkGeometry, Point3};
use crate::maths;
use crate::rf::WifiApParams;
use crate::vlc::VlcApParams;

/// Axis-aligned rectangle on the floor, metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x && x <= self.x + self.w && y >= self.y && y <= self.y + self.h
    }

    /// Strict interior overlap; shared edges do not count.
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x < other.x + other.w
            && other.x < self.x + self.w
            && self.y < other.y + other.h
            && other.y < self.y + self.h
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Room {
    pub label: String,
    pub rect: Rect,
}

/// Floor geometry. Rooms must lie inside the bounds and not overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorPlan {
    pub width_m: f64,
    pub depth_m: f64,
    #[serde(default = "default_ceiling")]
    pub ceiling_m: f64,
    #[serde(default)]
    pub rooms: Vec<Room>,
    /// Corridor centrelines as polylines of (x, y) vertices.
    #[serde(default)]
    pub corridors: Vec<Vec<[f64; 2]>>,
}

fn default_ceiling() -> f64 {
    3.0
}

impl FloorPlan {
    pub fn contains(&self, p: &Point3) -> bool {
        p.x >= 0.0
            && p.x <= self.width_m
            && p.y >= 0.0
            && p.y <= self.depth_m
            && p.z >= 0.0
            && p.z <= self.ceiling_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApKind {
    Vlc,
    WiFi,
}

impl fmt::Display for ApKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApKind::Vlc => write!(f, "vlc"),
            ApKind::WiFi => write!(f, "wifi"),
        }
    }
}

/// One access point. The kind-specific parameter bundle must be attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessPoint {
    pub id: String,
    pub kind: ApKind,
    pub position: Point3,
    /// Electrical power just to keep the AP on, watts.
    pub p_on_w: f64,
    /// Maximum additional power for carrying data, watts.
    pub p_data_max_w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vlc: Option<VlcApParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wifi: Option<WifiApParams>,
}

/// Timed trajectory sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub t_s: f64,
    pub position: Point3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserEquipment {
    pub id: String,
    pub trajectory: Vec<Waypoint>,
    #[serde(default)]
    pub battery: BatteryModel,
    /// Target application data rate, bits per second.
    pub demand_bps: f64,
}

/// A validated world: floor plan, APs, UEs, and the run seed. The optional
/// `receiver` and `policy` tables override the UE photodetector front-end
/// and the handover thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub floor: FloorPlan,
    #[serde(default)]
    pub aps: Vec<AccessPoint>,
    #[serde(default)]
    pub ues: Vec<UserEquipment>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver: Option<crate::vlc::VlcReceiverParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<crate::link::HandoverPolicy>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    NonPositiveFloor,
    RoomOutOfBounds(String),
    RoomOverlap(String, String),
    ApOutOfBounds(String),
    UeOutOfBounds(String),
    DuplicateId(String),
    NonPositivePower(String),
    MissingParams(String),
    /// AP count differs from the reference layout (strict-paper mode only).
    WrongApCount {
        kind: ApKind,
        expected: usize,
        actual: usize,
    },
    EmptyTrajectory(String),
    NonIncreasingTimes(String),
    TimeOutOfRange {
        t_s: f64,
        first_s: f64,
        last_s: f64,
    },
    CoincidentPoints,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::NonPositiveFloor => write!(f, "floor dimensions must be positive"),
            ScenarioError::RoomOutOfBounds(l) => write!(f, "room `{l}` lies outside the floor"),
            ScenarioError::RoomOverlap(a, b) => write!(f, "rooms `{a}` and `{b}` overlap"),
            ScenarioError::ApOutOfBounds(id) => {
                write!(f, "access point `{id}` is outside the floor bounds")
            }
            ScenarioError::UeOutOfBounds(id) => {
                write!(f, "a waypoint of UE `{id}` is outside the floor bounds")
            }
            ScenarioError::DuplicateId(id) => write!(f, "duplicate id `{id}`"),
            ScenarioError::NonPositivePower(id) => {
                write!(f, "access point `{id}` needs p_on_w > 0 and p_data_max_w >= 0")
            }
            ScenarioError::MissingParams(id) => {
                write!(f, "access point `{id}` is missing its kind-specific parameters")
            }
            ScenarioError::WrongApCount {
                kind,
                expected,
                actual,
            } => write!(
                f,
                "strict-paper mode expects {expected} {kind} APs, scenario has {actual}"
            ),
            ScenarioError::EmptyTrajectory(id) => write!(f, "UE `{id}` has no waypoints"),
            ScenarioError::NonIncreasingTimes(id) => {
                write!(f, "UE `{id}` waypoint times must be strictly increasing")
            }
            ScenarioError::TimeOutOfRange { t_s, first_s, last_s } => write!(
                f,
                "time {t_s} s outside trajectory span [{first_s}, {last_s}] s"
            ),
            ScenarioError::CoincidentPoints => {
                write!(f, "link geometry is undefined for coincident points")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ScenarioError {}

/// Reference AP counts of the bundled third-floor layout: six Wi-Fi APs
/// (four corners plus two corridors) and four VLC APs on one lamp.
pub const STRICT_WIFI_AP_COUNT: usize = 6;
pub const STRICT_VLC_AP_COUNT: usize = 4;

impl Scenario {
    /// Checks every structural invariant. `strict_paper` additionally pins
    /// the AP counts to the reference layout.
    pub fn validate(&self, strict_paper: bool) -> Result<(), ScenarioError> {
        if self.floor.width_m <= 0.0 || self.floor.depth_m <= 0.0 || self.floor.ceiling_m <= 0.0 {
            return Err(ScenarioError::NonPositiveFloor);
        }
        let bounds = Rect {
            x: 0.0,
            y: 0.0,
            w: self.floor.width_m,
            h: self.floor.depth_m,
        };
        for room in &self.floor.rooms {
            let r = room.rect;
            let inside = r.x >= 0.0
                && r.y >= 0.0
                && r.x + r.w <= bounds.w
                && r.y + r.h <= bounds.h
                && r.w > 0.0
                && r.h > 0.0;
            if !inside {
                return Err(ScenarioError::RoomOutOfBounds(room.label.clone()));
            }
        }
        for (i, a) in self.floor.rooms.iter().enumerate() {
            for b in &self.floor.rooms[i + 1..] {
                if a.rect.overlaps(&b.rect) {
                    return Err(ScenarioError::RoomOverlap(a.label.clone(), b.label.clone()));
                }
            }
        }

        let mut ids: Vec<&str> = Vec::new();
        let check_id = |id: &str, ids: &Vec<&str>| -> Result<(), ScenarioError> {
            if ids.contains(&id) {
                return Err(ScenarioError::DuplicateId(String::from(id)));
            }
            Ok(())
        };

        for ap in &self.aps {
            check_id(&ap.id, &ids)?;
            ids.push(&ap.id);
            if !self.floor.contains(&ap.position) {
                return Err(ScenarioError::ApOutOfBounds(ap.id.clone()));
            }
            if ap.p_on_w <= 0.0 || ap.p_data_max_w < 0.0 {
                return Err(ScenarioError::NonPositivePower(ap.id.clone()));
            }
            let has_params = match ap.kind {
                ApKind::Vlc => ap.vlc.is_some(),
                ApKind::WiFi => ap.wifi.is_some(),
            };
            if !has_params {
                return Err(ScenarioError::MissingParams(ap.id.clone()));
            }
        }
        for ue in &self.ues {
            check_id(&ue.id, &ids)?;
            ids.push(&ue.id);
            if ue.trajectory.is_empty() {
                return Err(ScenarioError::EmptyTrajectory(ue.id.clone()));
            }
            for pair in ue.trajectory.windows(2) {
                if pair[1].t_s <= pair[0].t_s {
                    return Err(ScenarioError::NonIncreasingTimes(ue.id.clone()));
                }
            }
            for wp in &ue.trajectory {
                if !self.floor.contains(&wp.position) {
                    return Err(ScenarioError::UeOutOfBounds(ue.id.clone()));
                }
            }
        }

        if strict_paper {
            let wifi = self.aps.iter().filter(|a| a.kind == ApKind::WiFi).count();
            let vlc = self.aps.iter().filter(|a| a.kind == ApKind::Vlc).count();
            if wifi != STRICT_WIFI_AP_COUNT {
                return Err(ScenarioError::WrongApCount {
                    kind: ApKind::WiFi,
                    expected: STRICT_WIFI_AP_COUNT,
                    actual: wifi,
                });
            }
            if vlc != STRICT_VLC_AP_COUNT {
                return Err(ScenarioError::WrongApCount {
                    kind: ApKind::Vlc,
                    expected: STRICT_VLC_AP_COUNT,
                    actual: vlc,
                });
            }
        }
        Ok(())
    }
}

/// Piecewise-linear interpolation of a UE trajectory.
pub fn ue_position_at(ue: &UserEquipment, t_s: f64) -> Result<Point3, ScenarioError> {
    let first = ue
        .trajectory
        .first()
        .ok_or_else(|| ScenarioError::EmptyTrajectory(ue.id.clone()))?;
    let last = ue.trajectory.last().expect("non-empty");
    if t_s < first.t_s || t_s > last.t_s {
        return Err(ScenarioError::TimeOutOfRange {
            t_s,
            first_s: first.t_s,
            last_s: last.t_s,
        });
    }
    for pair in ue.trajectory.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if t_s <= b.t_s {
            let f = (t_s - a.t_s) / (b.t_s - a.t_s);
            return Ok(Point3::new(
                a.position.x + f * (b.position.x - a.position.x),
                a.position.y + f * (b.position.y - a.position.y),
                a.position.z + f * (b.position.z - a.position.z),
            ));
        }
    }
    Ok(last.position)
}

/// LOS geometry between an AP and a receiver position. The AP normal points
/// straight down and the photodetector normal straight up, so the irradiance
/// and incidence angles coincide for this fixed-orientation model.
pub fn link_geometry(ap_position: &Point3, pos: &Point3) -> Result<LinkGeometry, ScenarioError> {
    let d = ap_position.distance(pos);
    if d == 0.0 {
        return Err(ScenarioError::CoincidentPoints);
    }
    let vertical = ap_position.z - pos.z;
    // clamp against rounding before acos
    let cos_angle = (vertical / d).clamp(-1.0, 1.0);
    let angle = maths::acos(cos_angle);
    Ok(LinkGeometry {
        distance_m: d,
        irradiance_rad: angle,
        incidence_rad: angle,
    })
}
