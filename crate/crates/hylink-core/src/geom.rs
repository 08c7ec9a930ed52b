//! Minimal 3-D geometry used by the scenario and channel models.

use serde::{Deserialize, Serialize};

use crate::maths;

/// A point in metres. z is height above the floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        maths::sqrt(dx * dx + dy * dy + dz * dz)
    }
}

/// Line-of-sight geometry between a downward-facing AP and an upward-facing
/// receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Euclidean standoff distance in metres.
    pub distance_m: f64,
    /// Angle from the AP's downward normal to the receiver, radians.
    pub irradiance_rad: f64,
    /// Angle from the receiver's upward normal to the AP, radians.
    pub incidence_rad: f64,
}

impl LinkGeometry {
    /// Boresight geometry at a given distance (both angles zero). This is the
    /// abstract 1-D "distance axis" used by the scripted sweeps.
    pub fn boresight(distance_m: f64) -> Self {
        Self {
            distance_m,
            irradiance_rad: 0.0,
            incidence_rad: 0.0,
        }
    }
}
