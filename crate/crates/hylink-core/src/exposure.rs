//! Electromagnetic-exposure metrics over a layered skin model: incident and
//! absorbed power density, SAR versus depth, and temperature elevation from
//! a 1-D Pennes bioheat solver.
//!
//! Depth profiles use per-layer exponential power absorption. With
//! `A(z) = exp(-integral of alpha to depth z)`:
//!
//! ```text
//! APD(z) = PD * A(z)                       [W/m^2 remaining at depth z]
//! SAR(z) = alpha(z) * PD * A(z) / rho(z)   [W/kg absorbed locally]
//! ```
//!
//! The bioheat solver marches the elevation field u = T - T_steady with an
//! explicit scheme:
//!
//! ```text
//! rho c du/dt = d/dz (k du/dz) - rho_b c_b w_b u + alpha(z) PD A(z)
//! ```
//!
//! with a convective surface boundary and a fixed core temperature at depth.
//! The zero-source steady state of u is identically zero, so the solver
//! returns the elevation directly.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::maths;

/// Exposure/communication mode labels shared across the metric chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExposureMode {
    /// Conventional always-on RF operation.
    ActiveMode,
    /// Thermal-radiation comparison baseline.
    TrMode,
    /// Time-shared RF + VLC operation.
    Hybrid,
    /// VLC-only operation.
    PureVlc,
    /// A Wi-Fi AP as the radiating source.
    WiFi,
    /// A VLC AP as the source.
    Vlc,
}

impl ExposureMode {
    /// True when tissue absorption follows the optical profile.
    pub fn is_optical(self) -> bool {
        matches!(self, ExposureMode::PureVlc | ExposureMode::Vlc)
    }
}

impl fmt::Display for ExposureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExposureMode::ActiveMode => "active-mode",
            ExposureMode::TrMode => "tr-mode",
            ExposureMode::Hybrid => "hybrid",
            ExposureMode::PureVlc => "pure-vlc",
            ExposureMode::WiFi => "wifi",
            ExposureMode::Vlc => "vlc",
        };
        write!(f, "{s}")
    }
}

/// One tissue layer with thermal, perfusion, and absorption properties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TissueLayer {
    pub name: String,
    pub thickness_m: f64,
    /// Thermal conductivity, W/(m K).
    pub conductivity_w_per_m_k: f64,
    /// Density, kg/m^3.
    pub density_kg_per_m3: f64,
    /// Specific heat, J/(kg K).
    pub specific_heat_j_per_kg_k: f64,
    /// Blood perfusion parameter, 1/s.
    pub perfusion_per_s: f64,
    /// Water volume fraction in [0, 1].
    pub water_fraction: f64,
    /// Power absorption coefficient, 1/m.
    pub attenuation_per_m: f64,
}

/// Layered skin model: epidermis, dermis, subcutaneous fat by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TissueModel {
    pub layers: Vec<TissueLayer>,
    /// Arterial blood temperature, deg C.
    pub blood_temperature_c: f64,
    /// Blood density, kg/m^3.
    pub blood_density_kg_per_m3: f64,
    /// Blood specific heat, J/(kg K).
    pub blood_specific_heat_j_per_kg_k: f64,
    /// Convective surface heat-transfer coefficient, W/(m^2 K).
    pub surface_heat_transfer_w_per_m2_k: f64,
}

impl TissueModel {
    /// Three-layer skin with the given per-layer absorption coefficients
    /// (epidermis, dermis, subcutaneous), standard thermal properties.
    pub fn three_layer_skin(attenuation_per_m: [f64; 3]) -> Self {
        Self {
            layers: vec![
                TissueLayer {
                    name: String::from("epidermis"),
                    thickness_m: 0.06e-3,
                    conductivity_w_per_m_k: 0.24,
                    density_kg_per_m3: 1190.0,
                    specific_heat_j_per_kg_k: 3590.0,
                    perfusion_per_s: 0.0,
                    water_fraction: 0.25,
                    attenuation_per_m: attenuation_per_m[0],
                },
                TissueLayer {
                    name: String::from("dermis"),
                    thickness_m: 2.74e-3,
                    conductivity_w_per_m_k: 0.45,
                    density_kg_per_m3: 1116.0,
                    specific_heat_j_per_kg_k: 3300.0,
                    perfusion_per_s: 1.25e-3,
                    water_fraction: 0.70,
                    attenuation_per_m: attenuation_per_m[1],
                },
                TissueLayer {
                    name: String::from("subcutaneous"),
                    thickness_m: 10.0e-3,
                    conductivity_w_per_m_k: 0.19,
                    density_kg_per_m3: 971.0,
                    specific_heat_j_per_kg_k: 2700.0,
                    perfusion_per_s: 4.5e-4,
                    water_fraction: 0.75,
                    attenuation_per_m: attenuation_per_m[2],
                },
            ],
            blood_temperature_c: 37.0,
            blood_density_kg_per_m3: 1050.0,
            blood_specific_heat_j_per_kg_k: 3617.0,
            surface_heat_transfer_w_per_m2_k: 10.0,
        }
    }

    pub fn total_depth_m(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness_m).sum()
    }

    pub fn layer_at(&self, depth_m: f64) -> Option<&TissueLayer> {
        let mut top = 0.0;
        for layer in &self.layers {
            let bottom = top + layer.thickness_m;
            if depth_m >= top && depth_m <= bottom {
                return Some(layer);
            }
            top = bottom;
        }
        None
    }

    /// Integral of the absorption coefficient from the surface to `depth_m`
    /// (piecewise linear, exact).
    pub fn attenuation_integral(&self, depth_m: f64) -> f64 {
        let mut acc = 0.0;
        let mut top = 0.0;
        for layer in &self.layers {
            let bottom = top + layer.thickness_m;
            if depth_m <= top {
                break;
            }
            let span = depth_m.min(bottom) - top;
            acc += layer.attenuation_per_m * span;
            top = bottom;
        }
        acc
    }

    /// Fraction of the incident power density still travelling at `depth_m`.
    pub fn transmitted_fraction(&self, depth_m: f64) -> f64 {
        maths::exp(-self.attenuation_integral(depth_m))
    }
}

/// A radiating exposure source as seen by the body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExposureSource {
    pub mode: ExposureMode,
    /// Transmit antenna gain, dimensionless.
    pub antenna_gain: f64,
    /// Input power to the antenna, watts.
    pub input_power_w: f64,
    /// Source-to-body distance, metres.
    pub distance_m: f64,
    /// Exposure duration, seconds.
    pub duration_s: f64,
    /// Calibrated per-mode multiplier applied to the incident power density.
    pub pd_multiplier: f64,
}

impl ExposureSource {
    /// Calibrated incident power density at the body surface, W/m^2.
    pub fn incident_pd_w_per_m2(&self) -> Result<f64, ExposureError> {
        Ok(self.pd_multiplier
            * power_density_incident(self.antenna_gain, self.input_power_w, self.distance_m)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExposureError {
    NonPositiveDistance,
    NonPositiveMass,
    DepthOutOfRange(f64),
    UnsortedDepths,
    /// Explicit-scheme stability bound violated: dt must not exceed
    /// rho c dz^2 / (2 k) in any layer.
    Unstable { dt_s: f64, max_dt_s: f64 },
    BadGrid,
}

impl fmt::Display for ExposureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExposureError::NonPositiveDistance => write!(f, "source distance must be positive"),
            ExposureError::NonPositiveMass => write!(f, "tissue mass must be positive"),
            ExposureError::DepthOutOfRange(z) => {
                write!(f, "depth {z} m lies outside the tissue model")
            }
            ExposureError::UnsortedDepths => write!(f, "depths must be sorted ascending"),
            ExposureError::Unstable { dt_s, max_dt_s } => write!(
                f,
                "time step {dt_s} s violates the stability bound {max_dt_s} s"
            ),
            ExposureError::BadGrid => write!(f, "grid step, time step, and duration must be positive"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ExposureError {}

/// Far-field incident power density PD = G P / (4 pi d^2), W/m^2.
pub fn power_density_incident(gain: f64, power_w: f64, distance_m: f64) -> Result<f64, ExposureError> {
    if distance_m <= 0.0 {
        return Err(ExposureError::NonPositiveDistance);
    }
    Ok(gain * power_w / (4.0 * core::f64::consts::PI * distance_m * distance_m))
}

/// Specific absorption rate: exposed power over tissue mass, W/kg.
pub fn sar(p_exposed_w: f64, mass_kg: f64) -> Result<f64, ExposureError> {
    if mass_kg <= 0.0 {
        return Err(ExposureError::NonPositiveMass);
    }
    Ok(p_exposed_w / mass_kg)
}

fn check_depths(tissue: &TissueModel, depths_m: &[f64]) -> Result<(), ExposureError> {
    let span = tissue.total_depth_m();
    for pair in depths_m.windows(2) {
        if pair[1] <= pair[0] {
            return Err(ExposureError::UnsortedDepths);
        }
    }
    for &z in depths_m {
        if z < 0.0 || z > span {
            return Err(ExposureError::DepthOutOfRange(z));
        }
    }
    Ok(())
}

/// Local SAR at each depth: alpha(z) PD A(z) / rho(z).
pub fn sar_depth_profile(
    source: &ExposureSource,
    tissue: &TissueModel,
    depths_m: &[f64],
) -> Result<Vec<f64>, ExposureError> {
    check_depths(tissue, depths_m)?;
    let pd = source.incident_pd_w_per_m2()?;
    depths_m
        .iter()
        .map(|&z| {
            let layer = tissue
                .layer_at(z)
                .ok_or(ExposureError::DepthOutOfRange(z))?;
            Ok(layer.attenuation_per_m * pd * tissue.transmitted_fraction(z) / layer.density_kg_per_m3)
        })
        .collect()
}

/// Power density still travelling at each depth: PD A(z).
pub fn absorbed_power_density_profile(
    source: &ExposureSource,
    tissue: &TissueModel,
    depths_m: &[f64],
) -> Result<Vec<f64>, ExposureError> {
    check_depths(tissue, depths_m)?;
    let pd = source.incident_pd_w_per_m2()?;
    Ok(depths_m
        .iter()
        .map(|&z| pd * tissue.transmitted_fraction(z))
        .collect())
}

/// Boundary condition at the skin surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceBc {
    /// Convective exchange with the ambient using the tissue model's h.
    Convective,
    Insulated,
}

/// Boundary condition at the deep end of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoreBc {
    /// Elevation pinned to zero (body core holds its temperature).
    FixedZero,
    Insulated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BioheatOptions {
    /// Spatial step, metres.
    pub dz_m: f64,
    /// Time step, seconds; `None` picks a stable step automatically.
    pub dt_s: Option<f64>,
    pub duration_s: f64,
    pub surface: SurfaceBc,
    pub core: CoreBc,
    /// Times at which the elevation field is recorded.
    pub snapshot_times_s: Vec<f64>,
}

impl Default for BioheatOptions {
    fn default() -> Self {
        Self {
            dz_m: 2.0e-5,
            dt_s: None,
            duration_s: 600.0,
            surface: SurfaceBc::Convective,
            core: CoreBc::FixedZero,
            snapshot_times_s: vec![60.0, 300.0, 600.0],
        }
    }
}

/// Temperature-elevation field produced by [`bioheat_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct BioheatField {
    /// Cell-centre depths, metres.
    pub depths_m: Vec<f64>,
    /// Recorded snapshot times, seconds.
    pub times_s: Vec<f64>,
    /// Elevation in deg C, one row per snapshot time.
    pub delta_t_c: Vec<Vec<f64>>,
    /// Peak elevation over the whole run, deg C.
    pub peak_c: f64,
    /// Depth of the peak, metres.
    pub peak_depth_m: f64,
}

struct Grid {
    depths: Vec<f64>,
    rho_c: Vec<f64>,
    k: Vec<f64>,
    perfusion_w: Vec<f64>,
}

fn build_grid(tissue: &TissueModel, dz: f64) -> Result<Grid, ExposureError> {
    let span = tissue.total_depth_m();
    let cells = (span / dz + 0.5) as usize;
    if cells < 4 {
        return Err(ExposureError::BadGrid);
    }
    let mut depths = Vec::with_capacity(cells);
    let mut rho_c = Vec::with_capacity(cells);
    let mut k = Vec::with_capacity(cells);
    let mut perfusion = Vec::with_capacity(cells);
    let rb_cb = tissue.blood_density_kg_per_m3 * tissue.blood_specific_heat_j_per_kg_k;
    for i in 0..cells {
        let z = (i as f64 + 0.5) * dz;
        let layer = tissue
            .layer_at(z.min(span))
            .ok_or(ExposureError::DepthOutOfRange(z))?;
        depths.push(z);
        rho_c.push(layer.density_kg_per_m3 * layer.specific_heat_j_per_kg_k);
        k.push(layer.conductivity_w_per_m_k);
        perfusion.push(rb_cb * layer.perfusion_per_s);
    }
    Ok(Grid {
        depths,
        rho_c,
        k,
        perfusion_w: perfusion,
    })
}

/// Strictest explicit-stability bound over the layers: rho c dz^2 / (2 k).
pub fn stability_limit_s(tissue: &TissueModel, dz_m: f64) -> f64 {
    tissue
        .layers
        .iter()
        .map(|l| {
            l.density_kg_per_m3 * l.specific_heat_j_per_kg_k * dz_m * dz_m
                / (2.0 * l.conductivity_w_per_m_k)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Solve the bioheat equation for the source's absorbed-power heating.
pub fn bioheat_solve(
    tissue: &TissueModel,
    source: &ExposureSource,
    opts: &BioheatOptions,
) -> Result<BioheatField, ExposureError> {
    let pd = source.incident_pd_w_per_m2()?;
    let grid = build_grid(tissue, opts.dz_m)?;
    // exact per-cell absorbed power: PD (A(z_i) - A(z_i+1)) / dz  [W/m^3]
    let q: Vec<f64> = (0..grid.depths.len())
        .map(|i| {
            let z0 = i as f64 * opts.dz_m;
            let z1 = z0 + opts.dz_m;
            pd * (tissue.transmitted_fraction(z0) - tissue.transmitted_fraction(z1)) / opts.dz_m
        })
        .collect();
    bioheat_solve_with_source(tissue, &q, opts)
}

/// Solve with an explicit volumetric heating field (one value per grid
/// cell), used for analytic verification cases.
pub fn bioheat_solve_with_source(
    tissue: &TissueModel,
    q_w_per_m3: &[f64],
    opts: &BioheatOptions,
) -> Result<BioheatField, ExposureError> {
    if opts.dz_m <= 0.0 || opts.duration_s <= 0.0 {
        return Err(ExposureError::BadGrid);
    }
    let grid = build_grid(tissue, opts.dz_m)?;
    let n = grid.depths.len();
    if q_w_per_m3.len() != n {
        return Err(ExposureError::BadGrid);
    }

    let max_dt = stability_limit_s(tissue, opts.dz_m);
    let dt = match opts.dt_s {
        Some(dt) if dt <= 0.0 => return Err(ExposureError::BadGrid),
        Some(dt) if dt > max_dt => {
            return Err(ExposureError::Unstable {
                dt_s: dt,
                max_dt_s: max_dt,
            })
        }
        Some(dt) => dt,
        // margin below the conduction bound also covers the perfusion and
        // convection contributions to the Jacobian diagonal
        None => 0.5 * max_dt,
    };

    let dz = opts.dz_m;
    // harmonic-mean interface conductivities
    let k_face: Vec<f64> = (0..n - 1)
        .map(|i| 2.0 * grid.k[i] * grid.k[i + 1] / (grid.k[i] + grid.k[i + 1]))
        .collect();
    let h_surface = match opts.surface {
        SurfaceBc::Convective => tissue.surface_heat_transfer_w_per_m2_k,
        SurfaceBc::Insulated => 0.0,
    };

    let steps = maths::ceil(opts.duration_s / dt) as usize;
    let mut u = vec![0.0f64; n];
    let mut next = vec![0.0f64; n];
    let mut snapshots: Vec<Vec<f64>> = Vec::with_capacity(opts.snapshot_times_s.len());
    let mut snap_iter = opts.snapshot_times_s.iter().peekable();
    let mut peak = 0.0f64;
    let mut peak_depth = 0.0f64;

    for step in 0..steps {
        let t_next = (step + 1) as f64 * dt;
        for i in 0..n {
            let flux_up = if i == 0 {
                // convective exchange with the zero-elevation ambient
                -h_surface * u[0]
            } else {
                k_face[i - 1] * (u[i - 1] - u[i]) / dz
            };
            let flux_down = if i == n - 1 {
                match opts.core {
                    // ghost cell pinned at zero elevation
                    CoreBc::FixedZero => grid.k[i] * (0.0 - u[i]) / dz * 2.0,
                    CoreBc::Insulated => 0.0,
                }
            } else {
                k_face[i] * (u[i + 1] - u[i]) / dz
            };
            let conduction = (flux_up + flux_down) / dz;
            let sink = grid.perfusion_w[i] * u[i];
            next[i] = u[i] + dt * (conduction - sink + q_w_per_m3[i]) / grid.rho_c[i];
        }
        core::mem::swap(&mut u, &mut next);
        for (i, &v) in u.iter().enumerate() {
            if v > peak {
                peak = v;
                peak_depth = grid.depths[i];
            }
        }
        while let Some(&&t_snap) = snap_iter.peek() {
            if t_next + 1e-12 >= t_snap.min(opts.duration_s) {
                snapshots.push(u.clone());
                snap_iter.next();
            } else {
                break;
            }
        }
    }
    while snap_iter.next().is_some() {
        snapshots.push(u.clone());
    }

    Ok(BioheatField {
        depths_m: grid.depths,
        times_s: opts.snapshot_times_s.clone(),
        delta_t_c: snapshots,
        peak_c: peak,
        peak_depth_m: peak_depth,
    })
}
