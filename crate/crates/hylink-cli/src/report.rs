//! Summary report: headline reductions of the Wi-Fi to VLC switch (surface
//! SAR, surface absorbed power density), the hybrid energy-efficiency
//! improvement, and the mean battery-life gain.

use std::fmt;

use hylink_core::sweep::{self, SweepContext, SweepKind, SweepMode, SweepResult};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub metric: String,
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    /// True when the shipped default calibration produced the inputs.
    pub calibrated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReportError {
    /// A prerequisite sweep is absent; names the missing kind.
    MissingSweep(SweepKind),
    MissingColumn(String),
    EmptyResult(SweepKind),
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::MissingSweep(k) => write!(f, "missing prerequisite sweep `{}`", k.name()),
            ReportError::MissingColumn(c) => write!(f, "result lacks column `{c}`"),
            ReportError::EmptyResult(k) => write!(f, "sweep `{}` holds no rows", k.name()),
        }
    }
}

impl std::error::Error for ReportError {}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn find_result(results: &[SweepResult], kind: SweepKind) -> Result<&SweepResult, ReportError> {
    results
        .iter()
        .find(|r| r.meta.kind == kind)
        .ok_or(ReportError::MissingSweep(kind))
}

fn column(result: &SweepResult, name: &str) -> Result<usize, ReportError> {
    result
        .header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| ReportError::MissingColumn(name.to_string()))
}

fn mode_tag(mode: SweepMode) -> &'static str {
    match mode {
        SweepMode::Vlc => "vlc",
        SweepMode::VlcHandover => "vlc_ho",
        SweepMode::Wifi => "wifi",
        SweepMode::Hybrid => "hybrid",
        SweepMode::ActiveMode => "active_mode",
        SweepMode::TrMode => "tr_mode",
        SweepMode::PureVlc => "pure_vlc",
    }
}

/// Percentage reduction metrics for switching `from` -> `to`, plus the
/// energy metrics. The SAR and absorbed-PD sweeps must be present; both
/// reductions are read at the skin surface of the first compare distance.
pub fn report_summary(
    results: &[SweepResult],
    from: SweepMode,
    to: SweepMode,
    ctx: &SweepContext,
) -> Result<Summary, ReportError> {
    let d = ctx.calib.exposure.compare_distances_m[0];
    let sar = find_result(results, SweepKind::SarVsDepth)?;
    let surface = sar.rows.first().ok_or(ReportError::EmptyResult(SweepKind::SarVsDepth))?;
    let sar_from = surface[column(sar, &format!("sar_{}_{}m_w_per_kg", mode_tag(from), d))?];
    let sar_to = surface[column(sar, &format!("sar_{}_{}m_w_per_kg", mode_tag(to), d))?];
    let sar_reduction = 100.0 * (1.0 - sar_to / sar_from);

    let pd = find_result(results, SweepKind::PdVsDepth)?;
    let surface = pd.rows.first().ok_or(ReportError::EmptyResult(SweepKind::PdVsDepth))?;
    let pd_from = surface[column(pd, &format!("pd_abs_{}_{}m_w_per_m2", mode_tag(from), d))?];
    let pd_to = surface[column(pd, &format!("pd_abs_{}_{}m_w_per_m2", mode_tag(to), d))?];
    let pd_reduction = 100.0 * (1.0 - pd_to / pd_from);

    let ee = sweep::ee_improvement_pct(ctx, ctx.calib.energy.video_demand_bps)
        .map_err(|_| ReportError::EmptyResult(SweepKind::EeVsDistance))?;
    let battery = sweep::battery_life_delta_h(ctx)
        .map_err(|_| ReportError::EmptyResult(SweepKind::BatteryVsDistance))?;

    Ok(Summary {
        rows: vec![
            SummaryRow {
                metric: "sar_reduction".to_string(),
                value: sar_reduction,
                unit: "pct".to_string(),
            },
            SummaryRow {
                metric: "absorbed_pd_reduction".to_string(),
                value: pd_reduction,
                unit: "pct".to_string(),
            },
            SummaryRow {
                metric: "ee_improvement".to_string(),
                value: ee,
                unit: "pct".to_string(),
            },
            SummaryRow {
                metric: "battery_life_delta".to_string(),
                value: battery,
                unit: "h".to_string(),
            },
        ],
        calibrated: ctx.calib.is_shipped_default(),
    })
}

/// Inputs recorded in the summary metadata so `verify` can re-derive its
/// fingerprint (the xor of the aggregated sweeps' fingerprints).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryMeta {
    pub tool_version: String,
    pub seed: u64,
    pub fading: hylink_core::rf::FadingMode,
    pub config_hash: u64,
}

/// Render the summary as CSV.
pub fn render_summary(summary: &Summary, meta: &SummaryMeta) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {}\n", meta.tool_version));
    out.push_str(&format!("# seed: {}\n", meta.seed));
    out.push_str(&format!(
        "# fading: {}\n",
        match meta.fading {
            hylink_core::rf::FadingMode::Deterministic => "deterministic",
            hylink_core::rf::FadingMode::Rayleigh => "rayleigh",
        }
    ));
    out.push_str(&format!(
        "# calibration: {}\n",
        if summary.calibrated { "calibrated" } else { "uncalibrated" }
    ));
    out.push_str(&format!("# config_hash: {:016x}\n", meta.config_hash));
    out.push_str("metric,value,unit\n");
    for row in &summary.rows {
        out.push_str(&format!("{},{},{}\n", row.metric, row.value, row.unit));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use hylink_core::sweep::{run_sweep, SweepSpec};

    fn results() -> Vec<SweepResult> {
        let ctx = SweepContext::default();
        [SweepKind::SarVsDepth, SweepKind::PdVsDepth]
            .into_iter()
            .map(|k| run_sweep(&ctx, SweepSpec::new(k, 42)).unwrap().result)
            .collect()
    }

    #[test]
    fn headline_reductions() {
        let ctx = SweepContext::default();
        let summary = report_summary(&results(), SweepMode::Wifi, SweepMode::Vlc, &ctx).unwrap();
        assert!(summary.calibrated);
        let get = |m: &str| {
            summary
                .rows
                .iter()
                .find(|r| r.metric == m)
                .map(|r| r.value)
                .unwrap()
        };
        assert!((get("sar_reduction") - 59.6).abs() < 5.0);
        assert!((get("absorbed_pd_reduction") - 48.0).abs() < 5.0);
        assert!((get("ee_improvement") - 37.0).abs() < 10.0);
    }

    #[test]
    fn identical_modes_give_zero_reductions() {
        let ctx = SweepContext::default();
        let summary = report_summary(&results(), SweepMode::Wifi, SweepMode::Wifi, &ctx).unwrap();
        assert_eq!(summary.rows[0].value, 0.0);
        assert_eq!(summary.rows[1].value, 0.0);
    }

    #[test]
    fn missing_sar_sweep_is_named() {
        let ctx = SweepContext::default();
        let only_pd: Vec<SweepResult> = results()
            .into_iter()
            .filter(|r| r.meta.kind == SweepKind::PdVsDepth)
            .collect();
        let err = report_summary(&only_pd, SweepMode::Wifi, SweepMode::Vlc, &ctx).unwrap_err();
        assert_eq!(err, ReportError::MissingSweep(SweepKind::SarVsDepth));
        assert!(err.to_string().contains("sar-vs-depth"));
    }
}
