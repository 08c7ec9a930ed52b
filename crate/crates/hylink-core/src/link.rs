//! Serving-link selection: intra-VLC and vertical handover, plus hybrid-mode
//! rate composition from session time fractions.
//!
//! The decision rule is SINR-primary. A UE stays on its serving VLC lamp
//! while that lamp delivers at least the minimum SINR; below it the best
//! VLC candidate takes over (intra handover), and when every lamp is below
//! the threshold the best Wi-Fi AP serves (vertical handover). Re-entering
//! VLC from Wi-Fi requires the threshold plus a hysteresis margin so that
//! snapshot noise cannot ping-pong the link. The default distance thresholds
//! (80 m intra, 120 m vertical) are the ranges at which the reference
//! parameter tables make the SINR cross the 2 dB floor.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HandoverPolicy {
    /// Minimum serviceable VLC SINR, dB.
    pub vlc_min_sinr_db: f64,
    /// Distance at which the default tables cross the SINR floor, metres.
    pub intra_handover_distance_m: f64,
    /// Distance of the vertical (VLC to Wi-Fi) switch, metres.
    pub vertical_handover_distance_m: f64,
    /// Extra margin required to come back to VLC from Wi-Fi, dB.
    pub hysteresis_db: f64,
}

impl Default for HandoverPolicy {
    fn default() -> Self {
        Self {
            vlc_min_sinr_db: 2.0,
            intra_handover_distance_m: 80.0,
            vertical_handover_distance_m: 120.0,
            hysteresis_db: 1.0,
        }
    }
}

/// Which technology and AP currently serve a UE.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Serving {
    Vlc(String),
    Wifi(String),
}

impl Serving {
    pub fn ap_id(&self) -> &str {
        match self {
            Serving::Vlc(id) | Serving::Wifi(id) => id,
        }
    }

    pub fn is_vlc(&self) -> bool {
        matches!(self, Serving::Vlc(_))
    }
}

impl fmt::Display for Serving {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Serving::Vlc(id) => write!(f, "vlc:{id}"),
            Serving::Wifi(id) => write!(f, "wifi:{id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkState {
    pub serving: Serving,
    /// Time the serving link was entered, seconds.
    pub since_s: f64,
}

/// Per-AP SINRs visible to one UE at one instant, in dB.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SinrSnapshot {
    pub vlc: Vec<(String, f64)>,
    pub wifi: Vec<(String, f64)>,
}

impl SinrSnapshot {
    fn best(list: &[(String, f64)]) -> Option<(&str, f64)> {
        // ties break towards the lowest id
        let mut best: Option<(&str, f64)> = None;
        for (id, sinr) in list {
            best = match best {
                None => Some((id, *sinr)),
                Some((bid, bs)) => {
                    if *sinr > bs || (*sinr == bs && id.as_str() < bid) {
                        Some((id, *sinr))
                    } else {
                        Some((bid, bs))
                    }
                }
            };
        }
        best
    }

    pub fn best_vlc(&self) -> Option<(&str, f64)> {
        Self::best(&self.vlc)
    }

    pub fn best_wifi(&self) -> Option<(&str, f64)> {
        Self::best(&self.wifi)
    }

    pub fn sinr_of(&self, id: &str) -> Option<f64> {
        self.vlc
            .iter()
            .chain(self.wifi.iter())
            .find(|(i, _)| i == id)
            .map(|(_, s)| *s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkError {
    EmptySnapshot,
    NoCandidates,
}

impl fmt::Display for LinkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkError::EmptySnapshot => write!(f, "snapshot holds no APs"),
            LinkError::NoCandidates => write!(f, "intra handover needs at least one candidate"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LinkError {}

/// Outcome of evaluating the intra-VLC candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct IntraChoice {
    pub ap_id: String,
    pub sinr_db: f64,
    /// Set when even the best candidate is below the SINR floor, i.e. a
    /// vertical handover should follow.
    pub vertical_recommended: bool,
}

/// Pick the best VLC candidate by SINR (ties to the lowest id).
pub fn intra_vlc_handover(
    candidates: &[(String, f64)],
    policy: &HandoverPolicy,
) -> Result<IntraChoice, LinkError> {
    let (id, sinr) = SinrSnapshot::best(candidates).ok_or(LinkError::NoCandidates)?;
    Ok(IntraChoice {
        ap_id: String::from(id),
        sinr_db: sinr,
        vertical_recommended: sinr < policy.vlc_min_sinr_db,
    })
}

/// One serving-link decision. Deterministic in (snapshot, previous state).
pub fn select_link(
    snapshot: &SinrSnapshot,
    policy: &HandoverPolicy,
    previous: Option<&LinkState>,
    now_s: f64,
) -> Result<LinkState, LinkError> {
    if snapshot.vlc.is_empty() && snapshot.wifi.is_empty() {
        return Err(LinkError::EmptySnapshot);
    }

    let on_wifi = matches!(previous.map(|p| &p.serving), Some(Serving::Wifi(_)));
    let entry_threshold = policy.vlc_min_sinr_db + if on_wifi { policy.hysteresis_db } else { 0.0 };

    // sticky serving lamp: stay while it clears the floor
    if let Some(prev) = previous {
        if let Serving::Vlc(id) = &prev.serving {
            if let Some(sinr) = snapshot.sinr_of(id) {
                if sinr >= policy.vlc_min_sinr_db {
                    return Ok(prev.clone());
                }
            }
        }
    }

    match snapshot.best_vlc() {
        Some((id, sinr)) if sinr >= entry_threshold => {
            let serving = Serving::Vlc(String::from(id));
            if previous.map(|p| &p.serving) == Some(&serving) {
                return Ok(previous.unwrap().clone());
            }
            Ok(LinkState { serving, since_s: now_s })
        }
        _ => {
            let (id, _) = snapshot
                .best_wifi()
                .ok_or(LinkError::EmptySnapshot)?;
            let serving = Serving::Wifi(String::from(id));
            if previous.map(|p| &p.serving) == Some(&serving) {
                return Ok(previous.unwrap().clone());
            }
            Ok(LinkState { serving, since_s: now_s })
        }
    }
}

/// Reason attached to a logged handover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HandoverReason {
    Initial,
    IntraVlc,
    VerticalToWifi,
    VerticalToVlc,
}

impl fmt::Display for HandoverReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HandoverReason::Initial => "initial",
            HandoverReason::IntraVlc => "intra-vlc",
            HandoverReason::VerticalToWifi => "vertical-to-wifi",
            HandoverReason::VerticalToVlc => "vertical-to-vlc",
        };
        write!(f, "{s}")
    }
}

/// One row of the handover event log.
#[derive(Debug, Clone, PartialEq)]
pub struct HandoverEvent {
    pub time_s: f64,
    pub ue_id: String,
    pub from: Option<Serving>,
    pub to: Serving,
    pub reason: HandoverReason,
    pub sinr_before_db: f64,
    pub sinr_after_db: f64,
}

/// Advance the serving state over a time-ordered snapshot sequence, logging
/// every transition.
pub fn walk_snapshots(
    ue_id: &str,
    snapshots: &[(f64, SinrSnapshot)],
    policy: &HandoverPolicy,
) -> Result<(Vec<LinkState>, Vec<HandoverEvent>), LinkError> {
    let mut states = Vec::with_capacity(snapshots.len());
    let mut events = Vec::new();
    let mut current: Option<LinkState> = None;
    for (t, snap) in snapshots {
        let next = select_link(snap, policy, current.as_ref(), *t)?;
        let changed = current.as_ref().map(|c| &c.serving) != Some(&next.serving);
        if changed {
            let from = current.as_ref().map(|c| c.serving.clone());
            let reason = match (&from, &next.serving) {
                (None, _) => HandoverReason::Initial,
                (Some(Serving::Vlc(_)), Serving::Vlc(_)) => HandoverReason::IntraVlc,
                (Some(Serving::Vlc(_)), Serving::Wifi(_)) => HandoverReason::VerticalToWifi,
                (Some(Serving::Wifi(_)), Serving::Vlc(_)) => HandoverReason::VerticalToVlc,
                (Some(Serving::Wifi(_)), Serving::Wifi(_)) => HandoverReason::IntraVlc,
            };
            let before = from
                .as_ref()
                .and_then(|s| snap.sinr_of(s.ap_id()))
                .unwrap_or(f64::NEG_INFINITY);
            let after = snap.sinr_of(next.serving.ap_id()).unwrap_or(f64::NEG_INFINITY);
            events.push(HandoverEvent {
                time_s: *t,
                ue_id: String::from(ue_id),
                from,
                to: next.serving.clone(),
                reason,
                sinr_before_db: before,
                sinr_after_db: after,
            });
        }
        states.push(next.clone());
        current = Some(next);
    }
    Ok((states, events))
}

/// Session time split between VLC and RF service.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeFractionCase {
    /// Fraction of the session served by VLC.
    pub vlc_fraction: f64,
    /// Fraction served by RF.
    pub rf_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FractionLabel {
    VlcDominant,
    RfDominant,
    Equal,
}

impl TimeFractionCase {
    /// Indoor-dominant default: two thirds of the session on VLC.
    pub fn vlc_dominant() -> Self {
        Self { vlc_fraction: 0.67, rf_fraction: 0.33 }
    }

    pub fn rf_dominant() -> Self {
        Self { vlc_fraction: 0.33, rf_fraction: 0.67 }
    }

    pub fn equal() -> Self {
        Self { vlc_fraction: 0.5, rf_fraction: 0.5 }
    }

    pub fn is_valid(&self) -> bool {
        (self.vlc_fraction + self.rf_fraction - 1.0).abs() < 1e-9
            && (0.0..=1.0).contains(&self.vlc_fraction)
            && (0.0..=1.0).contains(&self.rf_fraction)
    }

    pub fn label(&self) -> FractionLabel {
        if self.vlc_fraction > self.rf_fraction {
            FractionLabel::VlcDominant
        } else if self.rf_fraction > self.vlc_fraction {
            FractionLabel::RfDominant
        } else {
            FractionLabel::Equal
        }
    }
}

/// Hybrid-session rates from the per-mode full rates and time fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridRates {
    pub vlc_bps: f64,
    pub rf_bps: f64,
    /// Time-weighted sum of the two, exposed as a convenience figure.
    pub total_bps: f64,
}

pub fn compose_hybrid_rate(
    tf: &TimeFractionCase,
    vlc_full_bps: f64,
    rf_full_bps: f64,
) -> HybridRates {
    let vlc = vlc_full_bps * tf.vlc_fraction;
    let rf = rf_full_bps * tf.rf_fraction;
    HybridRates {
        vlc_bps: vlc,
        rf_bps: rf,
        total_bps: vlc + rf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn snap(vlc: &[(&str, f64)], wifi: &[(&str, f64)]) -> SinrSnapshot {
        SinrSnapshot {
            vlc: vlc.iter().map(|(i, s)| (i.to_string(), *s)).collect(),
            wifi: wifi.iter().map(|(i, s)| (i.to_string(), *s)).collect(),
        }
    }

    #[test]
    fn select_link_prefers_serviceable_vlc() {
        let policy = HandoverPolicy::default();
        let s = snap(&[("vlc-0", 10.0)], &[("wifi-0", 20.0)]);
        let state = select_link(&s, &policy, None, 0.0).unwrap();
        assert_eq!(state.serving, Serving::Vlc("vlc-0".to_string()));
    }

    #[test]
    fn select_link_falls_back_to_wifi() {
        let policy = HandoverPolicy::default();
        let s = snap(&[("vlc-0", 1.0)], &[("wifi-0", 8.0)]);
        let state = select_link(&s, &policy, None, 0.0).unwrap();
        assert_eq!(state.serving, Serving::Wifi("wifi-0".to_string()));
    }

    #[test]
    fn select_link_breaks_ties_by_lowest_id() {
        let policy = HandoverPolicy::default();
        let s = snap(&[("vlc-1", 10.0), ("vlc-0", 10.0)], &[]);
        let state = select_link(&s, &policy, None, 0.0).unwrap();
        assert_eq!(state.serving, Serving::Vlc("vlc-0".to_string()));
        assert!(select_link(&SinrSnapshot::default(), &policy, None, 0.0).is_err());
    }

    #[test]
    fn select_link_is_deterministic() {
        let policy = HandoverPolicy::default();
        let s = snap(&[("vlc-0", 3.0), ("vlc-1", 5.0)], &[("wifi-0", 9.0)]);
        let a = select_link(&s, &policy, None, 1.0).unwrap();
        let b = select_link(&s, &policy, None, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn intra_handover_picks_max_sinr_and_flags_vertical() {
        let policy = HandoverPolicy::default();
        let single = vec![("vlc-0".to_string(), 5.0)];
        let choice = intra_vlc_handover(&single, &policy).unwrap();
        assert_eq!(choice.ap_id, "vlc-0");
        assert!(!choice.vertical_recommended);

        let cands = vec![("vlc-0".to_string(), 1.0), ("vlc-1".to_string(), 14.0)];
        let choice = intra_vlc_handover(&cands, &policy).unwrap();
        assert_eq!(choice.ap_id, "vlc-1");

        let weak = vec![("vlc-0".to_string(), -4.0), ("vlc-1".to_string(), 0.5)];
        let choice = intra_vlc_handover(&weak, &policy).unwrap();
        assert_eq!(choice.ap_id, "vlc-1");
        assert!(choice.vertical_recommended);

        assert!(intra_vlc_handover(&[], &policy).is_err());
    }

    #[test]
    fn hysteresis_prevents_ping_pong() {
        // +-0.4 dB oscillation around the 2 dB floor with 1 dB hysteresis:
        // at most one handover
        let policy = HandoverPolicy::default();
        let snapshots: Vec<(f64, SinrSnapshot)> = (0..40)
            .map(|i| {
                let sinr = if i % 2 == 0 { 2.4 } else { 1.6 };
                (i as f64, snap(&[("vlc-0", sinr)], &[("wifi-0", 9.0)]))
            })
            .collect();
        let (_, events) = walk_snapshots("ue-1", &snapshots, &policy).unwrap();
        let handovers = events
            .iter()
            .filter(|e| e.reason != HandoverReason::Initial)
            .count();
        assert!(handovers <= 1, "saw {handovers} handovers");
    }

    #[test]
    fn compose_hybrid_cases() {
        let r = compose_hybrid_rate(&TimeFractionCase::vlc_dominant(), 100e6, 20e6);
        assert!((r.vlc_bps - 67e6).abs() < 1e-3);
        assert!((r.rf_bps - 6.6e6).abs() < 1e-3);

        let eq = compose_hybrid_rate(&TimeFractionCase::equal(), 100e6, 20e6);
        assert!((eq.vlc_bps - 50e6).abs() < 1e-3);
        assert!((eq.rf_bps - 10e6).abs() < 1e-3);

        let pure = compose_hybrid_rate(
            &TimeFractionCase { vlc_fraction: 1.0, rf_fraction: 0.0 },
            100e6,
            20e6,
        );
        assert_eq!(pure.rf_bps, 0.0);
        assert_eq!(pure.total_bps, pure.vlc_bps);
    }

    #[test]
    fn fraction_labels() {
        assert_eq!(TimeFractionCase::vlc_dominant().label(), FractionLabel::VlcDominant);
        assert_eq!(TimeFractionCase::rf_dominant().label(), FractionLabel::RfDominant);
        assert_eq!(TimeFractionCase::equal().label(), FractionLabel::Equal);
        assert!(TimeFractionCase::vlc_dominant().is_valid());
        assert!(!TimeFractionCase { vlc_fraction: 0.8, rf_fraction: 0.3 }.is_valid());
    }

    proptest! {
        #[test]
        fn hybrid_rate_ordering_postcondition(
            p in 0.5f64..1.0,
            rv in 1e6f64..5e8,
            scale in 0.0f64..1.0,
        ) {
            // p > q and vlc_full >= rf_full implies vlc share >= rf share
            let tf = TimeFractionCase { vlc_fraction: p, rf_fraction: 1.0 - p };
            let rr = rv * scale;
            let r = compose_hybrid_rate(&tf, rv, rr);
            prop_assert!(r.vlc_bps >= r.rf_bps);
        }

        #[test]
        fn hybrid_rate_exchange_symmetry(
            p in 0.0f64..1.0,
            rv in 0.0f64..1e8,
            rr in 0.0f64..1e8,
        ) {
            let tf = TimeFractionCase { vlc_fraction: p, rf_fraction: 1.0 - p };
            let sw = TimeFractionCase { vlc_fraction: 1.0 - p, rf_fraction: p };
            let a = compose_hybrid_rate(&tf, rv, rr);
            let b = compose_hybrid_rate(&sw, rr, rv);
            prop_assert!((a.vlc_bps - b.rf_bps).abs() <= 1e-9 * a.vlc_bps.max(1.0));
            prop_assert!((a.total_bps - b.total_bps).abs() <= 1e-9 * a.total_bps.max(1.0));
        }

        #[test]
        fn hybrid_rate_linear_in_each_component(
            p in 0.1f64..0.9,
            rv in 1e6f64..1e8,
            rr in 1e6f64..1e8,
            f in 0.1f64..3.0,
        ) {
            let tf = TimeFractionCase { vlc_fraction: p, rf_fraction: 1.0 - p };
            let base = compose_hybrid_rate(&tf, rv, rr);
            let scaled = compose_hybrid_rate(&tf, rv * f, rr);
            prop_assert!((scaled.vlc_bps - base.vlc_bps * f).abs() <= 1e-9 * scaled.vlc_bps.max(1.0));
            prop_assert!((scaled.rf_bps - base.rf_bps).abs() <= 1e-9 * scaled.rf_bps.max(1.0));
        }
    }
}
