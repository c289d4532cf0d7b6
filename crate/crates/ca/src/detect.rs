//! Threshold pattern detection, one state machine per process variable.
//!
//! A pattern opens on the 3rd consecutive sample above 70 and closes after 3
//! consecutive samples at or below 70. While a pattern is open, an upward
//! move across the 80 or 130 boundary emits a range-transition event; the
//! pattern remembers the highest range seen, so oscillation below it stays
//! silent.

use std::collections::BTreeMap;

use crate::CaError;

pub const OPEN_THRESHOLD: f64 = 70.0;
const CONSECUTIVE: u8 = 3;

/// Severity ranges partitioning [70, ∞): [70,80), [80,130), [130,∞).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeverityRange {
    R70to80,
    R80to130,
    R130plus,
}

impl SeverityRange {
    /// Range of a value, `None` below 70.
    pub fn of(value: f64) -> Option<SeverityRange> {
        if value >= 130.0 {
            Some(SeverityRange::R130plus)
        } else if value >= 80.0 {
            Some(SeverityRange::R80to130)
        } else if value >= 70.0 {
            Some(SeverityRange::R70to80)
        } else {
            None
        }
    }

    /// The literal constant recorded on the observation's `isAt` property.
    pub fn constant(&self) -> &'static str {
        match self {
            SeverityRange::R70to80 => "_70to80",
            SeverityRange::R80to130 => "_80to130",
            SeverityRange::R130plus => "_130degrees",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Opening,
    RangeTransition,
}

/// One process-variable sample; per-variable timestamps must strictly
/// increase (the nominal stream is 1 Hz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub variable: u32,
    pub t: u64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationEvent {
    pub variable: u32,
    pub t: u64,
    pub value: f64,
    pub range: SeverityRange,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Default)]
struct VarState {
    last_t: Option<u64>,
    consecutive_above: u8,
    consecutive_below: u8,
    active: Option<SeverityRange>,
}

/// Detector states for all process variables.
#[derive(Debug, Clone, Default)]
pub struct DetectorState {
    vars: BTreeMap<u32, VarState>,
}

impl DetectorState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feed one sample; at most one event comes out per sample.
    pub fn feed(&mut self, s: &Sample) -> Result<Option<ObservationEvent>, CaError> {
        let st = self.vars.entry(s.variable).or_default();
        if let Some(last) = st.last_t {
            if s.t <= last {
                return Err(CaError::OutOfOrderSample { variable: s.variable, t: s.t, last });
            }
        }
        st.last_t = Some(s.t);

        match st.active {
            None => {
                if s.value > OPEN_THRESHOLD {
                    st.consecutive_above += 1;
                    if st.consecutive_above >= CONSECUTIVE {
                        st.consecutive_above = 0;
                        let range = SeverityRange::of(s.value).expect("value above 70");
                        st.active = Some(range);
                        return Ok(Some(ObservationEvent {
                            variable: s.variable,
                            t: s.t,
                            value: s.value,
                            range,
                            kind: EventKind::Opening,
                        }));
                    }
                } else {
                    st.consecutive_above = 0;
                }
                Ok(None)
            }
            Some(current) => {
                if s.value > OPEN_THRESHOLD {
                    st.consecutive_below = 0;
                    let range = SeverityRange::of(s.value).expect("value above 70");
                    if range > current {
                        st.active = Some(range);
                        return Ok(Some(ObservationEvent {
                            variable: s.variable,
                            t: s.t,
                            value: s.value,
                            range,
                            kind: EventKind::RangeTransition,
                        }));
                    }
                } else {
                    st.consecutive_below += 1;
                    if st.consecutive_below >= CONSECUTIVE {
                        st.active = None;
                        st.consecutive_below = 0;
                        st.consecutive_above = 0;
                    }
                }
                Ok(None)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feed_series(values: &[f64]) -> Vec<ObservationEvent> {
        let mut st = DetectorState::new();
        let mut out = Vec::new();
        for (i, v) in values.iter().enumerate() {
            if let Some(e) = st.feed(&Sample { variable: 1, t: i as u64, value: *v }).unwrap() {
                out.push(e);
            }
        }
        out
    }

    #[test]
    fn opens_on_third_consecutive_sample_above_70() {
        let events = feed_series(&[69.0, 71.0, 72.0, 73.0]);
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].t, 3);
        assert_eq!(events[0].kind, EventKind::Opening);
        assert_eq!(events[0].range, SeverityRange::R70to80);
    }

    #[test]
    fn counter_resets_on_dip() {
        let events = feed_series(&[71.0, 72.0, 69.0, 71.0, 72.0]);
        assert!(events.is_empty());
    }

    #[test]
    fn transitions_climb_to_130_plus() {
        let events = feed_series(&[71.0, 71.0, 71.0, 85.0, 135.0]);
        assert_eq!(events.len(), 3);
        assert_eq!(events[0].kind, EventKind::Opening);
        assert_eq!(events[1].range, SeverityRange::R80to130);
        assert_eq!(events[2].range, SeverityRange::R130plus);
        assert!(matches!(events[1].kind, EventKind::RangeTransition));
    }

    #[test]
    fn no_transition_when_falling_back_within_pattern() {
        // Highest range seen is remembered; dropping to a lower band and
        // climbing back is silent.
        let events = feed_series(&[85.0, 85.0, 85.0, 75.0, 85.0]);
        assert_eq!(events.len(), 1);
    }

    #[test]
    fn closes_after_three_samples_at_or_below_70() {
        let events =
            feed_series(&[75.0, 75.0, 75.0, 60.0, 60.0, 60.0, 75.0, 75.0, 75.0]);
        assert_eq!(events.len(), 2);
        assert!(events.iter().all(|e| e.kind == EventKind::Opening));
    }

    #[test]
    fn boundary_values() {
        assert_eq!(SeverityRange::of(69.9), None);
        assert_eq!(SeverityRange::of(70.0), Some(SeverityRange::R70to80));
        assert_eq!(SeverityRange::of(80.0), Some(SeverityRange::R80to130));
        assert_eq!(SeverityRange::of(129.999), Some(SeverityRange::R80to130));
        assert_eq!(SeverityRange::of(130.0), Some(SeverityRange::R130plus));
    }

    #[test]
    fn out_of_order_sample_rejected() {
        let mut st = DetectorState::new();
        st.feed(&Sample { variable: 1, t: 5, value: 50.0 }).unwrap();
        let err = st.feed(&Sample { variable: 1, t: 5, value: 50.0 }).unwrap_err();
        assert!(matches!(err, CaError::OutOfOrderSample { variable: 1, .. }));
        // Other variables are unaffected.
        assert!(st.feed(&Sample { variable: 2, t: 0, value: 50.0 }).is_ok());
    }
}
