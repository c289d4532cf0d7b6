//! Individual materialization for detected observations.
//!
//! Each event yields three generic individuals — observation, symptom,
//! fault — wired with the properties the ontology requires, leaving their
//! classification to saturation. The observation links to the monitored
//! process-variable individual and records its severity range on `isAt`.

use ontomon_core::ABoxAssertion;

use crate::detect::ObservationEvent;
use crate::scenario::TRACTION_VARIABLES;

/// A monotone ABox extension produced from one observation event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AboxDelta {
    /// Fresh individuals introduced by this delta.
    pub individuals: Vec<String>,
    pub assertions: Vec<ABoxAssertion>,
    pub observation: String,
    pub symptom: String,
    pub fault: String,
}

/// The process-variable individual an observation refers to. The designated
/// traction temperatures map onto the fixture's individuals; any other
/// variable gets a plain per-variable one.
pub(crate) fn variable_individual(variable: u32) -> (String, &'static str) {
    if let Some(pos) = TRACTION_VARIABLES.iter().position(|v| *v == variable) {
        (format!("tractionTemp{}", pos + 1), "TractionObservationData")
    } else {
        (format!("processVar{variable}"), "ObservationData")
    }
}

pub fn materialize(event: &ObservationEvent) -> AboxDelta {
    let suffix = format!("v{}_t{}", event.variable, event.t);
    let obs = format!("obs_{suffix}");
    let sym = format!("sym_{suffix}");
    let flt = format!("flt_{suffix}");
    let (var_ind, _) = variable_individual(event.variable);

    let assertions = vec![
        ABoxAssertion::Class(obs.clone(), "TractionHighTemperatureObservation".into()),
        ABoxAssertion::Object(obs.clone(), "hasObservationData".into(), var_ind),
        ABoxAssertion::Data(obs.clone(), "isAt".into(), event.range.constant().into()),
        ABoxAssertion::Class(sym.clone(), "Symptom".into()),
        ABoxAssertion::Object(sym.clone(), "refersToObservation".into(), obs.clone()),
        ABoxAssertion::Object(sym.clone(), "refersToFault".into(), flt.clone()),
        ABoxAssertion::Class(flt.clone(), "Fault".into()),
        ABoxAssertion::Object(flt.clone(), "causedBySymptom".into(), sym.clone()),
        ABoxAssertion::Object(flt.clone(), "hasSymptom".into(), sym.clone()),
    ];
    AboxDelta {
        individuals: vec![obs.clone(), sym.clone(), flt.clone()],
        assertions,
        observation: obs,
        symptom: sym,
        fault: flt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::{EventKind, SeverityRange};

    fn event(variable: u32, t: u64, range: SeverityRange) -> ObservationEvent {
        ObservationEvent { variable, t, value: 135.0, range, kind: EventKind::Opening }
    }

    #[test]
    fn three_fresh_individuals_and_the_range_constant() {
        let d = materialize(&event(1, 42, SeverityRange::R130plus));
        assert_eq!(d.individuals.len(), 3);
        assert!(d.assertions.contains(&ABoxAssertion::Data(
            d.observation.clone(),
            "isAt".into(),
            "_130degrees".into()
        )));
        assert!(d.assertions.contains(&ABoxAssertion::Object(
            d.symptom.clone(),
            "refersToObservation".into(),
            d.observation.clone()
        )));
        assert!(d.assertions.contains(&ABoxAssertion::Object(
            d.fault.clone(),
            "causedBySymptom".into(),
            d.symptom.clone()
        )));
    }

    #[test]
    fn concurrent_events_on_distinct_variables_are_disjoint() {
        let d1 = materialize(&event(1, 10, SeverityRange::R70to80));
        let d2 = materialize(&event(2, 10, SeverityRange::R70to80));
        for i in &d1.individuals {
            assert!(!d2.individuals.contains(i));
        }
    }

    #[test]
    fn deltas_append_monotonically() {
        let d1 = materialize(&event(1, 10, SeverityRange::R70to80));
        let d2 = materialize(&event(1, 30, SeverityRange::R80to130));
        let mut combined = d1.assertions.clone();
        combined.extend(d2.assertions.clone());
        // The first delta's assertions survive untouched at the front.
        assert_eq!(&combined[..d1.assertions.len()], &d1.assertions[..]);
    }
}
