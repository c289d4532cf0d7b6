//! Saturation-based classification of materialized individuals.

use std::collections::BTreeSet;

use ontomon_core::{closure, saturate_abox, ABoxAssertion, Axiom, Ontology};

use crate::materialize::AboxDelta;
use crate::CaError;

/// Classes a classification report projects onto.
const REPORT_CLASSES: &[&str] =
    &["PriorityFault", "NonPriorityFault", "MissionRelatedSymptom", "MaintenanceRelatedSymptom"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndividualKind {
    Symptom,
    Fault,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub individual: String,
    pub kind: IndividualKind,
    /// Most specific report classes the individual falls in.
    pub classes: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassificationResult {
    pub entries: Vec<Classification>,
}

impl ClassificationResult {
    /// Flatten to (individual, class) pairs in report order.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for e in &self.entries {
            for c in &e.classes {
                out.push((e.individual.clone(), c.clone()));
            }
        }
        out
    }
}

/// Classify the symptom and fault individuals of the given deltas against
/// the fixture ontology: saturate the working ABox, check disjointness, and
/// report each individual's most specific classes among the priority and
/// impact classes.
pub fn classify(deltas: &[AboxDelta], fixture: &Ontology) -> Result<ClassificationResult, CaError> {
    if deltas.is_empty() {
        return Ok(ClassificationResult::default());
    }
    let mut working = fixture.clone();
    for d in deltas {
        for ind in &d.individuals {
            if !working.is_individual(ind) {
                working.declare_individual(ind)?;
            }
        }
        for a in &d.assertions {
            // Observations may reference a process variable outside the
            // designated traction set; declare it on first sight.
            if let ABoxAssertion::Object(_, p, obj) = a {
                if p == "hasObservationData" && !working.is_individual(obj) {
                    working.declare_individual(obj)?;
                    working
                        .add_assertion(ABoxAssertion::Class(obj.clone(), "ObservationData".into()))?;
                }
            }
            working.add_assertion(a.clone())?;
        }
    }

    let saturated = saturate_abox(&working);

    // Disjointness check over the saturated memberships.
    let mut classes_of = std::collections::BTreeMap::<&str, BTreeSet<&str>>::new();
    for a in &saturated.abox {
        if let ABoxAssertion::Class(i, c) = a {
            classes_of.entry(i).or_default().insert(c);
        }
    }
    for ax in &saturated.tbox {
        if let Axiom::DisjointClasses(c1, c2) = ax {
            for (ind, cs) in &classes_of {
                if cs.contains(c1.as_str()) && cs.contains(c2.as_str()) {
                    return Err(CaError::InconsistentABox {
                        individual: (*ind).to_string(),
                        c1: c1.clone(),
                        c2: c2.clone(),
                    });
                }
            }
        }
    }

    let cl = closure(fixture);
    let most_specific = |ind: &str| -> BTreeSet<String> {
        let all: BTreeSet<&str> = classes_of.get(ind).cloned().unwrap_or_default();
        let reported: Vec<&str> =
            REPORT_CLASSES.iter().copied().filter(|c| all.contains(c)).collect();
        reported
            .iter()
            .filter(|c| {
                // Drop a class strictly above another reported one.
                !reported.iter().any(|d| d != *c && cl.named_supers(d).contains(**c))
            })
            .map(|c| c.to_string())
            .collect()
    };

    let mut entries = Vec::new();
    for d in deltas {
        entries.push(Classification {
            individual: d.symptom.clone(),
            kind: IndividualKind::Symptom,
            classes: most_specific(&d.symptom),
        });
        entries.push(Classification {
            individual: d.fault.clone(),
            kind: IndividualKind::Fault,
            classes: most_specific(&d.fault),
        });
    }
    Ok(ClassificationResult { entries })
}
