//! ABox saturation: the least fixpoint of subclass/subproperty propagation,
//! domain/range typing, inverse completion, and classification-rule firing
//! over the named individuals. No fresh individuals are ever invented;
//! existential superclasses are left to query-time rewriting.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::closure::{closure, Role};
use crate::model::{ABoxAssertion, Axiom, ClassExpr, Ontology};

#[derive(Debug, Default)]
struct Facts {
    /// individual -> named classes
    classes: BTreeMap<String, BTreeSet<String>>,
    /// (subject, property, object) over object properties
    objects: BTreeSet<(String, String, String)>,
    /// (subject, property, literal) over data properties
    data: BTreeSet<(String, String, String)>,
}

impl Facts {
    fn from_abox(abox: &[ABoxAssertion]) -> Self {
        let mut f = Facts::default();
        for a in abox {
            match a {
                ABoxAssertion::Class(i, c) => {
                    f.classes.entry(i.clone()).or_default().insert(c.clone());
                }
                ABoxAssertion::Object(s, p, o) => {
                    f.objects.insert((s.clone(), p.clone(), o.clone()));
                }
                ABoxAssertion::Data(s, p, v) => {
                    f.data.insert((s.clone(), p.clone(), v.clone()));
                }
            }
        }
        f
    }

    fn has_class(&self, ind: &str, class: &str) -> bool {
        self.classes.get(ind).is_some_and(|s| s.contains(class))
    }
}

/// Individuals reachable from each node over object-property assertions,
/// in assertion direction, including the node itself.
fn reachable_sets(objects: &BTreeSet<(String, String, String)>) -> BTreeMap<String, BTreeSet<String>> {
    let mut succ: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut nodes: BTreeSet<&str> = BTreeSet::new();
    for (s, _, o) in objects {
        succ.entry(s).or_default().insert(o);
        nodes.insert(s);
        nodes.insert(o);
    }
    let mut out = BTreeMap::new();
    for &start in &nodes {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start);
        queue.push_back(start);
        while let Some(n) = queue.pop_front() {
            if let Some(next) = succ.get(n) {
                for &m in next {
                    if seen.insert(m) {
                        queue.push_back(m);
                    }
                }
            }
        }
        out.insert(start.to_string(), seen.into_iter().map(String::from).collect());
    }
    out
}

/// Saturate the ABox of `o` and return the extended ontology.
///
/// Derived assertions are appended after the original ones in sorted order,
/// which makes the operation idempotent up to value equality.
pub fn saturate_abox(o: &Ontology) -> Ontology {
    let cl = closure(o);
    let mut facts = Facts::from_abox(&o.abox);

    // Role and data-property completion first: the pair set is closed under
    // subproperty and inverse subsumption and never grows afterwards, since
    // no rule below adds property assertions.
    let mut completed: BTreeSet<(String, String, String)> = BTreeSet::new();
    for (s, p, obj) in &facts.objects {
        for sup in cl.role_supers_of(&Role::fwd(p)) {
            if sup.inverse {
                completed.insert((obj.clone(), sup.prop, s.clone()));
            } else {
                completed.insert((s.clone(), sup.prop, obj.clone()));
            }
        }
    }
    facts.objects = completed;
    let mut data_completed: BTreeSet<(String, String, String)> = BTreeSet::new();
    for (s, p, v) in &facts.data {
        if let Some(sups) = cl.data_prop_supers.get(p) {
            for q in sups {
                data_completed.insert((s.clone(), q.clone(), v.clone()));
            }
        } else {
            data_completed.insert((s.clone(), p.clone(), v.clone()));
        }
    }
    facts.data = data_completed;

    let reach = reachable_sets(&facts.objects);
    let rules: Vec<(&String, &String, &String, &String)> = o
        .tbox
        .iter()
        .filter_map(|ax| match ax {
            Axiom::ConditionalType { body_class, prop, value, head_class } => {
                Some((body_class, prop, value, head_class))
            }
            _ => None,
        })
        .collect();

    // Class memberships to fixpoint: subsumption typing and rule firing feed
    // each other, so iterate until stable.
    loop {
        let mut new: Vec<(String, String)> = Vec::new();

        for (ind, classes) in &facts.classes {
            for c in classes {
                for sup in cl.named_supers(c) {
                    if !classes.contains(&sup) {
                        new.push((ind.clone(), sup));
                    }
                }
            }
        }
        for (s, p, obj) in &facts.objects {
            for c in cl.supers_of_expr(&ClassExpr::Exists(p.clone())) {
                if !facts.has_class(s, &c) {
                    new.push((s.clone(), c));
                }
            }
            for c in cl.supers_of_expr(&ClassExpr::ExistsInv(p.clone())) {
                if !facts.has_class(obj, &c) {
                    new.push((obj.clone(), c));
                }
            }
        }
        for (s, p, _) in &facts.data {
            for c in cl.supers_of_expr(&ClassExpr::Exists(p.clone())) {
                if !facts.has_class(s, &c) {
                    new.push((s.clone(), c));
                }
            }
        }
        // Classification rules: subjects of `body_class` reaching a carrier
        // of `prop = value` gain `head_class`.
        for (body, prop, value, head) in &rules {
            let carriers: Vec<&String> = facts
                .data
                .iter()
                .filter(|(_, p, v)| p == *prop && v == *value)
                .map(|(s, _, _)| s)
                .collect();
            if carriers.is_empty() {
                continue;
            }
            for (ind, classes) in &facts.classes {
                if !classes.contains(*body) || classes.contains(*head) {
                    continue;
                }
                let reaches = carriers.iter().any(|c| {
                    *c == ind
                        || reach.get(ind).is_some_and(|set| set.contains(c.as_str()))
                });
                if reaches {
                    new.push((ind.clone(), (*head).clone()));
                }
            }
        }

        if new.is_empty() {
            break;
        }
        for (ind, c) in new {
            facts.classes.entry(ind).or_default().insert(c);
        }
    }

    // Rebuild the ABox: originals in order, then derived facts sorted.
    let original: BTreeSet<ABoxAssertion> = o.abox.iter().cloned().collect();
    let mut derived: BTreeSet<ABoxAssertion> = BTreeSet::new();
    for (ind, classes) in &facts.classes {
        for c in classes {
            derived.insert(ABoxAssertion::Class(ind.clone(), c.clone()));
        }
    }
    for (s, p, obj) in &facts.objects {
        derived.insert(ABoxAssertion::Object(s.clone(), p.clone(), obj.clone()));
    }
    for (s, p, v) in &facts.data {
        derived.insert(ABoxAssertion::Data(s.clone(), p.clone(), v.clone()));
    }
    let mut abox = o.abox.clone();
    for a in derived {
        if !original.contains(&a) {
            abox.push(a);
        }
    }
    Ontology { abox, ..o.clone() }
}

/// An ontology is consistent unless some `DisjointClasses(c, d)` pair has a
/// common instance after saturation.
pub fn check_consistency(o: &Ontology) -> bool {
    let saturated = saturate_abox(o);
    let facts = Facts::from_abox(&saturated.abox);
    for ax in &o.tbox {
        if let Axiom::DisjointClasses(c, d) = ax {
            for classes in facts.classes.values() {
                if classes.contains(c) && classes.contains(d) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_ontology;

    const TRACTION_MINI: &str = "\
        Class(Observation) Class(Symptom)\n\
        Class(TractionHighTemperatureObservation)\n\
        Class(TractionTotalMissionImpactSymptom) Class(MissionRelatedSymptom)\n\
        SubClassOf(TractionHighTemperatureObservation Observation)\n\
        SubClassOf(TractionTotalMissionImpactSymptom MissionRelatedSymptom)\n\
        SubClassOf(MissionRelatedSymptom Symptom)\n\
        ObjectProperty(refersToObservation)\n\
        Domain(refersToObservation Symptom) Range(refersToObservation Observation)\n\
        DataProperty(isAt)\n\
        ConditionalType(Symptom isAt \"_130degrees\" TractionTotalMissionImpactSymptom)\n\
        Individual(i) Individual(s)\n\
        ClassAssertion(i TractionHighTemperatureObservation)\n\
        DataAssertion(i isAt \"_130degrees\")\n\
        ObjectAssertion(s refersToObservation i)\n";

    #[test]
    fn classification_rule_types_the_referring_symptom() {
        let o = parse_ontology(TRACTION_MINI).unwrap();
        let s = saturate_abox(&o);
        let has = |c: &str| {
            s.abox.contains(&ABoxAssertion::Class("s".into(), c.into()))
        };
        assert!(has("Symptom"), "domain typing should fire first");
        assert!(has("TractionTotalMissionImpactSymptom"));
        assert!(has("MissionRelatedSymptom"));
        // The observation itself is not a symptom.
        assert!(!s.abox.contains(&ABoxAssertion::Class(
            "i".into(),
            "TractionTotalMissionImpactSymptom".into()
        )));
    }

    #[test]
    fn empty_abox_unchanged() {
        let o = parse_ontology("Class(A) Class(B) SubClassOf(A B)").unwrap();
        assert_eq!(saturate_abox(&o), o);
    }

    #[test]
    fn idempotent() {
        let o = parse_ontology(TRACTION_MINI).unwrap();
        let once = saturate_abox(&o);
        let twice = saturate_abox(&once);
        assert_eq!(once, twice);
    }

    #[test]
    fn inverse_completion() {
        let src = "ObjectProperty(p) ObjectProperty(q) InverseOf(p q)\n\
                   Individual(a) Individual(b) ObjectAssertion(a p b)";
        let o = parse_ontology(src).unwrap();
        let s = saturate_abox(&o);
        assert!(s.abox.contains(&ABoxAssertion::Object("b".into(), "q".into(), "a".into())));
    }

    #[test]
    fn disjointness_violation_detected() {
        let src = "Class(Fault) Class(PriorityFault) Class(NonPriorityFault)\n\
                   SubClassOf(PriorityFault Fault) SubClassOf(NonPriorityFault Fault)\n\
                   DisjointClasses(PriorityFault NonPriorityFault)\n\
                   Individual(f)\n\
                   ClassAssertion(f PriorityFault) ClassAssertion(f NonPriorityFault)";
        let o = parse_ontology(src).unwrap();
        assert!(!check_consistency(&o));
    }

    #[test]
    fn no_disjointness_means_consistent() {
        let src = "Class(A) Class(B) Individual(x)\n\
                   ClassAssertion(x A) ClassAssertion(x B)";
        let o = parse_ontology(src).unwrap();
        assert!(check_consistency(&o));
    }

    #[test]
    fn disjointness_violation_via_saturation() {
        // The common instance only appears after subclass propagation.
        let src = "Class(A) Class(B) Class(SubA)\n\
                   SubClassOf(SubA A) DisjointClasses(A B)\n\
                   Individual(x) ClassAssertion(x SubA) ClassAssertion(x B)";
        let o = parse_ontology(src).unwrap();
        assert!(!check_consistency(&o));
    }
}
