//! Naive reference oracles: literal rule application to fixpoint.

use std::collections::{BTreeMap, BTreeSet};

use ontomon_core::{ABoxAssertion, Axiom, ClassExpr, Ontology};

/// All subsumption pairs `(sub, super)` over class expressions, computed by
/// seeding direct pairs from each axiom and composing pairwise until the set
/// stops growing.
pub fn closure_pairs_fixpoint(o: &Ontology) -> BTreeSet<(ClassExpr, ClassExpr)> {
    let mut nodes: BTreeSet<ClassExpr> = BTreeSet::new();
    for c in &o.classes {
        nodes.insert(ClassExpr::Named(c.clone()));
    }
    for p in &o.object_properties {
        nodes.insert(ClassExpr::Exists(p.clone()));
        nodes.insert(ClassExpr::ExistsInv(p.clone()));
    }
    for p in &o.data_properties {
        nodes.insert(ClassExpr::Exists(p.clone()));
    }
    let mut pairs: BTreeSet<(ClassExpr, ClassExpr)> = BTreeSet::new();
    for n in &nodes {
        pairs.insert((n.clone(), n.clone()));
    }
    for ax in &o.tbox {
        match ax {
            Axiom::SubClassOf(a, b) => {
                pairs.insert((a.clone(), b.clone()));
            }
            Axiom::Domain(p, c) => {
                pairs.insert((ClassExpr::Exists(p.clone()), ClassExpr::Named(c.clone())));
            }
            Axiom::Range(p, c) => {
                pairs.insert((ClassExpr::ExistsInv(p.clone()), ClassExpr::Named(c.clone())));
            }
            Axiom::SubPropertyOf(p, q) if o.is_object_property(p) => {
                pairs.insert((ClassExpr::Exists(p.clone()), ClassExpr::Exists(q.clone())));
                pairs.insert((ClassExpr::ExistsInv(p.clone()), ClassExpr::ExistsInv(q.clone())));
            }
            Axiom::SubPropertyOf(p, q) => {
                pairs.insert((ClassExpr::Exists(p.clone()), ClassExpr::Exists(q.clone())));
            }
            Axiom::InverseOf(p, q) => {
                // p ≡ q⁻: the four existential identifications.
                for (a, b) in [
                    (ClassExpr::Exists(p.clone()), ClassExpr::ExistsInv(q.clone())),
                    (ClassExpr::ExistsInv(q.clone()), ClassExpr::Exists(p.clone())),
                    (ClassExpr::ExistsInv(p.clone()), ClassExpr::Exists(q.clone())),
                    (ClassExpr::Exists(q.clone()), ClassExpr::ExistsInv(p.clone())),
                ] {
                    pairs.insert((a, b));
                }
            }
            _ => {}
        }
    }
    loop {
        let mut new = Vec::new();
        for (a, b) in &pairs {
            for (c, d) in &pairs {
                if b == c && !pairs.contains(&(a.clone(), d.clone())) {
                    new.push((a.clone(), d.clone()));
                }
            }
        }
        if new.is_empty() {
            break;
        }
        pairs.extend(new);
    }
    pairs
}

/// Reachability pairs over object assertions by repeated composition.
fn reach_pairs(objects: &BTreeSet<(String, String, String)>) -> BTreeSet<(String, String)> {
    let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
    for (s, _, o) in objects {
        pairs.insert((s.clone(), s.clone()));
        pairs.insert((o.clone(), o.clone()));
        pairs.insert((s.clone(), o.clone()));
    }
    loop {
        let mut new = Vec::new();
        for (a, b) in &pairs {
            for (c, d) in &pairs {
                if b == c && !pairs.contains(&(a.clone(), d.clone())) {
                    new.push((a.clone(), d.clone()));
                }
            }
        }
        if new.is_empty() {
            break;
        }
        pairs.extend(new);
    }
    pairs
}

/// Saturated ABox as a set, by one-step rule application to fixpoint.
///
/// The state tracks per-individual memberships over class *expressions*, so
/// virtual chains like `A ⊑ ∃p`, `∃p ⊑ C` type an individual with `C` even
/// when no `p` assertion exists. Only named memberships are emitted.
pub fn saturate_fixpoint(o: &Ontology) -> BTreeSet<ABoxAssertion> {
    let mut mem: BTreeMap<String, BTreeSet<ClassExpr>> = BTreeMap::new();
    let mut objects: BTreeSet<(String, String, String)> = BTreeSet::new();
    let mut data: BTreeSet<(String, String, String)> = BTreeSet::new();
    for a in &o.abox {
        match a {
            ABoxAssertion::Class(i, c) => {
                mem.entry(i.clone()).or_default().insert(ClassExpr::Named(c.clone()));
            }
            ABoxAssertion::Object(s, p, obj) => {
                objects.insert((s.clone(), p.clone(), obj.clone()));
            }
            ABoxAssertion::Data(s, p, v) => {
                data.insert((s.clone(), p.clone(), v.clone()));
            }
        }
    }

    let mut changed = true;
    while changed {
        changed = false;

        // Witnessed existentials.
        let mut new_mem: Vec<(String, ClassExpr)> = Vec::new();
        for (s, p, obj) in &objects {
            new_mem.push((s.clone(), ClassExpr::Exists(p.clone())));
            new_mem.push((obj.clone(), ClassExpr::ExistsInv(p.clone())));
        }
        for (s, p, _) in &data {
            new_mem.push((s.clone(), ClassExpr::Exists(p.clone())));
        }

        let mut new_objects: Vec<(String, String, String)> = Vec::new();
        let mut new_data: Vec<(String, String, String)> = Vec::new();
        for ax in &o.tbox {
            match ax {
                Axiom::SubClassOf(sub, sup) => {
                    for (ind, exprs) in &mem {
                        if exprs.contains(sub) {
                            new_mem.push((ind.clone(), sup.clone()));
                        }
                    }
                }
                Axiom::Domain(p, c) => {
                    for (ind, exprs) in &mem {
                        if exprs.contains(&ClassExpr::Exists(p.clone())) {
                            new_mem.push((ind.clone(), ClassExpr::Named(c.clone())));
                        }
                    }
                }
                Axiom::Range(p, c) => {
                    for (ind, exprs) in &mem {
                        if exprs.contains(&ClassExpr::ExistsInv(p.clone())) {
                            new_mem.push((ind.clone(), ClassExpr::Named(c.clone())));
                        }
                    }
                }
                Axiom::SubPropertyOf(p, q) if o.is_object_property(p) => {
                    for (s, pp, obj) in &objects {
                        if pp == p {
                            new_objects.push((s.clone(), q.clone(), obj.clone()));
                        }
                    }
                    for (ind, exprs) in &mem {
                        if exprs.contains(&ClassExpr::Exists(p.clone())) {
                            new_mem.push((ind.clone(), ClassExpr::Exists(q.clone())));
                        }
                        if exprs.contains(&ClassExpr::ExistsInv(p.clone())) {
                            new_mem.push((ind.clone(), ClassExpr::ExistsInv(q.clone())));
                        }
                    }
                }
                Axiom::SubPropertyOf(p, q) => {
                    for (s, pp, v) in &data {
                        if pp == p {
                            new_data.push((s.clone(), q.clone(), v.clone()));
                        }
                    }
                    for (ind, exprs) in &mem {
                        if exprs.contains(&ClassExpr::Exists(p.clone())) {
                            new_mem.push((ind.clone(), ClassExpr::Exists(q.clone())));
                        }
                    }
                }
                Axiom::InverseOf(p, q) => {
                    for (s, pp, obj) in &objects {
                        if pp == p {
                            new_objects.push((obj.clone(), q.clone(), s.clone()));
                        }
                        if pp == q {
                            new_objects.push((obj.clone(), p.clone(), s.clone()));
                        }
                    }
                    for (ind, exprs) in &mem {
                        for (from, to) in [
                            (ClassExpr::Exists(p.clone()), ClassExpr::ExistsInv(q.clone())),
                            (ClassExpr::ExistsInv(q.clone()), ClassExpr::Exists(p.clone())),
                            (ClassExpr::ExistsInv(p.clone()), ClassExpr::Exists(q.clone())),
                            (ClassExpr::Exists(q.clone()), ClassExpr::ExistsInv(p.clone())),
                        ] {
                            if exprs.contains(&from) {
                                new_mem.push((ind.clone(), to));
                            }
                        }
                    }
                }
                Axiom::DisjointClasses(..) => {}
                Axiom::ConditionalType { body_class, prop, value, head_class } => {
                    let reach = reach_pairs(&objects);
                    let carriers: BTreeSet<&String> = data
                        .iter()
                        .filter_map(|(s, p, v)| (p == prop && v == value).then_some(s))
                        .collect();
                    for (ind, exprs) in &mem {
                        if !exprs.contains(&ClassExpr::Named(body_class.clone())) {
                            continue;
                        }
                        let hit = carriers
                            .iter()
                            .any(|c| *c == ind || reach.contains(&(ind.clone(), (*c).clone())));
                        if hit {
                            new_mem.push((ind.clone(), ClassExpr::Named(head_class.clone())));
                        }
                    }
                }
            }
        }

        for (ind, e) in new_mem {
            if mem.entry(ind).or_default().insert(e) {
                changed = true;
            }
        }
        for t in new_objects {
            if objects.insert(t) {
                changed = true;
            }
        }
        for t in new_data {
            if data.insert(t) {
                changed = true;
            }
        }
    }

    let mut out: BTreeSet<ABoxAssertion> = BTreeSet::new();
    for (ind, exprs) in &mem {
        for e in exprs {
            if let ClassExpr::Named(c) = e {
                out.insert(ABoxAssertion::Class(ind.clone(), c.clone()));
            }
        }
    }
    for (s, p, obj) in &objects {
        out.insert(ABoxAssertion::Object(s.clone(), p.clone(), obj.clone()));
    }
    for (s, p, v) in &data {
        out.insert(ABoxAssertion::Data(s.clone(), p.clone(), v.clone()));
    }
    out
}
