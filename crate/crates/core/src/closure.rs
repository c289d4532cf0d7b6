//! Reflexive-transitive taxonomy closure over class expressions and roles.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::model::{Axiom, ClassExpr, Ontology};

/// An object property read forward or backward.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Role {
    pub prop: String,
    pub inverse: bool,
}

impl Role {
    pub fn fwd(prop: &str) -> Self {
        Role { prop: prop.to_string(), inverse: false }
    }

    pub fn inv(prop: &str) -> Self {
        Role { prop: prop.to_string(), inverse: true }
    }

    pub fn flipped(&self) -> Self {
        Role { prop: self.prop.clone(), inverse: !self.inverse }
    }

    fn as_expr(&self) -> ClassExpr {
        if self.inverse {
            ClassExpr::ExistsInv(self.prop.clone())
        } else {
            ClassExpr::Exists(self.prop.clone())
        }
    }
}

/// Subsumption closure: for every node, the set of its subsumers (including
/// itself). Entailments through `Domain`/`Range`/`InverseOf` are folded in,
/// e.g. `Domain(p, C)` contributes `Exists(p) ⊑ C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyClosure {
    pub class_supers: BTreeMap<ClassExpr, BTreeSet<ClassExpr>>,
    pub role_supers: BTreeMap<Role, BTreeSet<Role>>,
    pub data_prop_supers: BTreeMap<String, BTreeSet<String>>,
}

impl TaxonomyClosure {
    /// Named superclasses of a named class, including itself.
    pub fn named_supers(&self, class: &str) -> BTreeSet<String> {
        self.supers_of_expr(&ClassExpr::Named(class.to_string()))
    }

    /// Named subsumers of an arbitrary class expression.
    pub fn supers_of_expr(&self, e: &ClassExpr) -> BTreeSet<String> {
        self.class_supers
            .get(e)
            .into_iter()
            .flatten()
            .filter_map(|s| match s {
                ClassExpr::Named(n) => Some(n.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn is_subclass(&self, sub: &ClassExpr, sup: &ClassExpr) -> bool {
        self.class_supers.get(sub).is_some_and(|s| s.contains(sup))
    }

    /// Named subclasses of a named class, including itself.
    pub fn named_subs(&self, class: &str) -> BTreeSet<String> {
        let target = ClassExpr::Named(class.to_string());
        self.class_supers
            .iter()
            .filter(|(k, v)| matches!(k, ClassExpr::Named(_)) && v.contains(&target))
            .filter_map(|(k, _)| match k {
                ClassExpr::Named(n) => Some(n.clone()),
                _ => None,
            })
            .collect()
    }

    /// Named subclasses of `class` that have no further named subclass.
    pub fn leaf_subs(&self, class: &str) -> BTreeSet<String> {
        let subs = self.named_subs(class);
        subs.iter()
            .filter(|c| {
                let below = self.named_subs(c);
                below.iter().all(|d| d == *c)
            })
            .cloned()
            .collect()
    }

    pub fn role_supers_of(&self, r: &Role) -> BTreeSet<Role> {
        self.role_supers.get(r).cloned().unwrap_or_default()
    }
}

fn reachability<N: Ord + Clone>(
    nodes: &BTreeSet<N>,
    edges: &BTreeMap<N, BTreeSet<N>>,
) -> BTreeMap<N, BTreeSet<N>> {
    let mut out = BTreeMap::new();
    for start in nodes {
        let mut seen: BTreeSet<N> = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start.clone());
        while let Some(n) = queue.pop_front() {
            if let Some(next) = edges.get(&n) {
                for m in next {
                    if seen.insert(m.clone()) {
                        queue.push_back(m.clone());
                    }
                }
            }
        }
        out.insert(start.clone(), seen);
    }
    out
}

fn add_edge<N: Ord + Clone>(edges: &mut BTreeMap<N, BTreeSet<N>>, from: N, to: N) {
    edges.entry(from).or_default().insert(to);
}

/// Compute the taxonomy closure of an ontology.
///
/// `ConditionalType` axioms contribute nothing here: the rule layer is not a
/// subsumption and is consumed only by saturation.
pub fn closure(o: &Ontology) -> TaxonomyClosure {
    // Role graph over object properties in both directions.
    let mut role_nodes: BTreeSet<Role> = BTreeSet::new();
    for p in &o.object_properties {
        role_nodes.insert(Role::fwd(p));
        role_nodes.insert(Role::inv(p));
    }
    let mut role_edges: BTreeMap<Role, BTreeSet<Role>> = BTreeMap::new();
    let mut data_edges: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for ax in &o.tbox {
        match ax {
            Axiom::SubPropertyOf(p, q) if o.is_object_property(p) => {
                add_edge(&mut role_edges, Role::fwd(p), Role::fwd(q));
                add_edge(&mut role_edges, Role::inv(p), Role::inv(q));
            }
            Axiom::SubPropertyOf(p, q) => {
                add_edge(&mut data_edges, p.clone(), q.clone());
            }
            Axiom::InverseOf(p, q) => {
                // p ≡ q⁻ in both directions.
                add_edge(&mut role_edges, Role::fwd(p), Role::inv(q));
                add_edge(&mut role_edges, Role::inv(q), Role::fwd(p));
                add_edge(&mut role_edges, Role::inv(p), Role::fwd(q));
                add_edge(&mut role_edges, Role::fwd(q), Role::inv(p));
            }
            _ => {}
        }
    }
    let role_supers = reachability(&role_nodes, &role_edges);
    let data_nodes: BTreeSet<String> = o.data_properties.iter().cloned().collect();
    let data_prop_supers = reachability(&data_nodes, &data_edges);

    // Class-expression graph.
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
    let mut edges: BTreeMap<ClassExpr, BTreeSet<ClassExpr>> = BTreeMap::new();
    for ax in &o.tbox {
        match ax {
            Axiom::SubClassOf(a, b) => add_edge(&mut edges, a.clone(), b.clone()),
            Axiom::Domain(p, c) => {
                add_edge(&mut edges, ClassExpr::Exists(p.clone()), ClassExpr::Named(c.clone()));
            }
            Axiom::Range(p, c) => {
                add_edge(&mut edges, ClassExpr::ExistsInv(p.clone()), ClassExpr::Named(c.clone()));
            }
            _ => {}
        }
    }
    // Role subsumption lifts to the existential restrictions.
    for (r, sups) in &role_supers {
        for s in sups {
            if r != s {
                add_edge(&mut edges, r.as_expr(), s.as_expr());
            }
        }
    }
    for (p, sups) in &data_prop_supers {
        for q in sups {
            if p != q {
                add_edge(&mut edges, ClassExpr::Exists(p.clone()), ClassExpr::Exists(q.clone()));
            }
        }
    }
    let class_supers = reachability(&nodes, &edges);

    TaxonomyClosure { class_supers, role_supers, data_prop_supers }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_ontology;

    fn named(n: &str) -> ClassExpr {
        ClassExpr::Named(n.into())
    }

    #[test]
    fn transitivity() {
        let o = parse_ontology("Class(A) Class(B) Class(C) SubClassOf(A B) SubClassOf(B C)")
            .unwrap();
        let cl = closure(&o);
        assert!(cl.is_subclass(&named("A"), &named("C")));
        assert!(!cl.is_subclass(&named("C"), &named("A")));
    }

    #[test]
    fn reflexivity_on_empty_tbox() {
        let o = parse_ontology("Class(X) Class(Y)").unwrap();
        let cl = closure(&o);
        for c in ["X", "Y"] {
            assert!(cl.is_subclass(&named(c), &named(c)));
        }
    }

    #[test]
    fn domain_contributes_existential_subsumption() {
        let o = parse_ontology("Class(Fault) ObjectProperty(hasSymptom) Domain(hasSymptom Fault)")
            .unwrap();
        let cl = closure(&o);
        assert!(cl.is_subclass(&ClassExpr::Exists("hasSymptom".into()), &named("Fault")));
    }

    #[test]
    fn inverse_links_existentials() {
        let src = "Class(C) ObjectProperty(p) ObjectProperty(q) InverseOf(p q) Range(q C)";
        let o = parse_ontology(src).unwrap();
        let cl = closure(&o);
        // q⁻ ⊑ C and p ≡ q⁻, so Exists(p) ⊑ C.
        assert!(cl.is_subclass(&ClassExpr::Exists("p".into()), &named("C")));
    }

    #[test]
    fn leaf_subclasses() {
        let src = "Class(Out) Class(AlarmEvent) Class(FaultEvent) Class(Special)\n\
                   SubClassOf(AlarmEvent Out) SubClassOf(FaultEvent Out)\n\
                   SubClassOf(Special AlarmEvent)";
        let o = parse_ontology(src).unwrap();
        let cl = closure(&o);
        let leaves = cl.leaf_subs("Out");
        assert_eq!(
            leaves.into_iter().collect::<Vec<_>>(),
            vec!["FaultEvent".to_string(), "Special".to_string()]
        );
    }
}
