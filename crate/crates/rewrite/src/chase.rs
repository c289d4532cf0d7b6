//! Ground-truth certain answers by chasing the ABox.
//!
//! The chase materializes entailed facts with labeled nulls standing in for
//! the unqualified existentials, restricted (a witness is only invented when
//! none exists) and depth-bounded at `|q.atoms| + 1`, which is enough for
//! conjunctive-query matching in this fragment: a match can descend at most
//! one fresh null per atom. The query is then evaluated by backtracking
//! subgraph matching and tuples carrying nulls in the head are discarded.
//!
//! This path deliberately works straight off the axioms and shares no code
//! with the rewriting pipeline it serves as an oracle for.
//! `ConditionalType` rules are outside certain-answer semantics and are
//! ignored here, mirroring their exclusion from rewriting.

use std::collections::{BTreeMap, BTreeSet};

use ontomon_core::{ABoxAssertion, Axiom, ClassExpr, Ontology};
use ontomon_store::ResultSet;

use crate::cq::{Atom, ConjunctiveQuery, Term};
use crate::RewriteError;

const MAX_ABOX: usize = 10_000;

/// A named individual, a literal, or a labeled null.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Node {
    Named(String),
    Null(u64),
}

/// Pair set indexed both ways: subject -> objects and object -> subjects.
#[derive(Debug, Default)]
struct PairSet {
    fwd: BTreeMap<Node, BTreeSet<Node>>,
    rev: BTreeMap<Node, BTreeSet<Node>>,
}

impl PairSet {
    fn insert(&mut self, s: Node, o: Node) -> bool {
        let added = self.fwd.entry(s.clone()).or_default().insert(o.clone());
        if added {
            self.rev.entry(o).or_default().insert(s);
        }
        added
    }

    fn iter_pairs(&self) -> impl Iterator<Item = (&Node, &Node)> {
        self.fwd.iter().flat_map(|(s, os)| os.iter().map(move |o| (s, o)))
    }

    fn subjects(&self) -> impl Iterator<Item = &Node> {
        self.fwd.keys()
    }

    fn objects(&self) -> impl Iterator<Item = &Node> {
        self.rev.keys()
    }

    fn has_subject(&self, n: &Node) -> bool {
        self.fwd.contains_key(n)
    }

    fn has_object(&self, n: &Node) -> bool {
        self.rev.contains_key(n)
    }
}

#[derive(Debug, Default)]
struct ChaseState {
    /// class -> members
    classes: BTreeMap<String, BTreeSet<Node>>,
    /// object property -> indexed pairs
    objects: BTreeMap<String, PairSet>,
    /// data property -> indexed (subject, value) pairs; values can be nulls
    data: BTreeMap<String, PairSet>,
    depth: BTreeMap<u64, usize>,
    next_null: u64,
}

impl ChaseState {
    fn node_depth(&self, n: &Node) -> usize {
        match n {
            Node::Named(_) => 0,
            Node::Null(id) => self.depth.get(id).copied().unwrap_or(0),
        }
    }

    fn fresh(&mut self, parent_depth: usize) -> Node {
        let id = self.next_null;
        self.next_null += 1;
        self.depth.insert(id, parent_depth + 1);
        Node::Null(id)
    }

    fn pairs(&self, prop: &str, data: bool) -> Option<&PairSet> {
        if data {
            self.data.get(prop)
        } else {
            self.objects.get(prop)
        }
    }

    fn has_successor(&self, prop: &str, n: &Node, data: bool) -> bool {
        self.pairs(prop, data).is_some_and(|set| set.has_subject(n))
    }

    fn has_predecessor(&self, prop: &str, n: &Node) -> bool {
        self.objects.get(prop).is_some_and(|set| set.has_object(n))
    }

    /// Nodes belonging to a class expression right now.
    fn members(&self, e: &ClassExpr, is_data_prop: impl Fn(&str) -> bool) -> Vec<Node> {
        match e {
            ClassExpr::Named(c) => {
                self.classes.get(c).map(|s| s.iter().cloned().collect()).unwrap_or_default()
            }
            ClassExpr::Exists(p) => self
                .pairs(p, is_data_prop(p))
                .map(|set| set.subjects().cloned().collect())
                .unwrap_or_default(),
            ClassExpr::ExistsInv(p) => self
                .objects
                .get(p)
                .map(|set| set.objects().cloned().collect())
                .unwrap_or_default(),
        }
    }
}

fn run_chase(o: &Ontology, max_depth: usize) -> ChaseState {
    let mut st = ChaseState::default();
    for a in &o.abox {
        match a {
            ABoxAssertion::Class(i, c) => {
                st.classes.entry(c.clone()).or_default().insert(Node::Named(i.clone()));
            }
            ABoxAssertion::Object(s, p, obj) => {
                st.objects
                    .entry(p.clone())
                    .or_default()
                    .insert(Node::Named(s.clone()), Node::Named(obj.clone()));
            }
            ABoxAssertion::Data(s, p, v) => {
                st.data
                    .entry(p.clone())
                    .or_default()
                    .insert(Node::Named(s.clone()), Node::Named(v.clone()));
            }
        }
    }

    let is_data = |p: &str| o.is_data_property(p);
    loop {
        let mut changed = false;
        for ax in &o.tbox {
            match ax {
                Axiom::SubClassOf(sub, sup) => {
                    for n in st.members(sub, is_data) {
                        match sup {
                            ClassExpr::Named(c) => {
                                changed |= st.classes.entry(c.clone()).or_default().insert(n);
                            }
                            ClassExpr::Exists(p) => {
                                let data = is_data(p);
                                if !st.has_successor(p, &n, data)
                                    && st.node_depth(&n) < max_depth
                                {
                                    let d = st.node_depth(&n);
                                    let w = st.fresh(d);
                                    if data {
                                        st.data.entry(p.clone()).or_default().insert(n, w);
                                    } else {
                                        st.objects.entry(p.clone()).or_default().insert(n, w);
                                    }
                                    changed = true;
                                }
                            }
                            ClassExpr::ExistsInv(p) => {
                                if !st.has_predecessor(p, &n) && st.node_depth(&n) < max_depth {
                                    let d = st.node_depth(&n);
                                    let w = st.fresh(d);
                                    st.objects.entry(p.clone()).or_default().insert(w, n);
                                    changed = true;
                                }
                            }
                        }
                    }
                }
                Axiom::Domain(p, c) => {
                    for n in st.members(&ClassExpr::Exists(p.clone()), is_data) {
                        changed |= st.classes.entry(c.clone()).or_default().insert(n);
                    }
                }
                Axiom::Range(p, c) => {
                    for n in st.members(&ClassExpr::ExistsInv(p.clone()), is_data) {
                        changed |= st.classes.entry(c.clone()).or_default().insert(n);
                    }
                }
                Axiom::SubPropertyOf(p, q) if o.is_object_property(p) => {
                    let derived: Vec<(Node, Node)> = st
                        .objects
                        .get(p)
                        .map(|s| s.iter_pairs().map(|(a, b)| (a.clone(), b.clone())).collect())
                        .unwrap_or_default();
                    let target = st.objects.entry(q.clone()).or_default();
                    for (a, b) in derived {
                        changed |= target.insert(a, b);
                    }
                }
                Axiom::SubPropertyOf(p, q) => {
                    let derived: Vec<(Node, Node)> = st
                        .data
                        .get(p)
                        .map(|s| s.iter_pairs().map(|(a, b)| (a.clone(), b.clone())).collect())
                        .unwrap_or_default();
                    let target = st.data.entry(q.clone()).or_default();
                    for (a, b) in derived {
                        changed |= target.insert(a, b);
                    }
                }
                Axiom::InverseOf(p, q) => {
                    let from_p: Vec<(Node, Node)> = st
                        .objects
                        .get(p)
                        .map(|s| s.iter_pairs().map(|(a, b)| (b.clone(), a.clone())).collect())
                        .unwrap_or_default();
                    let from_q: Vec<(Node, Node)> = st
                        .objects
                        .get(q)
                        .map(|s| s.iter_pairs().map(|(a, b)| (b.clone(), a.clone())).collect())
                        .unwrap_or_default();
                    let tq = st.objects.entry(q.clone()).or_default();
                    for (a, b) in from_p {
                        changed |= tq.insert(a, b);
                    }
                    let tp = st.objects.entry(p.clone()).or_default();
                    for (a, b) in from_q {
                        changed |= tp.insert(a, b);
                    }
                }
                Axiom::DisjointClasses(..) | Axiom::ConditionalType { .. } => {}
            }
        }
        if !changed {
            break;
        }
    }
    st
}

fn match_term(t: &Term, n: &Node, bind: &mut BTreeMap<String, Node>) -> bool {
    match t {
        Term::Const(c) => matches!(n, Node::Named(v) if v == c),
        Term::Var(v) => match bind.get(v) {
            Some(existing) => existing == n,
            None => {
                bind.insert(v.clone(), n.clone());
                true
            }
        },
    }
}

fn resolve_node(t: &Term, bind: &BTreeMap<String, Node>) -> Option<Node> {
    match t {
        Term::Const(c) => Some(Node::Named(c.clone())),
        Term::Var(v) => bind.get(v).cloned(),
    }
}

/// Pick the unmatched atom with the most bound terms; break ties toward
/// smaller fact sets so joins stay narrow.
fn pick_atom(
    st: &ChaseState,
    q: &ConjunctiveQuery,
    done: &[bool],
    bind: &BTreeMap<String, Node>,
) -> usize {
    let mut best = usize::MAX;
    let mut best_key = (usize::MAX, usize::MAX);
    for (i, atom) in q.atoms.iter().enumerate() {
        if done[i] {
            continue;
        }
        let bound = atom
            .terms()
            .iter()
            .filter(|t| resolve_node(t, bind).is_some())
            .count();
        let fan = match atom {
            Atom::Class { class, .. } => st.classes.get(class).map(|s| s.len()).unwrap_or(0),
            Atom::Prop { prop, .. } => {
                let count = |set: Option<&PairSet>| {
                    set.map(|s| s.fwd.values().map(|v| v.len()).sum()).unwrap_or(0)
                };
                count(st.objects.get(prop)) + count(st.data.get(prop))
            }
        };
        // More bound terms first (smaller key), then fewer facts.
        let key = (atom.terms().len() - bound, fan);
        if key < best_key {
            best_key = key;
            best = i;
        }
    }
    best
}

fn eval(
    st: &ChaseState,
    q: &ConjunctiveQuery,
    done: &mut [bool],
    remaining: usize,
    bind: &mut BTreeMap<String, Node>,
    out: &mut BTreeSet<Vec<String>>,
) {
    if remaining == 0 {
        let mut row = Vec::with_capacity(q.head.len());
        for t in &q.head {
            match t {
                Term::Const(c) => row.push(c.clone()),
                Term::Var(v) => match bind.get(v) {
                    Some(Node::Named(name)) => row.push(name.clone()),
                    // Certain-answer semantics: null in the head rejects.
                    Some(Node::Null(_)) | None => return,
                },
            }
        }
        out.insert(row);
        return;
    }
    let idx = pick_atom(st, q, done, bind);
    done[idx] = true;
    match &q.atoms[idx] {
        Atom::Class { class, term } => {
            for n in st.classes.get(class).into_iter().flatten() {
                let mut b = bind.clone();
                if match_term(term, n, &mut b) {
                    eval(st, q, done, remaining - 1, &mut b, out);
                }
            }
        }
        Atom::Prop { prop, subject, object } => {
            for set in [st.objects.get(prop), st.data.get(prop)].into_iter().flatten() {
                // Use the index when one side is already bound.
                match (resolve_node(subject, bind), resolve_node(object, bind)) {
                    (Some(s), _) => {
                        for obj in set.fwd.get(&s).into_iter().flatten() {
                            let mut b = bind.clone();
                            if match_term(object, obj, &mut b) {
                                eval(st, q, done, remaining - 1, &mut b, out);
                            }
                        }
                    }
                    (None, Some(o)) => {
                        for s in set.rev.get(&o).into_iter().flatten() {
                            let mut b = bind.clone();
                            if match_term(subject, s, &mut b) {
                                eval(st, q, done, remaining - 1, &mut b, out);
                            }
                        }
                    }
                    (None, None) => {
                        for (s, obj) in set.iter_pairs() {
                            let mut b = bind.clone();
                            if match_term(subject, s, &mut b) && match_term(object, obj, &mut b) {
                                eval(st, q, done, remaining - 1, &mut b, out);
                            }
                        }
                    }
                }
            }
        }
    }
    done[idx] = false;
}

/// Certain answers of `q` over `o`, computed by chase materialization and
/// subgraph matching.
pub fn chase_oracle(q: &ConjunctiveQuery, o: &Ontology) -> Result<ResultSet, RewriteError> {
    if o.abox.len() > MAX_ABOX {
        return Err(RewriteError::InstanceTooLarge(o.abox.len()));
    }
    let st = run_chase(o, q.atoms.len() + 1);
    let mut rows = BTreeSet::new();
    let mut done = vec![false; q.atoms.len()];
    eval(&st, q, &mut done, q.atoms.len(), &mut BTreeMap::new(), &mut rows);
    Ok(ResultSet { columns: q.head.len(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cq::parse_cq;
    use ontomon_core::parse_ontology;

    #[test]
    fn existential_witness_supports_non_head_match() {
        let o = parse_ontology(
            "Class(C) ObjectProperty(p) SubClassOf(C Exists(p)) Individual(a) ClassAssertion(a C)",
        )
        .unwrap();
        let q = parse_cq("SELECT ?x WHERE { ?x p ?y }", &o).unwrap();
        let rs = chase_oracle(&q, &o).unwrap();
        assert_eq!(rs.rows, BTreeSet::from([vec!["a".to_string()]]));
    }

    #[test]
    fn null_in_head_is_rejected() {
        let o = parse_ontology(
            "Class(C) ObjectProperty(p) SubClassOf(C Exists(p)) Individual(a) ClassAssertion(a C)",
        )
        .unwrap();
        let q = parse_cq("SELECT ?x ?y WHERE { ?x p ?y }", &o).unwrap();
        let rs = chase_oracle(&q, &o).unwrap();
        assert!(rs.is_empty());
    }

    #[test]
    fn instance_too_large_guard() {
        let mut o = parse_ontology("Class(C) Individual(a)").unwrap();
        for _ in 0..10_001 {
            o.abox.push(ontomon_core::ABoxAssertion::Class("a".into(), "C".into()));
        }
        let q = parse_cq("SELECT ?x WHERE { ?x a C }", &o).unwrap();
        assert!(matches!(chase_oracle(&q, &o), Err(RewriteError::InstanceTooLarge(_))));
    }

    #[test]
    fn inverse_chain_through_nulls() {
        // B ⊑ ∃p⁻ gives a's predecessor; Domain(p, C) types that null, and
        // a query touching only named positions still sees the entailment.
        let o = parse_ontology(
            "Class(B) Class(C) ObjectProperty(p)\n\
             SubClassOf(B ExistsInv(p)) Domain(p C) Range(p B)\n\
             Individual(a) ClassAssertion(a B)",
        )
        .unwrap();
        let q = parse_cq("SELECT ?x WHERE { ?y p ?x }", &o).unwrap();
        let rs = chase_oracle(&q, &o).unwrap();
        assert_eq!(rs.rows, BTreeSet::from([vec!["a".to_string()]]));
    }

    #[test]
    fn disconnected_components_cross_product() {
        let o = parse_ontology(
            "Class(C) Class(D) Individual(a) Individual(b) Individual(c)\n\
             ClassAssertion(a C) ClassAssertion(b C) ClassAssertion(c D)",
        )
        .unwrap();
        let q = parse_cq("SELECT ?x ?y WHERE { ?x a C . ?y a D }", &o).unwrap();
        let rs = chase_oracle(&q, &o).unwrap();
        assert_eq!(rs.rows.len(), 2);
    }

    #[test]
    fn bound_subject_uses_the_index() {
        let o = parse_ontology(
            "Class(C) ObjectProperty(p) Individual(a) Individual(b) Individual(c)\n\
             ClassAssertion(a C) ObjectAssertion(a p b) ObjectAssertion(c p b)",
        )
        .unwrap();
        let q = parse_cq("SELECT ?x ?y WHERE { ?x a C . ?x p ?y }", &o).unwrap();
        let rs = chase_oracle(&q, &o).unwrap();
        assert_eq!(rs.rows, BTreeSet::from([vec!["a".to_string(), "b".to_string()]]));
    }
}
