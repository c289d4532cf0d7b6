//! Query rewriting for the QL ontology fragment.
//!
//! The loop alternates two moves until no new query appears: (i) rewrite a
//! single atom backwards through an applicable inclusion axiom, and (ii)
//! unify a pair of body atoms. A seen-set of canonicalized queries bounds
//! the search; every produced disjunct has at most as many atoms as the
//! input query, so the union is finite.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use ontomon_core::{Axiom, ClassExpr, Ontology, Role};

use crate::cq::{Atom, ConjunctiveQuery, Term, UnionOfCqs};
use crate::RewriteError;

/// Positive inclusions usable for atom rewriting.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Pi {
    Class { sub: ClassExpr, sup: ClassExpr },
    Role { sub: Role, sup: Role },
    DataProp { sub: String, sup: String },
}

fn collect_pis(o: &Ontology) -> Result<Vec<Pi>, RewriteError> {
    let mut pis = Vec::new();
    for ax in &o.tbox {
        match ax {
            Axiom::ConditionalType { head_class, .. } => {
                return Err(RewriteError::NonQlAxiomEncountered(format!(
                    "ConditionalType rule deriving `{head_class}`"
                )));
            }
            Axiom::SubClassOf(sub, sup) => {
                pis.push(Pi::Class { sub: sub.clone(), sup: sup.clone() });
            }
            Axiom::Domain(p, c) => {
                pis.push(Pi::Class {
                    sub: ClassExpr::Exists(p.clone()),
                    sup: ClassExpr::Named(c.clone()),
                });
            }
            Axiom::Range(p, c) => {
                pis.push(Pi::Class {
                    sub: ClassExpr::ExistsInv(p.clone()),
                    sup: ClassExpr::Named(c.clone()),
                });
            }
            Axiom::SubPropertyOf(p, q) if o.is_object_property(p) => {
                pis.push(Pi::Role { sub: Role::fwd(p), sup: Role::fwd(q) });
                pis.push(Pi::Role { sub: Role::inv(p), sup: Role::inv(q) });
            }
            Axiom::SubPropertyOf(p, q) => {
                pis.push(Pi::DataProp { sub: p.clone(), sup: q.clone() });
            }
            Axiom::InverseOf(p, q) => {
                // p ≡ q⁻ yields four role inclusions.
                pis.push(Pi::Role { sub: Role::fwd(p), sup: Role::inv(q) });
                pis.push(Pi::Role { sub: Role::inv(q), sup: Role::fwd(p) });
                pis.push(Pi::Role { sub: Role::inv(p), sup: Role::fwd(q) });
                pis.push(Pi::Role { sub: Role::fwd(q), sup: Role::inv(p) });
            }
            Axiom::DisjointClasses(..) => {}
        }
    }
    Ok(pis)
}

struct FreshVars {
    counter: usize,
}

impl FreshVars {
    fn next(&mut self) -> Term {
        let t = Term::Var(format!("#g{}", self.counter));
        self.counter += 1;
        t
    }
}

/// Atom built from the sub side of a class inclusion, centred on `t`.
fn atom_from_sub(sub: &ClassExpr, t: &Term, fresh: &mut FreshVars) -> Atom {
    match sub {
        ClassExpr::Named(b) => Atom::Class { class: b.clone(), term: t.clone() },
        ClassExpr::Exists(q) => {
            Atom::Prop { prop: q.clone(), subject: t.clone(), object: fresh.next() }
        }
        ClassExpr::ExistsInv(q) => {
            Atom::Prop { prop: q.clone(), subject: fresh.next(), object: t.clone() }
        }
    }
}

/// All single-atom rewritings of `q.atoms[idx]` through `pi`, if applicable.
fn apply_pi(
    q: &ConjunctiveQuery,
    idx: usize,
    pi: &Pi,
    fresh: &mut FreshVars,
) -> Option<Atom> {
    match (&q.atoms[idx], pi) {
        (Atom::Class { class, term }, Pi::Class { sub, sup: ClassExpr::Named(c) }) if c == class => {
            Some(atom_from_sub(sub, term, fresh))
        }
        (Atom::Prop { prop, subject, object }, Pi::Role { sub, sup }) if &sup.prop == prop => {
            // Orient the atom by the super role's direction, then emit the
            // sub role over the oriented pair.
            let (x, y) = if sup.inverse { (object, subject) } else { (subject, object) };
            Some(if sub.inverse {
                Atom::Prop { prop: sub.prop.clone(), subject: y.clone(), object: x.clone() }
            } else {
                Atom::Prop { prop: sub.prop.clone(), subject: x.clone(), object: y.clone() }
            })
        }
        (Atom::Prop { prop, subject, object }, Pi::Class { sub, sup: ClassExpr::Exists(p) })
            if p == prop && q.is_unbound(object) =>
        {
            Some(atom_from_sub(sub, subject, fresh))
        }
        (Atom::Prop { prop, subject, object }, Pi::Class { sub, sup: ClassExpr::ExistsInv(p) })
            if p == prop && q.is_unbound(subject) =>
        {
            Some(atom_from_sub(sub, object, fresh))
        }
        (Atom::Prop { prop, subject, object }, Pi::DataProp { sub, sup }) if sup == prop => {
            Some(Atom::Prop { prop: sub.clone(), subject: subject.clone(), object: object.clone() })
        }
        _ => None,
    }
}

type Subst = BTreeMap<String, Term>;

fn resolve(t: &Term, subst: &Subst) -> Term {
    let mut cur = t.clone();
    let mut hops = 0;
    while let Term::Var(v) = &cur {
        match subst.get(v) {
            Some(next) => {
                cur = next.clone();
                hops += 1;
                if hops > subst.len() {
                    break;
                }
            }
            None => break,
        }
    }
    cur
}

fn unify_terms(a: &Term, b: &Term, subst: &mut Subst, q: &ConjunctiveQuery) -> bool {
    let ra = resolve(a, subst);
    let rb = resolve(b, subst);
    if ra == rb {
        return true;
    }
    match (&ra, &rb) {
        // Keep head variables as representatives so projected names survive.
        (Term::Var(v1), Term::Var(v2)) => {
            if q.head_has(v1) && !q.head_has(v2) {
                subst.insert(v2.clone(), ra);
            } else {
                subst.insert(v1.clone(), rb);
            }
            true
        }
        (Term::Var(v), _) => {
            subst.insert(v.clone(), rb);
            true
        }
        (_, Term::Var(v)) => {
            subst.insert(v.clone(), ra);
            true
        }
        _ => false,
    }
}

/// Most general unifier of two atoms, when their predicates agree.
fn unify_atoms(a: &Atom, b: &Atom, q: &ConjunctiveQuery) -> Option<Subst> {
    let mut subst = Subst::new();
    match (a, b) {
        (Atom::Class { class: c1, term: t1 }, Atom::Class { class: c2, term: t2 }) if c1 == c2 => {
            unify_terms(t1, t2, &mut subst, q).then_some(subst)
        }
        (
            Atom::Prop { prop: p1, subject: s1, object: o1 },
            Atom::Prop { prop: p2, subject: s2, object: o2 },
        ) if p1 == p2 => (unify_terms(s1, s2, &mut subst, q)
            && unify_terms(o1, o2, &mut subst, q))
        .then_some(subst),
        _ => None,
    }
}

fn apply_subst(q: &ConjunctiveQuery, subst: &Subst) -> ConjunctiveQuery {
    let map_term = |t: &Term| resolve(t, subst);
    let mut atoms: Vec<Atom> = Vec::with_capacity(q.atoms.len());
    for a in &q.atoms {
        let mapped = match a {
            Atom::Class { class, term } => {
                Atom::Class { class: class.clone(), term: map_term(term) }
            }
            Atom::Prop { prop, subject, object } => Atom::Prop {
                prop: prop.clone(),
                subject: map_term(subject),
                object: map_term(object),
            },
        };
        if !atoms.contains(&mapped) {
            atoms.push(mapped);
        }
    }
    ConjunctiveQuery { head: q.head.iter().map(map_term).collect(), atoms }
}

/// Canonical key for the seen-set: atoms are pre-sorted by a name-free
/// shape, variables renamed in traversal order, single-occurrence non-head
/// variables collapsed to `_`.
fn canonical_key(q: &ConjunctiveQuery) -> String {
    let shape = |q: &ConjunctiveQuery, t: &Term| -> String {
        match t {
            Term::Const(c) => format!("\"{c}\""),
            Term::Var(v) => {
                if q.head_has(v) {
                    "h".into()
                } else if q.occurrences(v) == 1 {
                    "_".into()
                } else {
                    "*".into()
                }
            }
        }
    };
    let mut atoms = q.atoms.clone();
    atoms.sort_by_key(|a| match a {
        Atom::Class { class, term } => format!("C:{class}:{}", shape(q, term)),
        Atom::Prop { prop, subject, object } => {
            format!("P:{prop}:{}:{}", shape(q, subject), shape(q, object))
        }
    });
    let sorted = ConjunctiveQuery { head: q.head.clone(), atoms };

    let mut names: BTreeMap<String, String> = BTreeMap::new();
    let rename = |q: &ConjunctiveQuery, t: &Term, names: &mut BTreeMap<String, String>| match t {
        Term::Const(c) => format!("\"{c}\""),
        Term::Var(v) => {
            if !q.head_has(v) && q.occurrences(v) == 1 {
                "_".into()
            } else {
                let n = names.len();
                names.entry(v.clone()).or_insert_with(|| format!("v{n}")).clone()
            }
        }
    };
    let mut out = String::new();
    for t in &sorted.head {
        out.push_str(&rename(&sorted, t, &mut names));
        out.push(' ');
    }
    out.push('|');
    for a in &sorted.atoms {
        match a {
            Atom::Class { class, term } => {
                out.push_str(&format!("C:{class}({})", rename(&sorted, term, &mut names)));
            }
            Atom::Prop { prop, subject, object } => {
                out.push_str(&format!(
                    "P:{prop}({},{})",
                    rename(&sorted, subject, &mut names),
                    rename(&sorted, object, &mut names)
                ));
            }
        }
        out.push(' ');
    }
    out
}

/// Rewrite `q` into a union of conjunctive queries whose evaluation over the
/// raw ABox yields exactly the certain answers of `q` under the TBox.
pub fn perfect_rewrite(q: &ConjunctiveQuery, o: &Ontology) -> Result<UnionOfCqs, RewriteError> {
    let pis = collect_pis(o)?;
    let mut fresh = FreshVars { counter: 0 };

    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut out: Vec<ConjunctiveQuery> = Vec::new();
    let mut queue: VecDeque<ConjunctiveQuery> = VecDeque::new();
    seen.insert(canonical_key(q));
    out.push(q.clone());
    queue.push_back(q.clone());

    while let Some(cur) = queue.pop_front() {
        // (i) axiom application, one atom at a time
        for idx in 0..cur.atoms.len() {
            for pi in &pis {
                if let Some(atom) = apply_pi(&cur, idx, pi, &mut fresh) {
                    let mut next = cur.clone();
                    next.atoms[idx] = atom;
                    // Merging duplicates keeps disjuncts within |q| atoms.
                    let mut deduped: Vec<Atom> = Vec::with_capacity(next.atoms.len());
                    for a in next.atoms {
                        if !deduped.contains(&a) {
                            deduped.push(a);
                        }
                    }
                    next.atoms = deduped;
                    if seen.insert(canonical_key(&next)) {
                        out.push(next.clone());
                        queue.push_back(next);
                    }
                }
            }
        }
        // (ii) reduction: unify atom pairs
        for i in 0..cur.atoms.len() {
            for j in (i + 1)..cur.atoms.len() {
                if let Some(subst) = unify_atoms(&cur.atoms[i], &cur.atoms[j], &cur) {
                    let reduced = apply_subst(&cur, &subst);
                    if seen.insert(canonical_key(&reduced)) {
                        out.push(reduced.clone());
                        queue.push_back(reduced);
                    }
                }
            }
        }
    }

    Ok(UnionOfCqs { disjuncts: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cq::parse_cq;
    use ontomon_core::parse_ontology;

    #[test]
    fn single_subclass_expansion() {
        let o = parse_ontology("Class(A) Class(B) SubClassOf(A B)").unwrap();
        let q = parse_cq("SELECT ?x WHERE { ?x a B }", &o).unwrap();
        let ucq = perfect_rewrite(&q, &o).unwrap();
        assert_eq!(ucq.disjuncts.len(), 2);
        assert_eq!(ucq.disjuncts[0], q);
        assert_eq!(
            ucq.disjuncts[1].atoms,
            vec![Atom::Class { class: "A".into(), term: Term::Var("x".into()) }]
        );
    }

    #[test]
    fn domain_axiom_introduces_property_disjunct() {
        let o = parse_ontology("Class(C) ObjectProperty(p) Domain(p C)").unwrap();
        let q = parse_cq("SELECT ?x WHERE { ?x a C }", &o).unwrap();
        let ucq = perfect_rewrite(&q, &o).unwrap();
        let has_prop_disjunct = ucq.disjuncts.iter().any(|d| {
            d.atoms.len() == 1
                && matches!(&d.atoms[0],
                    Atom::Prop { prop, subject: Term::Var(s), object: Term::Var(v) }
                        if prop == "p" && s == "x" && v.starts_with('#'))
        });
        assert!(has_prop_disjunct, "expected a q(x) <- p(x,_) disjunct, got {ucq}");
    }

    #[test]
    fn empty_tbox_is_identity_modulo_reduction() {
        let o = parse_ontology("Class(C) ObjectProperty(p) Individual(i)").unwrap();
        let q = parse_cq("SELECT ?x WHERE { ?x a C . ?x p ?y }", &o).unwrap();
        let ucq = perfect_rewrite(&q, &o).unwrap();
        assert_eq!(ucq.disjuncts[0], q);
        // No axiom applies; only reductions could add disjuncts, and these
        // atoms do not unify.
        assert_eq!(ucq.disjuncts.len(), 1);
    }

    #[test]
    fn conditional_type_in_scope_is_rejected() {
        let o = parse_ontology(
            "Class(A) Class(B) DataProperty(d) ConditionalType(A d \"x\" B)",
        )
        .unwrap();
        let q = parse_cq("SELECT ?x WHERE { ?x a B }", &o).unwrap();
        assert!(matches!(
            perfect_rewrite(&q, &o),
            Err(RewriteError::NonQlAxiomEncountered(_))
        ));
    }

    #[test]
    fn reduction_enables_existential_application() {
        // Classic case: q(x) <- p(x,y), p(z,y) needs unification before
        // A ⊑ ∃p becomes applicable.
        let o = parse_ontology("Class(A) ObjectProperty(p) SubClassOf(A Exists(p))").unwrap();
        let q = ConjunctiveQuery {
            head: vec![Term::Var("x".into())],
            atoms: vec![
                Atom::Prop {
                    prop: "p".into(),
                    subject: Term::Var("x".into()),
                    object: Term::Var("y".into()),
                },
                Atom::Prop {
                    prop: "p".into(),
                    subject: Term::Var("z".into()),
                    object: Term::Var("y".into()),
                },
            ],
        };
        let ucq = perfect_rewrite(&q, &o).unwrap();
        let has_class_disjunct = ucq.disjuncts.iter().any(|d| {
            d.atoms == vec![Atom::Class { class: "A".into(), term: Term::Var("x".into()) }]
        });
        assert!(has_class_disjunct, "expected q(x) <- A(x), got {ucq}");
    }

    #[test]
    fn disjunct_atom_count_never_exceeds_input() {
        let o = parse_ontology(
            "Class(A) Class(B) Class(C) ObjectProperty(p) ObjectProperty(q)\n\
             SubClassOf(A B) SubClassOf(B C) SubClassOf(A Exists(p))\n\
             SubPropertyOf(p q) Domain(q A) Range(q C) InverseOf(p q)",
        )
        .unwrap();
        let q = parse_cq("SELECT ?x WHERE { ?x a C . ?x q ?y . ?y a A }", &o).unwrap();
        let ucq = perfect_rewrite(&q, &o).unwrap();
        assert!(!ucq.disjuncts.is_empty());
        for d in &ucq.disjuncts {
            assert!(d.atoms.len() <= q.atoms.len());
            assert_eq!(d.head.len(), q.head.len());
        }
    }
}
