//! Seeded random ontology and ABox generators.

use ontomon_core::{ABoxAssertion, Axiom, ClassExpr, Ontology};
use ontomon_rewrite::{Atom, ConjunctiveQuery, Term};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct OntoGenConfig {
    pub classes: usize,
    pub object_properties: usize,
    pub data_properties: usize,
    pub axioms: usize,
    pub individuals: usize,
    pub assertions: usize,
    /// Include ConditionalType rules (non-QL).
    pub with_rules: bool,
}

impl Default for OntoGenConfig {
    fn default() -> Self {
        OntoGenConfig {
            classes: 8,
            object_properties: 4,
            data_properties: 2,
            axioms: 12,
            individuals: 30,
            assertions: 60,
            with_rules: false,
        }
    }
}

pub const LITERALS: &[&str] = &["_70to80", "_80to130", "_130degrees", "low", "high"];

fn random_class_expr<R: Rng>(rng: &mut R, o: &Ontology, allow_inv: bool) -> ClassExpr {
    let classes: Vec<&String> = o.classes.iter().collect();
    let oprops: Vec<&String> = o.object_properties.iter().collect();
    let dprops: Vec<&String> = o.data_properties.iter().collect();
    loop {
        match rng.gen_range(0..10) {
            0..=5 => {
                if let Some(c) = classes.choose(rng) {
                    return ClassExpr::Named((*c).clone());
                }
            }
            6..=7 => {
                if let Some(p) = oprops.choose(rng) {
                    return ClassExpr::Exists((*p).clone());
                }
            }
            8 => {
                if allow_inv {
                    if let Some(p) = oprops.choose(rng) {
                        return ClassExpr::ExistsInv((*p).clone());
                    }
                }
            }
            _ => {
                if let Some(p) = dprops.choose(rng) {
                    return ClassExpr::Exists((*p).clone());
                }
            }
        }
    }
}

/// Random ontology within the given size bounds. Only positive axioms are
/// generated, so every instance is consistent by construction.
pub fn random_ontology<R: Rng>(rng: &mut R, cfg: &OntoGenConfig) -> Ontology {
    let mut o = Ontology::new();
    for i in 0..cfg.classes.max(1) {
        o.declare_class(&format!("C{i}")).unwrap();
    }
    for i in 0..cfg.object_properties {
        o.declare_object_property(&format!("p{i}")).unwrap();
    }
    for i in 0..cfg.data_properties {
        o.declare_data_property(&format!("d{i}")).unwrap();
    }

    let classes: Vec<String> = o.classes.iter().cloned().collect();
    let oprops: Vec<String> = o.object_properties.iter().cloned().collect();
    let dprops: Vec<String> = o.data_properties.iter().cloned().collect();

    let mut axioms = Vec::new();
    let mut guard = 0;
    while axioms.len() < cfg.axioms && guard < cfg.axioms * 20 {
        guard += 1;
        let ax = match rng.gen_range(0..10) {
            0..=4 => {
                let a = random_class_expr(rng, &o, true);
                let b = random_class_expr(rng, &o, true);
                if a == b {
                    continue;
                }
                Axiom::SubClassOf(a, b)
            }
            5 => {
                if oprops.len() < 2 {
                    continue;
                }
                let p = oprops.choose(rng).unwrap().clone();
                let q = oprops.choose(rng).unwrap().clone();
                if p == q {
                    continue;
                }
                Axiom::SubPropertyOf(p, q)
            }
            6 => {
                let (Some(p), Some(c)) = (oprops.choose(rng), classes.choose(rng)) else {
                    continue;
                };
                Axiom::Domain(p.clone(), c.clone())
            }
            7 => {
                let (Some(p), Some(c)) = (oprops.choose(rng), classes.choose(rng)) else {
                    continue;
                };
                Axiom::Range(p.clone(), c.clone())
            }
            8 => {
                if oprops.len() < 2 {
                    continue;
                }
                let p = oprops.choose(rng).unwrap().clone();
                let q = oprops.choose(rng).unwrap().clone();
                if p == q {
                    continue;
                }
                Axiom::InverseOf(p, q)
            }
            _ => {
                let (Some(p), Some(c)) = (dprops.choose(rng), classes.choose(rng)) else {
                    continue;
                };
                Axiom::Domain(p.clone(), c.clone())
            }
        };
        axioms.push(ax);
    }
    if cfg.with_rules && !dprops.is_empty() && classes.len() >= 2 {
        for _ in 0..2 {
            let body = classes.choose(rng).unwrap().clone();
            let head = classes.choose(rng).unwrap().clone();
            if body == head {
                continue;
            }
            axioms.push(Axiom::ConditionalType {
                body_class: body,
                prop: dprops.choose(rng).unwrap().clone(),
                value: LITERALS.choose(rng).unwrap().to_string(),
                head_class: head,
            });
        }
    }
    for ax in axioms {
        o.add_axiom(ax).unwrap();
    }

    random_abox(rng, &mut o, cfg.individuals, cfg.assertions);
    o
}

/// Declare `individuals` fresh individuals and add up to `assertions`
/// random assertions over the ontology's vocabulary.
pub fn random_abox<R: Rng>(rng: &mut R, o: &mut Ontology, individuals: usize, assertions: usize) {
    let base = o.individuals.len();
    for i in 0..individuals {
        o.declare_individual(&format!("i{}", base + i)).unwrap();
    }
    let inds: Vec<String> = o.individuals.iter().cloned().collect();
    if inds.is_empty() {
        return;
    }
    let classes: Vec<String> = o.classes.iter().cloned().collect();
    let oprops: Vec<String> = o.object_properties.iter().cloned().collect();
    let dprops: Vec<String> = o.data_properties.iter().cloned().collect();
    for _ in 0..assertions {
        let a = match rng.gen_range(0..10) {
            0..=4 => {
                let Some(c) = classes.choose(rng) else { continue };
                ABoxAssertion::Class(inds.choose(rng).unwrap().clone(), c.clone())
            }
            5..=7 => {
                let Some(p) = oprops.choose(rng) else { continue };
                ABoxAssertion::Object(
                    inds.choose(rng).unwrap().clone(),
                    p.clone(),
                    inds.choose(rng).unwrap().clone(),
                )
            }
            _ => {
                let Some(p) = dprops.choose(rng) else { continue };
                ABoxAssertion::Data(
                    inds.choose(rng).unwrap().clone(),
                    p.clone(),
                    LITERALS.choose(rng).unwrap().to_string(),
                )
            }
        };
        // Duplicates are fine; the stores and reasoners use set semantics.
        o.add_assertion(a).unwrap();
    }
}

/// Random conjunctive query over the ontology's vocabulary: up to
/// `max_atoms` atoms, head variables drawn from the body.
pub fn random_cq<R: Rng>(rng: &mut R, o: &Ontology, max_atoms: usize) -> ConjunctiveQuery {
    let classes: Vec<String> = o.classes.iter().cloned().collect();
    let oprops: Vec<String> = o.object_properties.iter().cloned().collect();
    let dprops: Vec<String> = o.data_properties.iter().cloned().collect();
    let inds: Vec<String> = o.individuals.iter().cloned().collect();
    let var_pool = ["x", "y", "z", "w"];

    let n_atoms = rng.gen_range(1..=max_atoms.max(1));
    let mut atoms = Vec::new();
    let mut atoms_guard = 0;
    while atoms.len() < n_atoms && atoms_guard < n_atoms * 10 {
        atoms_guard += 1;
        let mk_var = |rng: &mut R| Term::Var(var_pool[rng.gen_range(0..var_pool.len())].into());
        match rng.gen_range(0..10) {
            0..=4 => {
                let Some(c) = classes.choose(rng) else { continue };
                atoms.push(Atom::Class { class: c.clone(), term: mk_var(rng) });
            }
            5..=7 => {
                let Some(p) = oprops.choose(rng) else { continue };
                let object = if rng.gen_bool(0.15) && !inds.is_empty() {
                    Term::Const(inds.choose(rng).unwrap().clone())
                } else {
                    mk_var(rng)
                };
                atoms.push(Atom::Prop { prop: p.clone(), subject: mk_var(rng), object });
            }
            _ => {
                let Some(p) = dprops.choose(rng) else { continue };
                let object = if rng.gen_bool(0.3) {
                    Term::Const(LITERALS.choose(rng).unwrap().to_string())
                } else {
                    mk_var(rng)
                };
                atoms.push(Atom::Prop { prop: p.clone(), subject: mk_var(rng), object });
            }
        }
    }
    if atoms.is_empty() {
        atoms.push(Atom::Class {
            class: classes.first().cloned().unwrap_or_else(|| "C0".into()),
            term: Term::Var("x".into()),
        });
    }

    let mut body_vars: Vec<String> = Vec::new();
    for a in &atoms {
        for t in a.terms() {
            if let Term::Var(v) = t {
                if !body_vars.contains(v) {
                    body_vars.push(v.clone());
                }
            }
        }
    }
    let arity = rng.gen_range(1..=body_vars.len().min(3));
    let head = body_vars.into_iter().take(arity).map(Term::Var).collect();
    ConjunctiveQuery { head, atoms }
}

/// Evaluate a CQ directly over ground assertions (no TBox, no nulls) by
/// backtracking. Reference semantics for the empty-TBox identity and for
/// checking the SQL executor.
pub fn eval_cq_ground(
    q: &ConjunctiveQuery,
    abox: &[ABoxAssertion],
) -> std::collections::BTreeSet<Vec<String>> {
    use std::collections::{BTreeMap, BTreeSet};
    fn bind(t: &Term, val: &str, b: &mut BTreeMap<String, String>) -> bool {
        match t {
            Term::Const(c) => c == val,
            Term::Var(v) => match b.get(v) {
                Some(existing) => existing == val,
                None => {
                    b.insert(v.clone(), val.to_string());
                    true
                }
            },
        }
    }
    fn go(
        q: &ConjunctiveQuery,
        abox: &[ABoxAssertion],
        idx: usize,
        b: &BTreeMap<String, String>,
        out: &mut BTreeSet<Vec<String>>,
    ) {
        if idx == q.atoms.len() {
            let mut row = Vec::new();
            for t in &q.head {
                match t {
                    Term::Const(c) => row.push(c.clone()),
                    Term::Var(v) => match b.get(v) {
                        Some(val) => row.push(val.clone()),
                        None => return,
                    },
                }
            }
            out.insert(row);
            return;
        }
        for fact in abox {
            let mut b2 = b.clone();
            let ok = match (&q.atoms[idx], fact) {
                (Atom::Class { class, term }, ABoxAssertion::Class(i, c)) if c == class => {
                    bind(term, i, &mut b2)
                }
                (
                    Atom::Prop { prop, subject, object },
                    ABoxAssertion::Object(s, p, o2),
                ) if p == prop => bind(subject, s, &mut b2) && bind(object, o2, &mut b2),
                (
                    Atom::Prop { prop, subject, object },
                    ABoxAssertion::Data(s, p, v),
                ) if p == prop => bind(subject, s, &mut b2) && bind(object, v, &mut b2),
                _ => false,
            };
            if ok {
                go(q, abox, idx + 1, &b2, out);
            }
        }
    }
    let mut out = std::collections::BTreeSet::new();
    go(q, abox, 0, &BTreeMap::new(), &mut out);
    out
}
