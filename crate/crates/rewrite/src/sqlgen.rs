//! UCQ-to-SQL compilation over the generated schema.
//!
//! One SELECT block per disjunct, atoms become table scans with aliases
//! `t0..tn` in atom order, shared variables become equality predicates
//! against the variable's first binding, constants become literal predicates.

use std::collections::BTreeMap;

use ontomon_store::sql_escape_literal;
use ontomon_store::{Mapping, SqlText};

use crate::cq::{Atom, ConjunctiveQuery, Term, UnionOfCqs};
use crate::RewriteError;

fn compile_disjunct(q: &ConjunctiveQuery, m: &Mapping) -> Result<String, RewriteError> {
    let mut from = Vec::new();
    let mut preds = Vec::new();
    let mut binding: BTreeMap<String, String> = BTreeMap::new(); // var -> alias.col

    for (k, atom) in q.atoms.iter().enumerate() {
        let alias = format!("t{k}");
        let (table, cols, terms): (&str, Vec<&str>, Vec<&Term>) = match atom {
            Atom::Class { class, term } => {
                let t = m
                    .class_map
                    .get(class)
                    .ok_or_else(|| RewriteError::UnmappedSymbol(class.clone()))?;
                (t, vec!["id"], vec![term])
            }
            Atom::Prop { prop, subject, object } => {
                if let Some((t, s, o)) = m.obj_prop_map.get(prop) {
                    (t, vec![s, o], vec![subject, object])
                } else if let Some((t, s, v)) = m.data_prop_map.get(prop) {
                    (t, vec![s, v], vec![subject, object])
                } else {
                    return Err(RewriteError::UnmappedSymbol(prop.clone()));
                }
            }
        };
        from.push(format!("{table} {alias}"));
        for (col, term) in cols.iter().zip(terms) {
            let qualified = format!("{alias}.{col}");
            match term {
                Term::Const(c) => preds.push(format!("{qualified} = '{}'", sql_escape_literal(c))),
                Term::Var(v) => match binding.get(v) {
                    Some(first) => preds.push(format!("{qualified} = {first}")),
                    None => {
                        binding.insert(v.clone(), qualified);
                    }
                },
            }
        }
    }

    let mut items = Vec::new();
    for t in &q.head {
        match t {
            Term::Var(v) => {
                let col = binding
                    .get(v)
                    .ok_or_else(|| RewriteError::UnboundHeadVariable(v.clone()))?;
                items.push(col.clone());
            }
            Term::Const(c) => items.push(format!("'{}'", sql_escape_literal(c))),
        }
    }

    let mut sql = format!("SELECT DISTINCT {} FROM {}", items.join(", "), from.join(", "));
    if !preds.is_empty() {
        sql.push_str(" WHERE ");
        sql.push_str(&preds.join(" AND "));
    }
    Ok(sql)
}

/// Compile a union of conjunctive queries into a single SQL text.
pub fn compile_to_sql(u: &UnionOfCqs, m: &Mapping) -> Result<SqlText, RewriteError> {
    let blocks: Vec<String> =
        u.disjuncts.iter().map(|d| compile_disjunct(d, m)).collect::<Result<_, _>>()?;
    Ok(SqlText::minimal(blocks.join("\nUNION\n")))
}
