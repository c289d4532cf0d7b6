//! Conjunctive-query AST and the SPARQL-like text subset.
//!
//! Grammar: `SELECT ?v1 ?v2 WHERE { triple . triple ... }` with triples
//! `?x a ClassName`, `?x prop ?y`, `?x prop "lit"` or `?x prop ind`.

use std::fmt;

use ontomon_core::Ontology;

use crate::RewriteError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// Membership in a named class.
    Class { class: String, term: Term },
    /// Object- or data-property atom.
    Prop { prop: String, subject: Term, object: Term },
}

impl Atom {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Class { term, .. } => vec![term],
            Atom::Prop { subject, object, .. } => vec![subject, object],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConjunctiveQuery {
    pub head: Vec<Term>,
    pub atoms: Vec<Atom>,
}

impl ConjunctiveQuery {
    /// Number of body occurrences of a variable.
    pub fn occurrences(&self, var: &str) -> usize {
        self.atoms
            .iter()
            .flat_map(|a| a.terms())
            .filter(|t| t.as_var() == Some(var))
            .count()
    }

    pub fn head_has(&self, var: &str) -> bool {
        self.head.iter().any(|t| t.as_var() == Some(var))
    }

    /// Unbound means: a variable with a single body occurrence that is not
    /// projected by the head. Constants are always bound.
    pub fn is_unbound(&self, t: &Term) -> bool {
        match t {
            Term::Const(_) => false,
            Term::Var(v) => !self.head_has(v) && self.occurrences(v) == 1,
        }
    }
}

/// Union of conjunctive queries with identical head arity; the rewriting
/// engine guarantees no two disjuncts are identical after canonicalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnionOfCqs {
    pub disjuncts: Vec<ConjunctiveQuery>,
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Internal fresh variables (named `#g..`) are renumbered for display.
        let mut anon = std::collections::BTreeMap::new();
        let mut render = |t: &Term| -> String {
            match t {
                Term::Const(c) => format!("\"{c}\""),
                Term::Var(v) if v.starts_with('#') => {
                    let n = anon.len();
                    let id = anon.entry(v.clone()).or_insert(n);
                    format!("?_{id}")
                }
                Term::Var(v) => format!("?{v}"),
            }
        };
        write!(f, "SELECT")?;
        for t in &self.head {
            write!(f, " {}", render(t))?;
        }
        write!(f, " WHERE {{")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " .")?;
            }
            match a {
                Atom::Class { class, term } => write!(f, " {} a {}", render(term), class)?,
                Atom::Prop { prop, subject, object } => {
                    write!(f, " {} {} {}", render(subject), prop, render(object))?
                }
            }
        }
        write!(f, " }}")
    }
}

impl fmt::Display for UnionOfCqs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

fn tokenize(text: &str) -> Result<Vec<String>, RewriteError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '{' | '}' | '.' => {
                chars.next();
                toks.push(c.to_string());
            }
            '?' => {
                chars.next();
                let mut s = String::from("?");
                while let Some(&c2) = chars.peek() {
                    if c2.is_alphanumeric() || c2 == '_' {
                        s.push(c2);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if s.len() == 1 {
                    return Err(RewriteError::Syntax("`?` without a variable name".into()));
                }
                toks.push(s);
            }
            '"' => {
                chars.next();
                let mut s = String::from("\"");
                let mut closed = false;
                for c2 in chars.by_ref() {
                    if c2 == '"' {
                        closed = true;
                        break;
                    }
                    s.push(c2);
                }
                if !closed {
                    return Err(RewriteError::Syntax("unterminated string literal".into()));
                }
                toks.push(s);
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut s = String::new();
                while let Some(&c2) = chars.peek() {
                    if c2.is_alphanumeric() || c2 == '_' || c2 == '-' || c2 == ':' {
                        s.push(c2);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(s);
            }
            other => return Err(RewriteError::Syntax(format!("unexpected character `{other}`"))),
        }
    }
    Ok(toks)
}

/// Parse and resolve a query against an ontology's vocabulary.
pub fn parse_cq(text: &str, o: &Ontology) -> Result<ConjunctiveQuery, RewriteError> {
    let toks = tokenize(text)?;
    let mut pos = 0;
    let kw = |toks: &[String], pos: usize, kw: &str| -> bool {
        toks.get(pos).is_some_and(|t| t.eq_ignore_ascii_case(kw))
    };
    if !kw(&toks, pos, "SELECT") {
        return Err(RewriteError::Syntax("expected SELECT".into()));
    }
    pos += 1;
    let mut head = Vec::new();
    while let Some(t) = toks.get(pos) {
        if let Some(v) = t.strip_prefix('?') {
            head.push(Term::Var(v.to_string()));
            pos += 1;
        } else {
            break;
        }
    }
    if head.is_empty() {
        return Err(RewriteError::Syntax("SELECT needs at least one variable".into()));
    }
    if !kw(&toks, pos, "WHERE") {
        return Err(RewriteError::Syntax("expected WHERE".into()));
    }
    pos += 1;
    if toks.get(pos).map(String::as_str) != Some("{") {
        return Err(RewriteError::Syntax("expected `{`".into()));
    }
    pos += 1;

    let mut atoms = Vec::new();
    loop {
        match toks.get(pos).map(String::as_str) {
            Some("}") => {
                pos += 1;
                break;
            }
            Some(".") => {
                pos += 1;
                continue;
            }
            Some(subj) if subj.starts_with('?') => {
                let subject = Term::Var(subj[1..].to_string());
                pos += 1;
                let pred = toks
                    .get(pos)
                    .ok_or_else(|| RewriteError::Syntax("triple missing predicate".into()))?
                    .clone();
                pos += 1;
                if pred == "a" {
                    let class = toks
                        .get(pos)
                        .ok_or_else(|| RewriteError::Syntax("`a` missing class name".into()))?
                        .clone();
                    pos += 1;
                    if !o.is_class(&class) {
                        return Err(RewriteError::UndeclaredName(class));
                    }
                    atoms.push(Atom::Class { class, term: subject });
                } else {
                    let is_obj = o.is_object_property(&pred);
                    let is_data = o.is_data_property(&pred);
                    if !is_obj && !is_data {
                        return Err(RewriteError::UndeclaredName(pred));
                    }
                    let objtok = toks
                        .get(pos)
                        .ok_or_else(|| RewriteError::Syntax("triple missing object".into()))?
                        .clone();
                    pos += 1;
                    let object = if let Some(v) = objtok.strip_prefix('?') {
                        Term::Var(v.to_string())
                    } else if let Some(lit) = objtok.strip_prefix('"') {
                        if is_obj {
                            return Err(RewriteError::Syntax(format!(
                                "object property `{pred}` takes an individual or variable"
                            )));
                        }
                        Term::Const(lit.to_string())
                    } else {
                        if is_data {
                            return Err(RewriteError::Syntax(format!(
                                "data property `{pred}` takes a literal or variable"
                            )));
                        }
                        if !o.is_individual(&objtok) {
                            return Err(RewriteError::UndeclaredName(objtok));
                        }
                        Term::Const(objtok)
                    };
                    atoms.push(Atom::Prop { prop: pred, subject, object });
                }
            }
            Some(other) => {
                return Err(RewriteError::Syntax(format!("expected triple, found `{other}`")))
            }
            None => return Err(RewriteError::Syntax("missing `}`".into())),
        }
    }
    if pos != toks.len() {
        return Err(RewriteError::Syntax("trailing tokens after `}`".into()));
    }

    let q = ConjunctiveQuery { head, atoms };
    for t in &q.head {
        if let Term::Var(v) = t {
            if q.occurrences(v) == 0 {
                return Err(RewriteError::UnboundHeadVariable(v.clone()));
            }
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ontomon_core::parse_ontology;

    fn ils_mini() -> Ontology {
        parse_ontology(
            "Class(ITU) Class(Event) Class(Terminal)\n\
             ObjectProperty(occursAt) DataProperty(atTime) Individual(t1)",
        )
        .unwrap()
    }

    #[test]
    fn single_class_atom() {
        let q = parse_cq("SELECT ?x WHERE { ?x a ITU }", &ils_mini()).unwrap();
        assert_eq!(q.head.len(), 1);
        assert_eq!(q.atoms, vec![Atom::Class { class: "ITU".into(), term: Term::Var("x".into()) }]);
    }

    #[test]
    fn three_atom_join() {
        let q = parse_cq(
            "SELECT ?e ?t WHERE { ?e a Event . ?e occursAt ?t . ?t a Terminal }",
            &ils_mini(),
        )
        .unwrap();
        assert_eq!(q.head.len(), 2);
        assert_eq!(q.atoms.len(), 3);
    }

    #[test]
    fn empty_body_head_var_is_unbound() {
        let err = parse_cq("SELECT ?x WHERE { }", &ils_mini()).unwrap_err();
        assert!(matches!(err, RewriteError::UnboundHeadVariable(v) if v == "x"));
    }

    #[test]
    fn undeclared_names_rejected() {
        assert!(matches!(
            parse_cq("SELECT ?x WHERE { ?x a Nope }", &ils_mini()),
            Err(RewriteError::UndeclaredName(n)) if n == "Nope"
        ));
        assert!(matches!(
            parse_cq("SELECT ?x WHERE { ?x nope ?y }", &ils_mini()),
            Err(RewriteError::UndeclaredName(n)) if n == "nope"
        ));
    }

    #[test]
    fn literals_only_on_data_properties() {
        assert!(parse_cq("SELECT ?x WHERE { ?x occursAt \"t1\" }", &ils_mini()).is_err());
        assert!(parse_cq("SELECT ?x WHERE { ?x atTime \"100\" }", &ils_mini()).is_ok());
        assert!(parse_cq("SELECT ?x WHERE { ?x occursAt t1 }", &ils_mini()).is_ok());
    }

    #[test]
    fn display_round_trips_through_parser() {
        let o = ils_mini();
        let q = parse_cq(
            "SELECT ?e ?t WHERE { ?e a Event . ?e occursAt ?t . ?t a Terminal }",
            &o,
        )
        .unwrap();
        let reparsed = parse_cq(&q.to_string(), &o).unwrap();
        assert_eq!(q, reparsed);
    }
}
