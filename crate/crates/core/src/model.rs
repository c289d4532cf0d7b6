//! Vocabulary, axiom, and assertion model.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OntologyError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("undeclared name `{name}` (expected {expected})")]
    UndeclaredName { name: String, expected: NameKind },
    #[error("duplicate declaration `{0}`")]
    DuplicateDeclaration(String),
}

/// Namespace a name is expected to live in when it is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameKind {
    Class,
    ObjectProperty,
    DataProperty,
    AnyProperty,
    Individual,
}

impl fmt::Display for NameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NameKind::Class => "a class",
            NameKind::ObjectProperty => "an object property",
            NameKind::DataProperty => "a data property",
            NameKind::AnyProperty => "a property",
            NameKind::Individual => "an individual",
        };
        f.write_str(s)
    }
}

/// Class expression: a named class or an unqualified existential over an
/// object property (forward or inverse). Data properties are admitted in
/// the forward position only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassExpr {
    Named(String),
    Exists(String),
    ExistsInv(String),
}

impl fmt::Display for ClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassExpr::Named(n) => write!(f, "{n}"),
            ClassExpr::Exists(p) => write!(f, "Exists({p})"),
            ClassExpr::ExistsInv(p) => write!(f, "ExistsInv({p})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    SubClassOf(ClassExpr, ClassExpr),
    SubPropertyOf(String, String),
    Domain(String, String),
    Range(String, String),
    InverseOf(String, String),
    DisjointClasses(String, String),
    /// Non-QL classification rule: an individual of `body_class` that can
    /// reach, over object-property assertions, some individual carrying
    /// `prop = value` is also an instance of `head_class`.
    ConditionalType {
        body_class: String,
        prop: String,
        value: String,
        head_class: String,
    },
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::SubClassOf(a, b) => write!(f, "SubClassOf({a} {b})"),
            Axiom::SubPropertyOf(p, q) => write!(f, "SubPropertyOf({p} {q})"),
            Axiom::Domain(p, c) => write!(f, "Domain({p} {c})"),
            Axiom::Range(p, c) => write!(f, "Range({p} {c})"),
            Axiom::InverseOf(p, q) => write!(f, "InverseOf({p} {q})"),
            Axiom::DisjointClasses(c, d) => write!(f, "DisjointClasses({c} {d})"),
            Axiom::ConditionalType { body_class, prop, value, head_class } => {
                write!(f, "ConditionalType({body_class} {prop} \"{value}\" {head_class})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ABoxAssertion {
    /// individual, class
    Class(String, String),
    /// subject, object property, object
    Object(String, String, String),
    /// subject, data property, literal
    Data(String, String, String),
}

impl fmt::Display for ABoxAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ABoxAssertion::Class(i, c) => write!(f, "ClassAssertion({i} {c})"),
            ABoxAssertion::Object(s, p, o) => write!(f, "ObjectAssertion({s} {p} {o})"),
            ABoxAssertion::Data(s, p, v) => write!(f, "DataAssertion({s} {p} \"{v}\")"),
        }
    }
}

/// An ontology: four disjoint name sets plus TBox axioms and ABox assertions.
///
/// Values are immutable once built; every operation over them is a pure
/// function, so sharing across threads needs no synchronization. The checked
/// mutators below keep the declaration invariants; they are the only
/// sanctioned way to grow an ontology programmatically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    pub classes: BTreeSet<String>,
    pub object_properties: BTreeSet<String>,
    pub data_properties: BTreeSet<String>,
    pub individuals: BTreeSet<String>,
    pub tbox: Vec<Axiom>,
    pub abox: Vec<ABoxAssertion>,
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_fresh(&self, name: &str) -> Result<(), OntologyError> {
        if self.classes.contains(name)
            || self.object_properties.contains(name)
            || self.data_properties.contains(name)
            || self.individuals.contains(name)
        {
            return Err(OntologyError::DuplicateDeclaration(name.to_string()));
        }
        Ok(())
    }

    pub fn declare_class(&mut self, name: &str) -> Result<(), OntologyError> {
        self.check_fresh(name)?;
        self.classes.insert(name.to_string());
        Ok(())
    }

    pub fn declare_object_property(&mut self, name: &str) -> Result<(), OntologyError> {
        self.check_fresh(name)?;
        self.object_properties.insert(name.to_string());
        Ok(())
    }

    pub fn declare_data_property(&mut self, name: &str) -> Result<(), OntologyError> {
        self.check_fresh(name)?;
        self.data_properties.insert(name.to_string());
        Ok(())
    }

    pub fn declare_individual(&mut self, name: &str) -> Result<(), OntologyError> {
        self.check_fresh(name)?;
        self.individuals.insert(name.to_string());
        Ok(())
    }

    pub fn require(&self, name: &str, kind: NameKind) -> Result<(), OntologyError> {
        let ok = match kind {
            NameKind::Class => self.classes.contains(name),
            NameKind::ObjectProperty => self.object_properties.contains(name),
            NameKind::DataProperty => self.data_properties.contains(name),
            NameKind::AnyProperty => {
                self.object_properties.contains(name) || self.data_properties.contains(name)
            }
            NameKind::Individual => self.individuals.contains(name),
        };
        if ok {
            Ok(())
        } else {
            Err(OntologyError::UndeclaredName { name: name.to_string(), expected: kind })
        }
    }

    fn check_class_expr(&self, e: &ClassExpr) -> Result<(), OntologyError> {
        match e {
            ClassExpr::Named(n) => self.require(n, NameKind::Class),
            ClassExpr::Exists(p) => self.require(p, NameKind::AnyProperty),
            ClassExpr::ExistsInv(p) => self.require(p, NameKind::ObjectProperty),
        }
    }

    /// Append a TBox axiom after resolving every referenced name.
    pub fn add_axiom(&mut self, ax: Axiom) -> Result<(), OntologyError> {
        match &ax {
            Axiom::SubClassOf(a, b) => {
                self.check_class_expr(a)?;
                self.check_class_expr(b)?;
            }
            Axiom::SubPropertyOf(p, q) => {
                self.require(p, NameKind::AnyProperty)?;
                // Sub and super must live in the same property namespace.
                if self.object_properties.contains(p) {
                    self.require(q, NameKind::ObjectProperty)?;
                } else {
                    self.require(q, NameKind::DataProperty)?;
                }
            }
            Axiom::Domain(p, c) => {
                self.require(p, NameKind::AnyProperty)?;
                self.require(c, NameKind::Class)?;
            }
            Axiom::Range(p, c) => {
                self.require(p, NameKind::ObjectProperty)?;
                self.require(c, NameKind::Class)?;
            }
            Axiom::InverseOf(p, q) => {
                self.require(p, NameKind::ObjectProperty)?;
                self.require(q, NameKind::ObjectProperty)?;
            }
            Axiom::DisjointClasses(c, d) => {
                self.require(c, NameKind::Class)?;
                self.require(d, NameKind::Class)?;
            }
            Axiom::ConditionalType { body_class, prop, head_class, .. } => {
                self.require(body_class, NameKind::Class)?;
                self.require(prop, NameKind::DataProperty)?;
                self.require(head_class, NameKind::Class)?;
            }
        }
        self.tbox.push(ax);
        Ok(())
    }

    /// Append an ABox assertion after resolving every referenced name.
    pub fn add_assertion(&mut self, a: ABoxAssertion) -> Result<(), OntologyError> {
        match &a {
            ABoxAssertion::Class(i, c) => {
                self.require(i, NameKind::Individual)?;
                self.require(c, NameKind::Class)?;
            }
            ABoxAssertion::Object(s, p, o) => {
                self.require(s, NameKind::Individual)?;
                self.require(p, NameKind::ObjectProperty)?;
                self.require(o, NameKind::Individual)?;
            }
            ABoxAssertion::Data(s, p, _) => {
                self.require(s, NameKind::Individual)?;
                self.require(p, NameKind::DataProperty)?;
            }
        }
        self.abox.push(a);
        Ok(())
    }

    pub fn is_class(&self, n: &str) -> bool {
        self.classes.contains(n)
    }

    pub fn is_object_property(&self, n: &str) -> bool {
        self.object_properties.contains(n)
    }

    pub fn is_data_property(&self, n: &str) -> bool {
        self.data_properties.contains(n)
    }

    pub fn is_individual(&self, n: &str) -> bool {
        self.individuals.contains(n)
    }
}

/// Concrete-syntax printer; `parse_ontology(o.to_string()) == o`.
impl fmt::Display for Ontology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.classes {
            writeln!(f, "Class({c})")?;
        }
        for p in &self.object_properties {
            writeln!(f, "ObjectProperty({p})")?;
        }
        for p in &self.data_properties {
            writeln!(f, "DataProperty({p})")?;
        }
        for i in &self.individuals {
            writeln!(f, "Individual({i})")?;
        }
        for ax in &self.tbox {
            writeln!(f, "{ax}")?;
        }
        for a in &self.abox {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}
