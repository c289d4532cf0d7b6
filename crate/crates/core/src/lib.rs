//! Ontology core: vocabulary, TBox/ABox model, text syntax, QL profile
//! validation, taxonomy closure, and ABox saturation.
//!
//! The ontology language is the unqualified-existential fragment of OWL 2 QL
//! plus one non-QL extension, [`Axiom::ConditionalType`], a classification
//! rule consumed only by saturation (never by query rewriting).

mod closure;
mod model;
mod parse;
mod profile;
mod saturate;

pub use closure::{closure, Role, TaxonomyClosure};
pub use model::{ABoxAssertion, Axiom, ClassExpr, NameKind, Ontology, OntologyError};
pub use parse::parse_ontology;
pub use profile::{validate_ql_profile, ProfileReport, Violation, ViolationCode};
pub use saturate::{check_consistency, saturate_abox};
