//! Conjunctive-query compilation over QL ontologies: a SPARQL-like query
//! subset is rewritten into a union of conjunctive queries whose evaluation
//! over the raw ABox yields exactly the certain answers, and the union is
//! compiled to SQL text over the mapped schema.
//!
//! [`chase_oracle`] computes the same answers by materializing the chase and
//! matching subgraphs directly; it shares nothing with the rewriting path and
//! serves as the ground truth in the test suites.

mod answers;
mod chase;
mod cq;
mod perfectref;
mod sqlgen;

pub use answers::certain_answers;
pub use chase::chase_oracle;
pub use cq::{parse_cq, Atom, ConjunctiveQuery, Term, UnionOfCqs};
pub use perfectref::perfect_rewrite;
pub use sqlgen::compile_to_sql;

use ontomon_store::StoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("query syntax error: {0}")]
    Syntax(String),
    #[error("undeclared name `{0}`")]
    UndeclaredName(String),
    #[error("head variable `?{0}` does not occur in the body")]
    UnboundHeadVariable(String),
    #[error("non-QL axiom in scope: {0}")]
    NonQlAxiomEncountered(String),
    #[error("unmapped symbol `{0}`")]
    UnmappedSymbol(String),
    #[error("instance too large for the chase oracle ({0} assertions)")]
    InstanceTooLarge(usize),
    #[error(transparent)]
    Store(#[from] StoreError),
}
