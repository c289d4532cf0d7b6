//! End-to-end pipeline: rewrite, compile, execute.

use ontomon_core::Ontology;
use ontomon_store::{DataStore, ResultSet};

use crate::cq::ConjunctiveQuery;
use crate::perfectref::perfect_rewrite;
use crate::sqlgen::compile_to_sql;
use crate::RewriteError;

/// Certain answers of `q` over the ontology, evaluated against a store that
/// was populated from the raw (unsaturated) ABox.
pub fn certain_answers(
    q: &ConjunctiveQuery,
    o: &Ontology,
    store: &DataStore,
) -> Result<ResultSet, RewriteError> {
    let ucq = perfect_rewrite(q, o)?;
    let sql = compile_to_sql(&ucq, store.mapping())?;
    Ok(store.execute(&sql)?)
}
