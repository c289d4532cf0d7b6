//! Relational datastore: ontology-derived schema, an in-memory executor for
//! the emitted SQL subset, recency-based retention, and CSV bulk transfer.
//!
//! The executor makes the repository self-contained; the DDL and every query
//! are also plain standard-SQL text, so an external engine can be swapped in
//! behind the same surface.

mod csvio;
mod retention;
mod schema;
mod sql;
mod store;
pub mod time;

pub use csvio::{export_table_csv, import_table_csv};
pub use retention::RetentionPolicy;
pub use schema::{generate_schema, Column, ColumnType, Mapping, RelationalSchema, TableDef};
pub use sql::{escape_literal as sql_escape_literal, Dialect, ResultSet, SqlText};
pub use store::{DataStore, StoreError};
