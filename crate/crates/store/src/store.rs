//! The in-memory store and query executor.
//!
//! Concurrency contract: single writer, multiple readers. `ingest` and
//! `apply_retention` take `&mut self` while `execute` takes `&self`, so the
//! borrow checker enforces the contract at compile time.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use ontomon_core::{ABoxAssertion, Ontology};
use thiserror::Error;

use crate::schema::{generate_schema, Mapping, RelationalSchema};
use crate::sql::{parse_sql, Operand, ResultSet, SelectBlock, SqlText};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StoreError {
    #[error("unmapped symbol `{0}`")]
    UnmappedSymbol(String),
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("dialect violation: {0}")]
    DialectViolation(String),
    #[error("missing timestamp column: {0}")]
    MissingTimestampColumn(String),
    #[error("csv error: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: BTreeSet<Vec<String>>,
}

#[derive(Debug, Clone)]
pub struct DataStore {
    schema: RelationalSchema,
    mapping: Mapping,
    tables: BTreeMap<String, Table>,
}

impl DataStore {
    /// Build an empty store for the ontology's generated schema.
    pub fn new(o: &Ontology) -> Self {
        let (schema, mapping) = generate_schema(o);
        let mut tables = BTreeMap::new();
        for t in &schema.tables {
            tables.insert(
                t.name.clone(),
                Table { columns: t.columns.iter().map(|c| c.name.clone()).collect(), rows: BTreeSet::new() },
            );
        }
        DataStore { schema, mapping, tables }
    }

    pub fn schema(&self) -> &RelationalSchema {
        &self.schema
    }

    pub fn mapping(&self) -> &Mapping {
        &self.mapping
    }

    pub fn table(&self, name: &str) -> Result<&Table, StoreError> {
        self.tables.get(name).ok_or_else(|| StoreError::UnknownTable(name.into()))
    }

    pub(crate) fn table_mut(&mut self, name: &str) -> Result<&mut Table, StoreError> {
        self.tables.get_mut(name).ok_or_else(|| StoreError::UnknownTable(name.into()))
    }

    pub fn row_count(&self, name: &str) -> Result<usize, StoreError> {
        Ok(self.table(name)?.rows.len())
    }

    /// Insert assertions through the mapping. Idempotent per assertion;
    /// returns the number of rows actually inserted.
    pub fn ingest(&mut self, assertions: &[ABoxAssertion]) -> Result<usize, StoreError> {
        let mut inserted = 0;
        for a in assertions {
            let (table, row) = match a {
                ABoxAssertion::Class(i, c) => {
                    let t = self
                        .mapping
                        .class_map
                        .get(c)
                        .ok_or_else(|| StoreError::UnmappedSymbol(c.clone()))?;
                    (t.clone(), vec![i.clone()])
                }
                ABoxAssertion::Object(s, p, o) => {
                    let (t, _, _) = self
                        .mapping
                        .obj_prop_map
                        .get(p)
                        .ok_or_else(|| StoreError::UnmappedSymbol(p.clone()))?;
                    (t.clone(), vec![s.clone(), o.clone()])
                }
                ABoxAssertion::Data(s, p, v) => {
                    let (t, _, _) = self
                        .mapping
                        .data_prop_map
                        .get(p)
                        .ok_or_else(|| StoreError::UnmappedSymbol(p.clone()))?;
                    (t.clone(), vec![s.clone(), v.clone()])
                }
            };
            if self.table_mut(&table)?.rows.insert(row) {
                inserted += 1;
            }
        }
        Ok(inserted)
    }

    /// Reconstruct the asserted ABox from the stored rows.
    pub fn read_back(&self) -> Vec<ABoxAssertion> {
        let mut out = Vec::new();
        for (class, table) in &self.mapping.class_map {
            if let Some(t) = self.tables.get(table) {
                for row in &t.rows {
                    out.push(ABoxAssertion::Class(row[0].clone(), class.clone()));
                }
            }
        }
        for (prop, (table, _, _)) in &self.mapping.obj_prop_map {
            if let Some(t) = self.tables.get(table) {
                for row in &t.rows {
                    out.push(ABoxAssertion::Object(row[0].clone(), prop.clone(), row[1].clone()));
                }
            }
        }
        for (prop, (table, _, _)) in &self.mapping.data_prop_map {
            if let Some(t) = self.tables.get(table) {
                for row in &t.rows {
                    out.push(ABoxAssertion::Data(row[0].clone(), prop.clone(), row[1].clone()));
                }
            }
        }
        out.sort();
        out
    }

    /// Execute a query in the emitted dialect subset.
    pub fn execute(&self, sql: &SqlText) -> Result<ResultSet, StoreError> {
        let blocks = parse_sql(sql)?;
        let columns = blocks[0].items.len();
        let mut rows = BTreeSet::new();
        for block in &blocks {
            rows.extend(self.eval_block(block)?);
        }
        Ok(ResultSet { columns, rows })
    }

    fn eval_block(&self, block: &SelectBlock) -> Result<BTreeSet<Vec<String>>, StoreError> {
        // Column layout of the joined tuple: (alias, col) -> position.
        let mut layout: HashMap<(String, String), usize> = HashMap::new();
        let mut alias_tables: Vec<(&str, &Table)> = Vec::new();
        let mut width = 0;
        for (table, alias) in &block.from {
            let t = self.table(table)?;
            if alias_tables.iter().any(|(a, _)| *a == alias.as_str()) {
                return Err(StoreError::DialectViolation(format!("duplicate alias `{alias}`")));
            }
            for (i, col) in t.columns.iter().enumerate() {
                layout.insert((alias.clone(), col.clone()), width + i);
            }
            width += t.columns.len();
            alias_tables.push((alias.as_str(), t));
        }
        let col_pos = |op: &Operand| -> Result<Option<usize>, StoreError> {
            match op {
                Operand::Lit(_) => Ok(None),
                Operand::Col { alias, col } => layout
                    .get(&(alias.clone(), col.clone()))
                    .copied()
                    .map(Some)
                    .ok_or_else(|| StoreError::UnknownColumn(format!("{alias}.{col}"))),
            }
        };
        // Validate all referenced columns up front.
        for op in block.items.iter().chain(block.preds.iter().flat_map(|(l, r)| [l, r])) {
            col_pos(op)?;
        }

        // Incremental hash join in FROM order. A predicate is applied at the
        // first step where both sides are available.
        let mut bound_width = 0;
        let mut applied = vec![false; block.preds.len()];
        let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
        for (alias, table) in &alias_tables {
            let step_base = bound_width;
            let step_cols = table.columns.len();

            // Classify predicates touching this step.
            let mut local_eq: Vec<(usize, String)> = Vec::new(); // (pos in row, literal)
            let mut local_pair: Vec<(usize, usize)> = Vec::new(); // both cols in this row
            let mut join: Vec<(usize, usize)> = Vec::new(); // (pos in row, pos in prior tuple)
            let mut cross: Vec<(usize, usize)> = Vec::new(); // both already bound
            let mut const_fail = false;
            for (pi, (l, r)) in block.preds.iter().enumerate() {
                if applied[pi] {
                    continue;
                }
                let lp = col_pos(l)?;
                let rp = col_pos(r)?;
                let in_step = |p: &Option<usize>| {
                    p.is_some_and(|i| i >= step_base && i < step_base + step_cols)
                };
                let is_bound = |p: &Option<usize>| p.is_some_and(|i| i < step_base);
                match (lp, rp) {
                    (None, None) => {
                        let (Operand::Lit(a), Operand::Lit(b)) = (l, r) else { unreachable!() };
                        if a != b {
                            const_fail = true;
                        }
                        applied[pi] = true;
                    }
                    (Some(i), None) if in_step(&lp) => {
                        let Operand::Lit(b) = r else { unreachable!() };
                        local_eq.push((i - step_base, b.clone()));
                        applied[pi] = true;
                    }
                    (None, Some(i)) if in_step(&rp) => {
                        let Operand::Lit(a) = l else { unreachable!() };
                        local_eq.push((i - step_base, a.clone()));
                        applied[pi] = true;
                    }
                    (Some(i), Some(j)) if in_step(&lp) && in_step(&rp) => {
                        local_pair.push((i - step_base, j - step_base));
                        applied[pi] = true;
                    }
                    (Some(i), Some(j)) if in_step(&lp) && is_bound(&rp) => {
                        join.push((i - step_base, j));
                        applied[pi] = true;
                    }
                    (Some(i), Some(j)) if is_bound(&lp) && in_step(&rp) => {
                        join.push((j - step_base, i));
                        applied[pi] = true;
                    }
                    (Some(i), Some(j)) if is_bound(&lp) && is_bound(&rp) => {
                        cross.push((i, j));
                        applied[pi] = true;
                    }
                    _ => {} // involves a later table; handled at that step
                }
            }
            if const_fail {
                return Ok(BTreeSet::new());
            }
            let _ = alias;

            // Cross predicates between already-bound tables.
            if !cross.is_empty() {
                tuples.retain(|t| cross.iter().all(|(i, j)| t[*i] == t[*j]));
            }

            // Index the step's rows by join key.
            let mut index: HashMap<Vec<&str>, Vec<&Vec<String>>> = HashMap::new();
            'rows: for row in &table.rows {
                for (c, lit) in &local_eq {
                    if &row[*c] != lit {
                        continue 'rows;
                    }
                }
                for (a, b) in &local_pair {
                    if row[*a] != row[*b] {
                        continue 'rows;
                    }
                }
                let key: Vec<&str> = join.iter().map(|(c, _)| row[*c].as_str()).collect();
                index.entry(key).or_default().push(row);
            }

            let mut next = Vec::new();
            for tuple in &tuples {
                let key: Vec<&str> = join.iter().map(|(_, j)| tuple[*j].as_str()).collect();
                if let Some(rows) = index.get(&key) {
                    for row in rows {
                        let mut t2 = tuple.clone();
                        t2.extend(row.iter().cloned());
                        next.push(t2);
                    }
                }
            }
            tuples = next;
            bound_width += step_cols;
            if tuples.is_empty() {
                return Ok(BTreeSet::new());
            }
        }

        let mut out = BTreeSet::new();
        for tuple in &tuples {
            let mut row = Vec::with_capacity(block.items.len());
            for item in &block.items {
                match item {
                    Operand::Lit(s) => row.push(s.clone()),
                    Operand::Col { .. } => {
                        let pos = col_pos(item)?.expect("validated above");
                        row.push(tuple[pos].clone());
                    }
                }
            }
            out.insert(row);
        }
        Ok(out)
    }
}
