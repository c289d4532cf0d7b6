//! CSV bulk import/export for event tables. Header row, RFC 4180 quoting.

use crate::store::{DataStore, StoreError};

fn write_field(out: &mut String, field: &str) {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        out.push('"');
        out.push_str(&field.replace('"', "\"\""));
        out.push('"');
    } else {
        out.push_str(field);
    }
}

pub(crate) fn write_row(out: &mut String, fields: &[String]) {
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_field(out, f);
    }
    out.push('\n');
}

pub(crate) fn parse_row(line: &str) -> Result<Vec<String>, StoreError> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut chars = line.chars().peekable();
    loop {
        match chars.peek() {
            Some('"') => {
                chars.next();
                loop {
                    match chars.next() {
                        Some('"') => {
                            if chars.peek() == Some(&'"') {
                                chars.next();
                                cur.push('"');
                            } else {
                                break;
                            }
                        }
                        Some(c) => cur.push(c),
                        None => return Err(StoreError::Csv("unterminated quoted field".into())),
                    }
                }
            }
            _ => {
                while let Some(&c) = chars.peek() {
                    if c == ',' {
                        break;
                    }
                    cur.push(c);
                    chars.next();
                }
            }
        }
        match chars.next() {
            Some(',') => {
                fields.push(std::mem::take(&mut cur));
            }
            None => {
                fields.push(cur);
                return Ok(fields);
            }
            Some(c) => return Err(StoreError::Csv(format!("unexpected `{c}` after field"))),
        }
    }
}

/// Dump one table as CSV with a header row; rows come out sorted.
pub fn export_table_csv(store: &DataStore, table: &str) -> Result<String, StoreError> {
    let t = store.table(table)?;
    let mut out = String::new();
    write_row(&mut out, &t.columns);
    for row in &t.rows {
        write_row(&mut out, row);
    }
    Ok(out)
}

/// Load rows from CSV text; the header must match the table's columns.
/// Returns rows inserted (duplicates are ignored).
pub fn import_table_csv(store: &mut DataStore, table: &str, text: &str) -> Result<usize, StoreError> {
    let expected = store.table(table)?.columns.clone();
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| StoreError::Csv("missing header row".into()))?;
    if parse_row(header)? != expected {
        return Err(StoreError::Csv(format!(
            "header mismatch for `{table}`: expected {expected:?}"
        )));
    }
    let mut inserted = 0;
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let row = parse_row(line)?;
        if row.len() != expected.len() {
            return Err(StoreError::Csv(format!("row arity mismatch in `{table}`")));
        }
        if store.table_mut(table)?.rows.insert(row) {
            inserted += 1;
        }
    }
    Ok(inserted)
}
