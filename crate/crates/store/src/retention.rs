//! Recency-based retention: drop event rows older than a sliding window.

use std::collections::BTreeSet;

use crate::store::{DataStore, StoreError};
use crate::time::parse_timestamp;

/// Retention policy over a set of event tables.
///
/// `time_property` names the data property whose values carry the event
/// timestamps; its table must be part of the scope so that ages and row
/// removal stay consistent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetentionPolicy {
    pub window_secs: u64,
    pub scope: BTreeSet<String>,
    pub time_property: String,
}

impl RetentionPolicy {
    pub fn new(window_secs: u64, scope: impl IntoIterator<Item = String>, time_property: &str) -> Self {
        assert!(window_secs > 0, "retention window must be positive");
        RetentionPolicy {
            window_secs,
            scope: scope.into_iter().collect(),
            time_property: time_property.to_string(),
        }
    }
}

impl DataStore {
    /// Delete all scoped rows older than `now - window`, cascading within
    /// the scoped tables so no property row references a deleted event id.
    /// Non-scoped tables are never touched. Returns rows deleted.
    pub fn apply_retention(
        &mut self,
        policy: &RetentionPolicy,
        now: u64,
    ) -> Result<usize, StoreError> {
        let (time_table, _, _) = self
            .mapping()
            .data_prop_map
            .get(&policy.time_property)
            .cloned()
            .ok_or_else(|| StoreError::MissingTimestampColumn(policy.time_property.clone()))?;
        if !policy.scope.contains(&time_table) {
            return Err(StoreError::MissingTimestampColumn(format!(
                "table `{time_table}` for `{}` is not in the retention scope",
                policy.time_property
            )));
        }
        let cutoff = now.saturating_sub(policy.window_secs);

        let expired: BTreeSet<String> = self
            .table(&time_table)?
            .rows
            .iter()
            .filter(|row| parse_timestamp(&row[1]).is_some_and(|t| t < cutoff))
            .map(|row| row[0].clone())
            .collect();
        if expired.is_empty() {
            return Ok(0);
        }

        let mut deleted = 0;
        for name in &policy.scope {
            let table = self.table_mut(name)?;
            // Id-bearing columns only; literal value columns are left alone.
            let id_cols: Vec<usize> = table
                .columns
                .iter()
                .enumerate()
                .filter(|(_, c)| matches!(c.as_str(), "id" | "s" | "o"))
                .map(|(i, _)| i)
                .collect();
            let before = table.rows.len();
            table.rows.retain(|row| !id_cols.iter().any(|i| expired.contains(&row[*i])));
            deleted += before - table.rows.len();
        }
        Ok(deleted)
    }
}
