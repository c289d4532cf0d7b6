//! KPI computation over three query paths.
//!
//! * `Sql` — a native aggregate over the event tables: direct scans of the
//!   relational store, the moral equivalent of a compiled SQL plan with the
//!   aggregation pushed down. No ontology machinery is involved.
//! * `Obda` — the same retrieval phrased as a conjunctive query and pushed
//!   through rewrite → SQL text → executor, aggregated afterwards (the
//!   emitted query subset has no aggregates).
//! * `Oracle` — a linear scan of the raw event log; ground truth.

use std::collections::{BTreeSet, HashMap, HashSet};

use ontomon_core::Ontology;
use ontomon_rewrite::{certain_answers, parse_cq};
use ontomon_store::time::parse_timestamp;
use ontomon_store::DataStore;

use crate::generate::{EventKind, EventLog};
use crate::IlsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum KpiPath {
    Sql,
    Obda,
    Oracle,
}

impl KpiPath {
    pub fn label(&self) -> &'static str {
        match self {
            KpiPath::Sql => "sql",
            KpiPath::Obda => "obda",
            KpiPath::Oracle => "oracle",
        }
    }
}

/// Half-open time window `[start, end)` in epoch seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Period {
    pub start: u64,
    pub end: u64,
}

impl Period {
    pub fn contains(&self, t: u64) -> bool {
        t >= self.start && t < self.end
    }

    pub fn hours(&self) -> f64 {
        (self.end.saturating_sub(self.start)) as f64 / 3600.0
    }

    pub fn days(&self) -> f64 {
        self.hours() / 24.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KpiResult {
    pub name: String,
    pub period: Period,
    pub value: f64,
}

pub struct KpiContext<'a> {
    pub log: &'a EventLog,
    pub store: &'a DataStore,
    pub ontology: &'a Ontology,
    pub terminals: usize,
}

pub const KPI_UNLOADED_PER_HOUR: &str = "avg_itus_unloaded_per_hour";
pub const KPI_DWELL_MINUTES: &str = "avg_origin_dwell_minutes";
pub const KPI_TRAINS_PER_TERMINAL_DAY: &str = "trains_per_terminal_day";

/// Tables covered by event retention for this vocabulary.
pub fn event_scope_tables() -> BTreeSet<String> {
    [
        "gateinevent", "loadevent", "departevent", "arriveevent", "unloadevent", "gateoutevent",
        "occursat", "involvesitu", "involvestrain", "fororder", "attime",
    ]
    .map(String::from)
    .into()
}

/// Event ids of one class table.
fn native_ids<'s>(store: &'s DataStore, table: &str) -> Result<HashSet<&'s str>, IlsError> {
    Ok(store.table(table)?.rows.iter().map(|r| r[0].as_str()).collect())
}

/// Subject-keyed column map of a property table (`s -> o` / `s -> v`).
fn native_map<'s>(store: &'s DataStore, table: &str) -> Result<HashMap<&'s str, &'s str>, IlsError> {
    Ok(store.table(table)?.rows.iter().map(|r| (r[0].as_str(), r[1].as_str())).collect())
}

/// `(event, timestamp)` rows for one event class, over the chosen path.
fn event_times(
    ctx: &KpiContext,
    class: &str,
    kind: EventKind,
    path: KpiPath,
) -> Result<Vec<(String, u64)>, IlsError> {
    match path {
        KpiPath::Oracle => Ok(ctx
            .log
            .events
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| (format!("{}@{}", e.itu, e.t), e.t))
            .collect()),
        KpiPath::Sql => {
            let ids = native_ids(ctx.store, &class.to_lowercase())?;
            let mut out = Vec::with_capacity(ids.len());
            for row in &ctx.store.table("attime")?.rows {
                if ids.contains(row[0].as_str()) {
                    let t = parse_timestamp(&row[1]).ok_or_else(|| {
                        IlsError::EventLog(format!("bad timestamp `{}` on {}", row[1], row[0]))
                    })?;
                    out.push((row[0].clone(), t));
                }
            }
            Ok(out)
        }
        KpiPath::Obda => {
            let q = parse_cq(
                &format!("SELECT ?e ?ts WHERE {{ ?e a {class} . ?e atTime ?ts }}"),
                ctx.ontology,
            )?;
            let rows = certain_answers(&q, ctx.ontology, ctx.store)?.rows;
            let mut out = Vec::with_capacity(rows.len());
            for r in rows {
                let t = parse_timestamp(&r[1]).ok_or_else(|| {
                    IlsError::EventLog(format!("bad timestamp `{}` on {}", r[1], r[0]))
                })?;
                out.push((r[0].clone(), t));
            }
            Ok(out)
        }
    }
}

/// `(event, itu, timestamp)` rows for one event class.
fn event_itu_times(
    ctx: &KpiContext,
    class: &str,
    kind: EventKind,
    path: KpiPath,
) -> Result<Vec<(String, String, u64)>, IlsError> {
    match path {
        KpiPath::Oracle => Ok(ctx
            .log
            .events
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| (format!("{}@{}", e.itu, e.t), e.itu.clone(), e.t))
            .collect()),
        KpiPath::Sql => {
            let ids = native_ids(ctx.store, &class.to_lowercase())?;
            let itus = native_map(ctx.store, "involvesitu")?;
            let mut out = Vec::new();
            for row in &ctx.store.table("attime")?.rows {
                let id = row[0].as_str();
                if !ids.contains(id) {
                    continue;
                }
                let Some(itu) = itus.get(id) else { continue };
                let t = parse_timestamp(&row[1]).ok_or_else(|| {
                    IlsError::EventLog(format!("bad timestamp `{}` on {id}", row[1]))
                })?;
                out.push((id.to_string(), itu.to_string(), t));
            }
            Ok(out)
        }
        KpiPath::Obda => {
            let q = parse_cq(
                &format!(
                    "SELECT ?e ?i ?ts WHERE {{ ?e a {class} . ?e involvesItu ?i . ?e atTime ?ts }}"
                ),
                ctx.ontology,
            )?;
            let rows = certain_answers(&q, ctx.ontology, ctx.store)?.rows;
            let mut out = Vec::with_capacity(rows.len());
            for r in rows {
                let t = parse_timestamp(&r[2]).ok_or_else(|| {
                    IlsError::EventLog(format!("bad timestamp `{}` on {}", r[2], r[0]))
                })?;
                out.push((r[0].clone(), r[1].clone(), t));
            }
            Ok(out)
        }
    }
}

fn unloaded_per_hour(ctx: &KpiContext, period: Period, path: KpiPath) -> Result<f64, IlsError> {
    let rows = event_times(ctx, "UnloadEvent", EventKind::Unload, path)?;
    let count = rows.iter().filter(|(_, t)| period.contains(*t)).count();
    if count == 0 || period.hours() == 0.0 {
        return Ok(0.0);
    }
    Ok(count as f64 / period.hours())
}

fn origin_dwell_minutes(ctx: &KpiContext, period: Period, path: KpiPath) -> Result<f64, IlsError> {
    let gate_ins = event_itu_times(ctx, "GateInEvent", EventKind::GateIn, path)?;
    let loads = event_itu_times(ctx, "LoadEvent", EventKind::Load, path)?;
    let mut first_load: HashMap<&str, u64> = HashMap::new();
    for (_, itu, t) in &loads {
        first_load
            .entry(itu.as_str())
            .and_modify(|cur| *cur = (*cur).min(*t))
            .or_insert(*t);
    }
    let mut total_min = 0.0;
    let mut n = 0u64;
    for (_, itu, t_in) in &gate_ins {
        if !period.contains(*t_in) {
            continue;
        }
        if let Some(t_load) = first_load.get(itu.as_str()) {
            if t_load >= t_in {
                total_min += (t_load - t_in) as f64 / 60.0;
                n += 1;
            }
        }
    }
    Ok(if n == 0 { 0.0 } else { total_min / n as f64 })
}

fn trains_per_terminal_day(
    ctx: &KpiContext,
    period: Period,
    path: KpiPath,
) -> Result<f64, IlsError> {
    let rows: Vec<(String, String, u64)> = match path {
        KpiPath::Oracle => ctx
            .log
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Depart)
            .map(|e| (e.terminal.clone(), e.train.clone().unwrap_or_default(), e.t))
            .collect(),
        KpiPath::Sql => {
            let ids = native_ids(ctx.store, "departevent")?;
            let terminals = native_map(ctx.store, "occursat")?;
            let trains = native_map(ctx.store, "involvestrain")?;
            let mut out = Vec::new();
            for row in &ctx.store.table("attime")?.rows {
                let id = row[0].as_str();
                if !ids.contains(id) {
                    continue;
                }
                let (Some(term), Some(tr)) = (terminals.get(id), trains.get(id)) else {
                    continue;
                };
                let t = parse_timestamp(&row[1]).ok_or_else(|| {
                    IlsError::EventLog(format!("bad timestamp `{}` on {id}", row[1]))
                })?;
                out.push((term.to_string(), tr.to_string(), t));
            }
            out
        }
        KpiPath::Obda => {
            let q = parse_cq(
                "SELECT ?e ?term ?tr ?ts WHERE { ?e a DepartEvent . ?e occursAt ?term . \
                 ?e involvesTrain ?tr . ?e atTime ?ts }",
                ctx.ontology,
            )?;
            let mut out = Vec::new();
            for r in certain_answers(&q, ctx.ontology, ctx.store)?.rows {
                let t = parse_timestamp(&r[3]).ok_or_else(|| {
                    IlsError::EventLog(format!("bad timestamp `{}` on {}", r[3], r[0]))
                })?;
                out.push((r[1].clone(), r[2].clone(), t));
            }
            out
        }
    };
    let pairs: BTreeSet<(&str, &str)> = rows
        .iter()
        .filter(|(_, _, t)| period.contains(*t))
        .map(|(term, tr, _)| (term.as_str(), tr.as_str()))
        .collect();
    if pairs.is_empty() || period.days() == 0.0 || ctx.terminals == 0 {
        return Ok(0.0);
    }
    Ok(pairs.len() as f64 / (ctx.terminals as f64 * period.days()))
}

/// Compute one KPI over the chosen path; all paths agree exactly.
pub fn compute_kpi(
    ctx: &KpiContext,
    name: &str,
    period: Period,
    path: KpiPath,
) -> Result<KpiResult, IlsError> {
    let value = match name {
        KPI_UNLOADED_PER_HOUR => unloaded_per_hour(ctx, period, path)?,
        KPI_DWELL_MINUTES => origin_dwell_minutes(ctx, period, path)?,
        KPI_TRAINS_PER_TERMINAL_DAY => trains_per_terminal_day(ctx, period, path)?,
        other => return Err(IlsError::UnknownKpi(other.to_string())),
    };
    Ok(KpiResult { name: name.to_string(), period, value })
}
