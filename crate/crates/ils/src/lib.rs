//! Intermodal logistics scenario generator, KPI computation over three
//! query paths (native SQL, ontology-mediated, event-log oracle), and the
//! per-day latency benchmark with trend analysis.

mod abox;
mod bench;
mod fixture;
mod generate;
mod kpi;
mod trend;

pub use abox::{event_assertions, ils_ontology, static_assertions, ILS_ONTOLOGY};
pub use bench::{
    bench_report_csv, plot_data_csv, run_benchmark, trend_summary_csv, BenchMode, BenchParams,
    BenchmarkReport, DayMeasure, TrendStat,
};
pub use fixture::{default_fixture, NetworkFixture, Route, ScheduledStop, Train};
pub use generate::{
    day_period, event_log_from_csv, event_log_to_csv, generate_scenario, validate_event_log,
    EventKind, EventLog, GenParams, Party, SimEvent, BASE_EPOCH,
};
pub use kpi::{compute_kpi, event_scope_tables, KpiContext, KpiPath, KpiResult, Period};
pub use trend::trend_test;

use ontomon_core::OntologyError;
use ontomon_rewrite::RewriteError;
use ontomon_store::StoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IlsError {
    #[error("invalid params: {0}")]
    InvalidParams(String),
    #[error("unknown KPI `{0}`")]
    UnknownKpi(String),
    #[error("degenerate series: all x values are equal")]
    DegenerateSeries,
    #[error("event log: {0}")]
    EventLog(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}
