//! Streaming condition analyzer for traction-group temperatures: threshold
//! pattern detection, individual materialization, saturation-based
//! classification, and the lazy/eager fact-lifecycle protocol.

mod classify;
mod detect;
mod materialize;
mod scenario;

pub use classify::{classify, Classification, ClassificationResult, IndividualKind};
pub use detect::{DetectorState, EventKind, ObservationEvent, Sample, SeverityRange};
pub use materialize::{materialize, AboxDelta};
pub use scenario::{
    build_scenario, metrics_csv, run_scenario, scenario_from_csv, scenario_to_csv, Scenario,
    ScenarioMetrics, Strategy, TRACTION_VARIABLES,
};

use ontomon_core::OntologyError;
use thiserror::Error;

/// The traction diagnosis fixture consumed by `classify`.
pub const TRACTION_ONTOLOGY: &str = include_str!("../../../fixtures/traction.onto");

#[derive(Debug, Error)]
pub enum CaError {
    #[error("out-of-order sample for variable {variable}: t={t} after t={last}")]
    OutOfOrderSample { variable: u32, t: u64, last: u64 },
    #[error("live-individual cap exceeded at round {0}")]
    CapExceeded(u32),
    #[error("inconsistent ABox: `{individual}` falls in disjoint classes `{c1}` and `{c2}`")]
    InconsistentABox { individual: String, c1: String, c2: String },
    #[error("scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}
