//! Diagnostic decision-support service generation: a domain ontology plus a
//! dataflow rule graph compile into a relational store, typed in/out event
//! endpoints, and a deterministic rule engine behind a small HTTP surface.

mod bundle;
mod engine;
mod graph;
mod http;
mod service;

pub use bundle::{generate_ddss, load_bundle, write_bundle, DdssBundle, Endpoint, EndpointDir};
pub use engine::{Emission, Engine};
pub use graph::{parse_rule_graph, stage_order_ok, Actor, ActorKind, DataflowGraph, PortType};
pub use http::{serve, ServeHandle};
pub use service::{DdssService, Direction, EventRecord, WireEvent};

use ontomon_core::OntologyError;
use ontomon_store::StoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DdssError {
    #[error("rule graph syntax error at line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("type mismatch on edge {0}")]
    TypeMismatch(String),
    #[error("cycle detected through actor `{0}`")]
    CycleDetected(String),
    #[error("unbound source: {0}")]
    UnboundSource(String),
    #[error("unbound sink: {0}")]
    UnboundSink(String),
    #[error("ontology lacks the dynamic-part pattern: missing {0}")]
    MissingDynamicPart(String),
    #[error("event class `{0}` is not a declared event class")]
    UnboundEventClass(String),
    #[error("unknown event class `{0}`")]
    UnknownEventClass(String),
    #[error("unknown data source `{0}`")]
    UnknownDataSource(String),
    #[error("unknown diagnostic indicator `{0}`")]
    UnknownIndicator(String),
    #[error("non-monotone timestamp for source `{data_source}`: {t} after {last}")]
    NonMonotoneTimestamp { data_source: String, t: u64, last: u64 },
    #[error("bundle: {0}")]
    Bundle(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}
