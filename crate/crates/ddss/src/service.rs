//! The running service: validated ingestion, time-ordered engine stepping,
//! persisted records, and since-timestamp polling.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use ontomon_core::ABoxAssertion;
use ontomon_store::DataStore;
use serde::{Deserialize, Serialize};

use crate::bundle::{DdssBundle, EndpointDir};
use crate::engine::Engine;
use crate::DdssError;

/// Wire format for incoming events.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireEvent {
    pub class: String,
    pub t: u64,
    pub source: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub id: String,
    pub direction: Direction,
    pub event_class: String,
    pub t: u64,
    pub source: String,
    pub payload: f64,
    /// Diagnostic indicator (`reports`); outgoing records always carry one.
    pub indicator: Option<String>,
    pub degraded: bool,
}

pub struct DdssService {
    bundle: DdssBundle,
    engine: Engine,
    store: DataStore,
    queue: BinaryHeap<Reverse<(u64, u64)>>,
    queued: BTreeMap<(u64, u64), WireEvent>,
    last_t: BTreeMap<String, u64>,
    seq: u64,
    outgoing: Vec<EventRecord>,
}

impl DdssService {
    /// Stand up the service: generated schema, static part ingested.
    pub fn new(bundle: DdssBundle) -> Result<DdssService, DdssError> {
        let engine = Engine::new(&bundle.graph);
        let mut store = DataStore::new(&bundle.ontology);
        store.ingest(&bundle.ontology.abox)?;
        Ok(DdssService {
            bundle,
            engine,
            store,
            queue: BinaryHeap::new(),
            queued: BTreeMap::new(),
            last_t: BTreeMap::new(),
            seq: 0,
        outgoing: Vec::new(),
        })
    }

    pub fn bundle(&self) -> &DdssBundle {
        &self.bundle
    }

    pub fn store(&self) -> &DataStore {
        &self.store
    }

    /// Validate, persist, and enqueue one incoming event.
    pub fn ingest_event(&mut self, raw: &WireEvent) -> Result<EventRecord, DdssError> {
        let known = self
            .bundle
            .endpoints
            .iter()
            .any(|e| e.direction == EndpointDir::In && e.event_class == raw.class);
        if !known {
            return Err(DdssError::UnknownEventClass(raw.class.clone()));
        }
        if !self.bundle.data_sources.contains(&raw.source) {
            return Err(DdssError::UnknownDataSource(raw.source.clone()));
        }
        if let Some(last) = self.last_t.get(&raw.source) {
            if raw.t < *last {
                return Err(DdssError::NonMonotoneTimestamp {
                    data_source: raw.source.clone(),
                    t: raw.t,
                    last: *last,
                });
            }
        }
        self.last_t.insert(raw.source.clone(), raw.t);

        self.seq += 1;
        let id = format!("in_{}", self.seq);
        let mut rows = vec![
            ABoxAssertion::Class(id.clone(), raw.class.clone()),
            ABoxAssertion::Data(id.clone(), "hasTimestamp".into(), raw.t.to_string()),
            ABoxAssertion::Data(id.clone(), "hasValue".into(), format!("{}", raw.value)),
            ABoxAssertion::Object(raw.source.clone(), "generates".into(), id.clone()),
        ];
        if let Some(ddss) = &self.bundle.ddss_individual {
            rows.push(ABoxAssertion::Object(ddss.clone(), "receives".into(), id.clone()));
        }
        self.store.ingest(&rows)?;

        self.queue.push(Reverse((raw.t, self.seq)));
        self.queued.insert((raw.t, self.seq), raw.clone());
        Ok(EventRecord {
            id,
            direction: Direction::In,
            event_class: raw.class.clone(),
            t: raw.t,
            source: raw.source.clone(),
            payload: raw.value,
            indicator: None,
            degraded: false,
        })
    }

    /// Drain the queue in timestamp order through the rule engine; emitted
    /// diagnostics are persisted and returned.
    pub fn step_engine(&mut self) -> Result<Vec<EventRecord>, DdssError> {
        let mut out = Vec::new();
        while let Some(Reverse(key)) = self.queue.pop() {
            let event = self.queued.remove(&key).expect("queued event present");
            let emissions = self.engine.step(&event.source, &event.class, event.value);
            for e in emissions {
                self.seq += 1;
                let id = format!("out_{}", self.seq);
                let mut rows = vec![
                    ABoxAssertion::Class(id.clone(), e.event_class.clone()),
                    ABoxAssertion::Data(id.clone(), "hasTimestamp".into(), event.t.to_string()),
                    ABoxAssertion::Data(id.clone(), "hasValue".into(), format!("{}", e.value)),
                    ABoxAssertion::Object(id.clone(), "relatesTo".into(), event.source.clone()),
                    ABoxAssertion::Object(id.clone(), "reports".into(), e.indicator.clone()),
                ];
                if let Some(ddss) = &self.bundle.ddss_individual {
                    rows.push(ABoxAssertion::Object(ddss.clone(), "sends".into(), id.clone()));
                }
                self.store.ingest(&rows)?;
                out.push(EventRecord {
                    id,
                    direction: Direction::Out,
                    event_class: e.event_class,
                    t: event.t,
                    source: event.source.clone(),
                    payload: e.value,
                    indicator: Some(e.indicator),
                    degraded: e.degraded,
                });
            }
        }
        self.outgoing.extend(out.iter().cloned());
        Ok(out)
    }

    /// Outgoing records of `class` with `t >= since`, in emission order.
    pub fn poll(&self, class: &str, since: u64) -> Vec<EventRecord> {
        self.outgoing
            .iter()
            .filter(|r| r.event_class == class && r.t >= since)
            .cloned()
            .collect()
    }

    pub fn outgoing_log(&self) -> &[EventRecord] {
        &self.outgoing
    }
}
