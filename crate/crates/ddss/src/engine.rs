//! Deterministic tick-synchronous execution of a rule graph.
//!
//! Each incoming event is one tick. An actor fires when its driving
//! actor(s) fired this tick; scalar inputs are sample-and-hold so a
//! comparator fed by two sources fires whenever either side updates.
//! Event tokens are per-tick and optional: `Fired(None)` means "fired,
//! nothing detected", which is what run-length actors count against.

use std::collections::BTreeMap;

use crate::graph::{ActorKind, DataflowGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Output {
    Scalar(f64),
    Event(Option<f64>),
}

#[derive(Debug, Clone, Default)]
struct ActorState {
    window: Vec<f64>,
    run: usize,
    above: usize,
    below: usize,
    state_on: bool,
    score: f64,
    held: BTreeMap<String, f64>,
}

/// An outgoing emission from a sink during one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub sink: String,
    pub event_class: String,
    pub indicator: String,
    pub value: f64,
    /// Numeric trouble upstream (NaN or infinity) flags the emission.
    pub degraded: bool,
}

pub struct Engine {
    graph: DataflowGraph,
    order: Vec<String>,
    states: BTreeMap<String, ActorState>,
}

impl Engine {
    pub fn new(graph: &DataflowGraph) -> Engine {
        let order = graph.topo_order();
        let mut states = BTreeMap::new();
        for a in &graph.actors {
            let mut st = ActorState::default();
            if a.kind == ActorKind::HealthScore {
                st.score = 1.0;
            }
            states.insert(a.id.clone(), st);
        }
        Engine { graph: graph.clone(), order, states }
    }

    pub fn graph(&self) -> &DataflowGraph {
        &self.graph
    }

    /// Process one incoming event through the whole graph.
    pub fn step(&mut self, source: &str, class: &str, value: f64) -> Vec<Emission> {
        let mut fired: BTreeMap<String, Output> = BTreeMap::new();
        let mut emissions = Vec::new();

        for id in &self.order.clone() {
            let actor = self.graph.actor(id).expect("topo order is over actors").clone();
            let input = |port: &str, fired: &BTreeMap<String, Output>| -> Option<Output> {
                self.graph
                    .edges
                    .iter()
                    .find(|e| e.to == *id && e.to_port == port)
                    .and_then(|e| fired.get(&e.from).copied())
            };

            let out = match actor.kind {
                ActorKind::Source => {
                    if actor.param("source") != Some(source) {
                        continue;
                    }
                    if let Some(filter) = actor.param("class") {
                        if filter != class {
                            continue;
                        }
                    }
                    Some(Output::Scalar(value))
                }
                ActorKind::Threshold => match input("in", &fired) {
                    Some(Output::Scalar(v)) => {
                        let limit = actor.f64_param("limit").unwrap_or(f64::MAX);
                        Some(Output::Event((v > limit).then_some(v)))
                    }
                    _ => None,
                },
                ActorKind::MovingAverage => match input("in", &fired) {
                    Some(Output::Scalar(v)) => {
                        let window = actor.usize_param("window").unwrap_or(1).max(1);
                        let st = self.states.get_mut(&actor.id).unwrap();
                        st.window.push(v);
                        if st.window.len() > window {
                            st.window.remove(0);
                        }
                        let mean = st.window.iter().sum::<f64>() / st.window.len() as f64;
                        Some(Output::Scalar(mean))
                    }
                    _ => None,
                },
                ActorKind::Comparator => {
                    let st = self.states.get_mut(&actor.id).unwrap();
                    let mut updated = false;
                    for port in ["in1", "in2"] {
                        if let Some(Output::Scalar(v)) = input(port, &fired) {
                            st.held.insert(port.into(), v);
                            updated = true;
                        }
                    }
                    match (updated, st.held.get("in1"), st.held.get("in2")) {
                        (true, Some(a), Some(b)) => {
                            let pass = match actor.param("op") {
                                Some("gt") => a > b,
                                Some("ge") => a >= b,
                                Some("lt") => a < b,
                                Some("le") => a <= b,
                                _ => a == b,
                            };
                            Some(Output::Event(pass.then(|| a - b)))
                        }
                        _ => None,
                    }
                }
                ActorKind::Debounce => match input("in", &fired) {
                    Some(Output::Event(tok)) => {
                        let n = actor.usize_param("n").unwrap_or(1).max(1);
                        let st = self.states.get_mut(&actor.id).unwrap();
                        match tok {
                            Some(v) => {
                                st.run += 1;
                                Some(Output::Event((st.run == n).then_some(v)))
                            }
                            None => {
                                st.run = 0;
                                Some(Output::Event(None))
                            }
                        }
                    }
                    _ => None,
                },
                ActorKind::StateDetector => match input("in", &fired) {
                    Some(Output::Event(tok)) => {
                        let on = actor.usize_param("on").unwrap_or(1).max(1);
                        let off = actor.usize_param("off").unwrap_or(1).max(1);
                        let st = self.states.get_mut(&actor.id).unwrap();
                        let mut out = None;
                        match tok {
                            Some(_) => {
                                st.above += 1;
                                st.below = 0;
                                if !st.state_on && st.above >= on {
                                    st.state_on = true;
                                    out = Some(1.0);
                                }
                            }
                            None => {
                                st.below += 1;
                                st.above = 0;
                                if st.state_on && st.below >= off {
                                    st.state_on = false;
                                    out = Some(0.0);
                                }
                            }
                        }
                        Some(Output::Event(out))
                    }
                    _ => None,
                },
                ActorKind::HealthScore => match input("in", &fired) {
                    Some(Output::Event(tok)) => {
                        let penalty = actor.f64_param("penalty").unwrap_or(0.1);
                        let recovery = actor.f64_param("recovery").unwrap_or(0.01);
                        let st = self.states.get_mut(&actor.id).unwrap();
                        st.score = match tok {
                            Some(_) => (st.score - penalty).max(0.0),
                            None => (st.score + recovery).min(1.0),
                        };
                        Some(Output::Scalar(st.score))
                    }
                    _ => None,
                },
                ActorKind::Sink => {
                    let emitted = match input("in", &fired) {
                        Some(Output::Scalar(v)) => Some(v),
                        Some(Output::Event(tok)) => tok,
                        None => None,
                    };
                    if let Some(v) = emitted {
                        emissions.push(Emission {
                            sink: actor.id.clone(),
                            event_class: actor.param("event").unwrap_or_default().to_string(),
                            indicator: actor.param("indicator").unwrap_or_default().to_string(),
                            value: if v.is_finite() { v } else { 0.0 },
                            degraded: !v.is_finite(),
                        });
                    }
                    continue;
                }
            };

            if let Some(out) = out {
                fired.insert(actor.id.clone(), out);
            }
        }
        emissions
    }
}
