//! Dataflow rule graph: text format, port typing, and structural checks.
//!
//! Format, one statement per line:
//!
//! ```text
//! actor <id> <Kind>(key=value, key=value)
//! edge <id>.<port> -> <id>.<port>
//! ```

use std::collections::BTreeMap;

use crate::DdssError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ActorKind {
    Source,
    Threshold,
    MovingAverage,
    Comparator,
    Debounce,
    StateDetector,
    HealthScore,
    Sink,
}

impl ActorKind {
    fn parse(s: &str) -> Option<ActorKind> {
        Some(match s {
            "Source" => ActorKind::Source,
            "Threshold" => ActorKind::Threshold,
            "MovingAverage" => ActorKind::MovingAverage,
            "Comparator" => ActorKind::Comparator,
            "Debounce" => ActorKind::Debounce,
            "StateDetector" => ActorKind::StateDetector,
            "HealthScore" => ActorKind::HealthScore,
            "Sink" => ActorKind::Sink,
            _ => return None,
        })
    }

    pub fn in_ports(&self) -> &'static [(&'static str, PortType)] {
        match self {
            ActorKind::Source => &[],
            ActorKind::Threshold => &[("in", PortType::Scalar)],
            ActorKind::MovingAverage => &[("in", PortType::Scalar)],
            ActorKind::Comparator => &[("in1", PortType::Scalar), ("in2", PortType::Scalar)],
            ActorKind::Debounce => &[("in", PortType::Event)],
            ActorKind::StateDetector => &[("in", PortType::Event)],
            ActorKind::HealthScore => &[("in", PortType::Event)],
            // A sink accepts either kind; `None` below encodes that.
            ActorKind::Sink => &[("in", PortType::Any)],
        }
    }

    pub fn out_port(&self) -> Option<PortType> {
        match self {
            ActorKind::Source => Some(PortType::Scalar),
            ActorKind::Threshold => Some(PortType::Event),
            ActorKind::MovingAverage => Some(PortType::Scalar),
            ActorKind::Comparator => Some(PortType::Event),
            ActorKind::Debounce => Some(PortType::Event),
            ActorKind::StateDetector => Some(PortType::Event),
            ActorKind::HealthScore => Some(PortType::Scalar),
            ActorKind::Sink => None,
        }
    }

    /// ISO 13374 stage index: data manipulation (1), state detection (2),
    /// health assessment (3). Sources and sinks sit outside the stages.
    pub fn stage(&self) -> Option<u8> {
        match self {
            ActorKind::MovingAverage => Some(1),
            ActorKind::Threshold
            | ActorKind::Comparator
            | ActorKind::Debounce
            | ActorKind::StateDetector => Some(2),
            ActorKind::HealthScore => Some(3),
            ActorKind::Source | ActorKind::Sink => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortType {
    Scalar,
    Event,
    Any,
}

impl PortType {
    fn accepts(&self, from: PortType) -> bool {
        matches!(self, PortType::Any) || *self == from
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Actor {
    pub id: String,
    pub kind: ActorKind,
    pub params: BTreeMap<String, String>,
}

impl Actor {
    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn f64_param(&self, key: &str) -> Option<f64> {
        self.param(key).and_then(|v| v.parse().ok())
    }

    pub fn usize_param(&self, key: &str) -> Option<usize> {
        self.param(key).and_then(|v| v.parse().ok())
    }
}

/// `(from actor, to actor, to port)`; the out port is unique per actor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub to_port: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataflowGraph {
    pub actors: Vec<Actor>,
    pub edges: Vec<Edge>,
    /// Original text, kept for bundle digests and copies.
    pub source_text: String,
}

impl DataflowGraph {
    pub fn actor(&self, id: &str) -> Option<&Actor> {
        self.actors.iter().find(|a| a.id == id)
    }

    pub fn sinks(&self) -> impl Iterator<Item = &Actor> {
        self.actors.iter().filter(|a| a.kind == ActorKind::Sink)
    }

    pub fn sources(&self) -> impl Iterator<Item = &Actor> {
        self.actors.iter().filter(|a| a.kind == ActorKind::Source)
    }

    /// Actor ids in topological order (validation guarantees acyclicity).
    pub fn topo_order(&self) -> Vec<String> {
        let mut incoming: BTreeMap<&str, usize> = self.actors.iter().map(|a| (a.id.as_str(), 0)).collect();
        for e in &self.edges {
            *incoming.get_mut(e.to.as_str()).unwrap() += 1;
        }
        let mut ready: Vec<&str> = self
            .actors
            .iter()
            .map(|a| a.id.as_str())
            .filter(|id| incoming[id] == 0)
            .collect();
        let mut out = Vec::new();
        while let Some(id) = ready.pop() {
            out.push(id.to_string());
            for e in &self.edges {
                if e.from == id {
                    let n = incoming.get_mut(e.to.as_str()).unwrap();
                    *n -= 1;
                    if *n == 0 {
                        ready.push(e.to.as_str());
                    }
                }
            }
        }
        out
    }
}

fn parse_actor_line(line: &str, lineno: usize) -> Result<Actor, DdssError> {
    let err = |msg: &str| DdssError::Syntax { line: lineno, msg: msg.into() };
    let rest = line.strip_prefix("actor").ok_or_else(|| err("expected `actor`"))?.trim();
    let (id, rest) = rest.split_once(char::is_whitespace).ok_or_else(|| err("missing actor id"))?;
    let rest = rest.trim();
    let open = rest.find('(').ok_or_else(|| err("missing `(`"))?;
    let kind_str = &rest[..open];
    let kind = ActorKind::parse(kind_str)
        .ok_or_else(|| err(&format!("unknown actor kind `{kind_str}`")))?;
    if !rest.ends_with(')') {
        return Err(err("missing `)`"));
    }
    let body = &rest[open + 1..rest.len() - 1];
    let mut params = BTreeMap::new();
    for piece in body.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let (k, v) = piece.split_once('=').ok_or_else(|| err("params are key=value"))?;
        params.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(Actor { id: id.to_string(), kind, params })
}

fn parse_edge_line(line: &str, lineno: usize) -> Result<(String, String, String, String), DdssError> {
    let err = |msg: &str| DdssError::Syntax { line: lineno, msg: msg.into() };
    let rest = line.strip_prefix("edge").ok_or_else(|| err("expected `edge`"))?.trim();
    let (lhs, rhs) = rest.split_once("->").ok_or_else(|| err("missing `->`"))?;
    let split_port = |s: &str| -> Result<(String, String), DdssError> {
        let (a, p) = s.trim().split_once('.').ok_or_else(|| err("ports are actor.port"))?;
        Ok((a.trim().to_string(), p.trim().to_string()))
    };
    let (fa, fp) = split_port(lhs)?;
    let (ta, tp) = split_port(rhs)?;
    Ok((fa, fp, ta, tp))
}

/// Parse and fully validate a rule graph: declared ports, single driver per
/// in-port, port typing, acyclicity, complete bindings, required params.
pub fn parse_rule_graph(text: &str) -> Result<DataflowGraph, DdssError> {
    let mut actors: Vec<Actor> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with("actor") {
            let actor = parse_actor_line(line, lineno)?;
            if actors.iter().any(|a| a.id == actor.id) {
                return Err(DdssError::Syntax {
                    line: lineno,
                    msg: format!("duplicate actor id `{}`", actor.id),
                });
            }
            actors.push(actor);
        } else if line.starts_with("edge") {
            let (fa, fp, ta, tp) = parse_edge_line(line, lineno)?;
            let label = format!("{fa}.{fp} -> {ta}.{tp}");
            let from = actors
                .iter()
                .find(|a| a.id == fa)
                .ok_or_else(|| DdssError::TypeMismatch(format!("{label}: unknown actor `{fa}`")))?;
            let to = actors
                .iter()
                .find(|a| a.id == ta)
                .ok_or_else(|| DdssError::TypeMismatch(format!("{label}: unknown actor `{ta}`")))?;
            if fp != "out" {
                return Err(DdssError::TypeMismatch(format!("{label}: no out-port `{fp}`")));
            }
            let from_ty = from
                .kind
                .out_port()
                .ok_or_else(|| DdssError::TypeMismatch(format!("{label}: `{fa}` has no output")))?;
            let to_ty = to
                .kind
                .in_ports()
                .iter()
                .find(|(p, _)| *p == tp)
                .map(|(_, t)| *t)
                .ok_or_else(|| DdssError::TypeMismatch(format!("{label}: no in-port `{tp}`")))?;
            if !to_ty.accepts(from_ty) {
                return Err(DdssError::TypeMismatch(label));
            }
            if edges.iter().any(|e| e.to == ta && e.to_port == tp) {
                return Err(DdssError::TypeMismatch(format!(
                    "{label}: in-port already driven"
                )));
            }
            edges.push(Edge { from: fa, to: ta, to_port: tp });
        } else {
            return Err(DdssError::Syntax {
                line: lineno,
                msg: "expected `actor` or `edge`".into(),
            });
        }
    }

    let graph = DataflowGraph { actors, edges, source_text: text.to_string() };

    // Required params.
    for a in &graph.actors {
        let missing = |key: &str| match a.kind {
            ActorKind::Source => DdssError::UnboundSource(format!("{} lacks `{key}`", a.id)),
            ActorKind::Sink => DdssError::UnboundSink(format!("{} lacks `{key}`", a.id)),
            _ => DdssError::Syntax { line: 0, msg: format!("{} lacks param `{key}`", a.id) },
        };
        let need: &[&str] = match a.kind {
            ActorKind::Source => &["source"],
            ActorKind::Threshold => &["limit"],
            ActorKind::MovingAverage => &["window"],
            ActorKind::Comparator => &["op"],
            ActorKind::Debounce => &["n"],
            ActorKind::StateDetector => &["on", "off"],
            ActorKind::HealthScore => &["penalty", "recovery"],
            ActorKind::Sink => &["event", "indicator"],
        };
        for key in need {
            if a.param(key).is_none() {
                return Err(missing(key));
            }
        }
        if a.kind == ActorKind::Comparator
            && !matches!(a.param("op"), Some("gt" | "ge" | "lt" | "le" | "eq"))
        {
            return Err(DdssError::Syntax {
                line: 0,
                msg: format!("{}: op must be one of gt, ge, lt, le, eq", a.id),
            });
        }
    }

    // Every declared in-port must be driven.
    for a in &graph.actors {
        for (port, _) in a.kind.in_ports() {
            if !graph.edges.iter().any(|e| e.to == a.id && e.to_port == *port) {
                return Err(DdssError::UnboundSource(format!("{}.{port} is unconnected", a.id)));
            }
        }
    }

    // Acyclicity.
    let order = graph.topo_order();
    if order.len() != graph.actors.len() {
        let stuck = graph
            .actors
            .iter()
            .find(|a| !order.contains(&a.id))
            .map(|a| a.id.clone())
            .unwrap_or_default();
        return Err(DdssError::CycleDetected(stuck));
    }

    Ok(graph)
}

/// Static stage check: along every source-to-sink path the ISO 13374 stage
/// index never decreases.
pub fn stage_order_ok(graph: &DataflowGraph) -> bool {
    fn walk(graph: &DataflowGraph, at: &str, stage: u8) -> bool {
        for e in graph.edges.iter().filter(|e| e.from == at) {
            let next = graph.actor(&e.to).expect("validated");
            let next_stage = next.kind.stage().unwrap_or(stage);
            if next.kind.stage().is_some_and(|s| s < stage) {
                return false;
            }
            if !walk(graph, &e.to, next_stage.max(stage)) {
                return false;
            }
        }
        true
    }
    graph.sources().all(|s| walk(graph, &s.id, 0))
}
