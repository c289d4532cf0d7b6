//! Bundle generation: ontology + rule graph → schema, endpoints, engine.

use std::collections::BTreeSet;
use std::path::Path;

use ontomon_core::{closure, parse_ontology, saturate_abox, ABoxAssertion, Ontology};
use ontomon_store::{generate_schema, Mapping, RelationalSchema};
use serde::{Deserialize, Serialize};

use crate::graph::{parse_rule_graph, DataflowGraph};
use crate::DdssError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointDir {
    In,
    Out,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endpoint {
    pub path: String,
    pub direction: EndpointDir,
    pub event_class: String,
}

#[derive(Debug, Clone)]
pub struct DdssBundle {
    pub ontology: Ontology,
    pub graph: DataflowGraph,
    pub schema: RelationalSchema,
    pub mapping: Mapping,
    pub endpoints: Vec<Endpoint>,
    pub digest: String,
    /// Data sources declared by the static part, after saturation.
    pub data_sources: BTreeSet<String>,
    /// The service individual receiving/sending events, when declared.
    pub ddss_individual: Option<String>,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// Individuals asserted (after saturation) to belong to `class`.
fn members_of(saturated: &Ontology, class: &str) -> BTreeSet<String> {
    saturated
        .abox
        .iter()
        .filter_map(|a| match a {
            ABoxAssertion::Class(i, c) if c == class => Some(i.clone()),
            _ => None,
        })
        .collect()
}

/// Compile the ontology and rule graph into a deployable bundle.
///
/// The endpoint set is derived exactly from the event-class partition: one
/// in-endpoint per leaf subclass of `IncomingEvent`, one out-endpoint per
/// leaf subclass of `OutgoingEvent` bound by some sink.
pub fn generate_ddss(o: &Ontology, g: &DataflowGraph) -> Result<DdssBundle, DdssError> {
    for class in ["DDSS", "IncomingEvent", "OutgoingEvent"] {
        if !o.is_class(class) {
            return Err(DdssError::MissingDynamicPart(format!("class `{class}`")));
        }
    }
    for prop in ["receives", "sends"] {
        if !o.is_object_property(prop) {
            return Err(DdssError::MissingDynamicPart(format!("property `{prop}`")));
        }
    }

    let cl = closure(o);
    let saturated = saturate_abox(o);
    let data_sources = members_of(&saturated, "DataSource");
    let indicators = members_of(&saturated, "DiagnosticIndicator");
    let ddss_individual = members_of(&saturated, "DDSS").into_iter().next();

    let incoming_leaves = cl.leaf_subs("IncomingEvent");
    let outgoing_leaves = cl.leaf_subs("OutgoingEvent");

    // Graph bindings must resolve against the ontology.
    for src in g.sources() {
        let bound = src.param("source").expect("validated");
        if !data_sources.contains(bound) {
            return Err(DdssError::UnknownDataSource(bound.to_string()));
        }
        if let Some(filter) = src.param("class") {
            if !incoming_leaves.contains(filter) {
                return Err(DdssError::UnboundEventClass(filter.to_string()));
            }
        }
    }
    let mut sink_classes: BTreeSet<String> = BTreeSet::new();
    for sink in g.sinks() {
        let class = sink.param("event").expect("validated");
        if !outgoing_leaves.contains(class) {
            return Err(DdssError::UnboundEventClass(class.to_string()));
        }
        sink_classes.insert(class.to_string());
        let indicator = sink.param("indicator").expect("validated");
        if !indicators.contains(indicator) {
            return Err(DdssError::UnknownIndicator(indicator.to_string()));
        }
    }

    let mut endpoints = Vec::new();
    for class in &incoming_leaves {
        endpoints.push(Endpoint {
            path: format!("/events/{class}"),
            direction: EndpointDir::In,
            event_class: class.clone(),
        });
    }
    for class in &sink_classes {
        endpoints.push(Endpoint {
            path: format!("/diagnostics/{class}"),
            direction: EndpointDir::Out,
            event_class: class.clone(),
        });
    }

    let (schema, mapping) = generate_schema(o);
    let mut digest_input = schema.ddl();
    for e in &endpoints {
        digest_input.push_str(&e.path);
    }
    digest_input.push_str(&g.source_text);
    digest_input.push_str(&o.to_string());
    let digest = format!("{:016x}", fnv1a64(digest_input.as_bytes()));

    Ok(DdssBundle {
        ontology: o.clone(),
        graph: g.clone(),
        schema,
        mapping,
        endpoints,
        digest,
        data_sources,
        ddss_individual,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    digest: String,
    endpoints: Vec<Endpoint>,
    ontology_file: String,
    rules_file: String,
    schema_file: String,
}

/// Write the bundle as a directory: manifest, DDL, ontology, rules.
pub fn write_bundle(bundle: &DdssBundle, dir: &Path) -> Result<(), DdssError> {
    let io = |e: std::io::Error| DdssError::Bundle(e.to_string());
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join("schema.sql"), bundle.schema.ddl()).map_err(io)?;
    std::fs::write(dir.join("ontology.onto"), bundle.ontology.to_string()).map_err(io)?;
    std::fs::write(dir.join("rules.graph"), &bundle.graph.source_text).map_err(io)?;
    let manifest = Manifest {
        digest: bundle.digest.clone(),
        endpoints: bundle.endpoints.clone(),
        ontology_file: "ontology.onto".into(),
        rules_file: "rules.graph".into(),
        schema_file: "schema.sql".into(),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| DdssError::Bundle(e.to_string()))?;
    std::fs::write(dir.join("manifest.json"), json).map_err(io)?;
    Ok(())
}

/// Load a bundle directory and verify its digest.
pub fn load_bundle(dir: &Path) -> Result<DdssBundle, DdssError> {
    let io = |e: std::io::Error| DdssError::Bundle(e.to_string());
    let manifest: Manifest = serde_json::from_str(
        &std::fs::read_to_string(dir.join("manifest.json")).map_err(io)?,
    )
    .map_err(|e| DdssError::Bundle(e.to_string()))?;
    let onto_text = std::fs::read_to_string(dir.join(&manifest.ontology_file)).map_err(io)?;
    let rules_text = std::fs::read_to_string(dir.join(&manifest.rules_file)).map_err(io)?;
    let o = parse_ontology(&onto_text)?;
    let g = parse_rule_graph(&rules_text)?;
    let bundle = generate_ddss(&o, &g)?;
    if bundle.digest != manifest.digest {
        return Err(DdssError::Bundle(format!(
            "digest mismatch: manifest {} vs regenerated {}",
            manifest.digest, bundle.digest
        )));
    }
    Ok(bundle)
}
