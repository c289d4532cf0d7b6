//! Translation of the network fixture and event log into ABox assertions
//! over the logistics vocabulary.

use ontomon_core::{parse_ontology, ABoxAssertion, Ontology};
use ontomon_store::time::format_timestamp;

use crate::fixture::NetworkFixture;
use crate::generate::{Party, SimEvent};

pub const ILS_ONTOLOGY: &str = include_str!("../../../fixtures/ils.onto");

pub fn ils_ontology() -> Ontology {
    parse_ontology(ILS_ONTOLOGY).expect("bundled logistics ontology parses")
}

/// Static assertions: terminals, routes, scheduled stops, trains.
pub fn static_assertions(fixture: &NetworkFixture) -> Vec<ABoxAssertion> {
    let mut out = Vec::new();
    for t in &fixture.terminals {
        out.push(ABoxAssertion::Class(t.clone(), "Terminal".into()));
    }
    for route in &fixture.routes {
        out.push(ABoxAssertion::Class(route.id.clone(), "Route".into()));
        for (si, stop) in route.stops.iter().enumerate() {
            let stop_id = format!("{}_stop{}", route.id.to_lowercase(), si);
            out.push(ABoxAssertion::Class(stop_id.clone(), "ScheduledStop".into()));
            out.push(ABoxAssertion::Object(route.id.clone(), "hasStop".into(), stop_id.clone()));
            out.push(ABoxAssertion::Object(
                stop_id,
                "stopAt".into(),
                fixture.terminals[stop.terminal].clone(),
            ));
        }
    }
    for train in &fixture.trains {
        out.push(ABoxAssertion::Class(train.id.clone(), "Train".into()));
        out.push(ABoxAssertion::Object(
            train.id.clone(),
            "servesRoute".into(),
            fixture.routes[train.route].id.clone(),
        ));
    }
    out
}

fn event_id(e: &SimEvent) -> String {
    format!("ev_{}_{}_{}", e.kind.label().to_lowercase(), e.itu, e.t)
}

/// Assertions for a slice of events plus the parties they mention.
pub fn event_assertions(events: &[SimEvent], parties: &[Party]) -> Vec<ABoxAssertion> {
    let mut out = Vec::new();
    for p in parties {
        match p {
            Party::Customer { id, terminal } => {
                out.push(ABoxAssertion::Class(id.clone(), "Customer".into()));
                out.push(ABoxAssertion::Object(id.clone(), "basedAt".into(), terminal.clone()));
            }
            Party::RequestForWork { id, customer } => {
                out.push(ABoxAssertion::Class(id.clone(), "RequestForWork".into()));
                out.push(ABoxAssertion::Object(id.clone(), "issuedBy".into(), customer.clone()));
            }
            Party::Order { id, request, itu, route } => {
                out.push(ABoxAssertion::Class(id.clone(), "TransportOrder".into()));
                out.push(ABoxAssertion::Object(id.clone(), "partOfRequest".into(), request.clone()));
                out.push(ABoxAssertion::Object(id.clone(), "forItu".into(), itu.clone()));
                out.push(ABoxAssertion::Object(id.clone(), "followsRoute".into(), route.clone()));
            }
            Party::Itu { id } => out.push(ABoxAssertion::Class(id.clone(), "ITU".into())),
        }
    }
    for e in events {
        let id = event_id(e);
        // Only the leaf class is asserted; Event membership is entailed and
        // stays virtual, per the raw-assertions-only stance.
        out.push(ABoxAssertion::Class(id.clone(), e.kind.class_name().into()));
        out.push(ABoxAssertion::Object(id.clone(), "occursAt".into(), e.terminal.clone()));
        out.push(ABoxAssertion::Object(id.clone(), "involvesItu".into(), e.itu.clone()));
        out.push(ABoxAssertion::Object(id.clone(), "forOrder".into(), e.order.clone()));
        if let Some(train) = &e.train {
            out.push(ABoxAssertion::Object(id.clone(), "involvesTrain".into(), train.clone()));
        }
        out.push(ABoxAssertion::Data(id, "atTime".into(), format_timestamp(e.t)));
    }
    out
}
