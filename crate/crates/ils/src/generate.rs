//! Scenario generation: request-for-work arrivals, ITU routing over the
//! fixed timetable, and the resulting event log.
//!
//! Randomness is seeded and drawn in a fixed order, so equal parameters and
//! seed produce byte-identical logs. Leg delays follow a truncated normal
//! (mean 0, sd 10 min, floored at 0); daily customers per terminal are
//! Poisson-distributed; each request for work covers 1 to 5 ITUs.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ontomon_store::time::{format_timestamp, parse_timestamp};

use crate::fixture::NetworkFixture;
use crate::IlsError;

/// Scenario day 1 starts here: 2025-06-02T00:00:00Z.
pub const BASE_EPOCH: u64 = 1_748_822_400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    GateIn,
    Load,
    Depart,
    Arrive,
    Unload,
    GateOut,
}

impl EventKind {
    pub fn class_name(&self) -> &'static str {
        match self {
            EventKind::GateIn => "GateInEvent",
            EventKind::Load => "LoadEvent",
            EventKind::Depart => "DepartEvent",
            EventKind::Arrive => "ArriveEvent",
            EventKind::Unload => "UnloadEvent",
            EventKind::GateOut => "GateOutEvent",
        }
    }

    pub fn parse(s: &str) -> Option<EventKind> {
        Some(match s {
            "GateIn" => EventKind::GateIn,
            "Load" => EventKind::Load,
            "Depart" => EventKind::Depart,
            "Arrive" => EventKind::Arrive,
            "Unload" => EventKind::Unload,
            "GateOut" => EventKind::GateOut,
            _ => return None,
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            EventKind::GateIn => "GateIn",
            EventKind::Load => "Load",
            EventKind::Depart => "Depart",
            EventKind::Arrive => "Arrive",
            EventKind::Unload => "Unload",
            EventKind::GateOut => "GateOut",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimEvent {
    pub kind: EventKind,
    pub t: u64,
    pub terminal: String,
    pub itu: String,
    pub train: Option<String>,
    pub order: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventLog {
    pub events: Vec<SimEvent>,
    /// Non-event individuals: customers, requests, orders, ITUs.
    pub parties: Vec<Party>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Party {
    Customer { id: String, terminal: String },
    RequestForWork { id: String, customer: String },
    Order { id: String, request: String, itu: String, route: String },
    Itu { id: String },
}

#[derive(Debug, Clone)]
pub struct GenParams {
    pub itus_per_terminal_day: u32,
    pub days: u32,
    pub seed: u64,
}

/// Half-open period covering simulated day `day` (1-based).
pub fn day_period(day: u32) -> (u64, u64) {
    let start = BASE_EPOCH + (day as u64 - 1) * 86_400;
    (start, start + 86_400)
}

fn poisson<R: Rng>(rng: &mut R, mean: f64) -> u32 {
    // Knuth's product method; fine for small means.
    let l = (-mean).exp();
    let mut k = 0u32;
    let mut p = 1.0;
    loop {
        p *= rng.gen_range(0.0..1.0);
        if p <= l {
            return k;
        }
        k += 1;
    }
}

fn truncated_normal_minutes<R: Rng>(rng: &mut R, sd: f64) -> u32 {
    // Box-Muller, mean 0, floored at 0.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    let n = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos() * sd;
    n.max(0.0).round() as u32
}

/// Generate the event log for `params.days` days of operation.
pub fn generate_scenario(
    fixture: &NetworkFixture,
    params: &GenParams,
) -> Result<EventLog, IlsError> {
    fixture.validate().map_err(IlsError::InvalidParams)?;
    if !(10..=50).contains(&params.itus_per_terminal_day) {
        return Err(IlsError::InvalidParams(format!(
            "itus_per_terminal_day {} outside [10, 50]",
            params.itus_per_terminal_day
        )));
    }
    if !(1..=15).contains(&params.days) {
        return Err(IlsError::InvalidParams(format!("days {} outside [1, 15]", params.days)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let routing = fixture.routing_table();
    let mut log = EventLog::default();
    // Boarded ITUs per (train, day-offset) for capacity rollover.
    let mut loads: std::collections::BTreeMap<(usize, u64), u32> = Default::default();

    for day in 1..=params.days {
        let day_start = BASE_EPOCH + (day as u64 - 1) * 86_400;
        for (ti, terminal) in fixture.terminals.iter().enumerate() {
            let n_customers = poisson(&mut rng, fixture.customer_mean).max(1);
            let customers: Vec<String> = (0..n_customers)
                .map(|k| format!("cust_d{day}_{ti}_{k}"))
                .collect();
            for c in &customers {
                log.parties
                    .push(Party::Customer { id: c.clone(), terminal: terminal.clone() });
            }

            let mut remaining = params.itus_per_terminal_day;
            let mut rfw_seq = 0;
            while remaining > 0 {
                let size = rng.gen_range(1..=5).min(remaining);
                remaining -= size;
                let rfw = format!("rfw_d{day}_{ti}_{rfw_seq}");
                rfw_seq += 1;
                let customer = customers[rng.gen_range(0..customers.len())].clone();
                log.parties.push(Party::RequestForWork { id: rfw.clone(), customer });

                for s in 0..size {
                    let itu = format!("itu_d{day}_{ti}_{rfw_seq}_{s}");
                    let order = format!("ord_d{day}_{ti}_{rfw_seq}_{s}");
                    let dest = loop {
                        let d = rng.gen_range(0..fixture.terminals.len());
                        if d != ti {
                            break d;
                        }
                    };
                    let legs = routing.get(&(ti, dest)).ok_or_else(|| {
                        IlsError::InvalidParams(format!(
                            "no route from {} to {}",
                            fixture.terminals[ti], fixture.terminals[dest]
                        ))
                    })?;
                    log.parties.push(Party::Itu { id: itu.clone() });
                    log.parties.push(Party::Order {
                        id: order.clone(),
                        request: rfw.clone(),
                        itu: itu.clone(),
                        route: fixture.routes[legs[0].0].id.clone(),
                    });

                    emit_itinerary(
                        fixture,
                        &mut rng,
                        &mut loads,
                        &mut log.events,
                        legs,
                        day_start,
                        &itu,
                        &order,
                    );
                }
            }
        }
    }
    log.events.sort_by(|a, b| (a.t, &a.itu, a.kind).cmp(&(b.t, &b.itu, b.kind)));
    Ok(log)
}

#[allow(clippy::too_many_arguments)]
fn emit_itinerary<R: Rng>(
    fixture: &NetworkFixture,
    rng: &mut R,
    loads: &mut std::collections::BTreeMap<(usize, u64), u32>,
    events: &mut Vec<SimEvent>,
    legs: &[(usize, usize, usize)],
    day_start: u64,
    itu: &str,
    order: &str,
) {
    let minutes = |m: u64| m * 60;
    // Gate in between 04:30 and 06:30.
    let gate_in = day_start + minutes(270 + rng.gen_range(0..120));
    let mut ready = gate_in;

    for (li, (route_idx, board, alight)) in legs.iter().enumerate() {
        let route = &fixture.routes[*route_idx];
        let board_stop = &route.stops[*board];
        let alight_stop = &route.stops[*alight];

        // First train whose boarding departure is at least 30 min after the
        // ITU is ready, rolling over to later days when needed; a full
        // train pushes to the next departure, the last one always takes the
        // overflow.
        let candidates = fixture.trains_on_route(*route_idx);
        let mut chosen: Option<(usize, u64)> = None;
        'search: for day_offset in 0.. {
            let base = day_start + day_offset * 86_400;
            for &tidx in &candidates {
                let train = &fixture.trains[tidx];
                let t0 = base + minutes(train.departure_min as u64);
                let depart = t0 + minutes(board_stop.depart_min as u64);
                if depart < ready + minutes(30) {
                    continue;
                }
                // Capacity is per physical service: train and absolute day.
                let key = (tidx, t0 / 86_400);
                let boarded = loads.entry(key).or_insert(0);
                let last_candidate = tidx == *candidates.last().unwrap() && day_offset >= 2;
                if *boarded < fixture.train_capacity(train) || last_candidate {
                    *boarded += 1;
                    chosen = Some((tidx, t0));
                    break 'search;
                }
            }
        }
        let (tidx, t0) = chosen.expect("departure search always terminates");
        let train_id = fixture.trains[tidx].id.clone();
        let board_terminal = fixture.terminals[board_stop.terminal].clone();
        let alight_terminal = fixture.terminals[alight_stop.terminal].clone();

        let depart = t0 + minutes(board_stop.depart_min as u64);
        let delay = truncated_normal_minutes(rng, 10.0);
        let arrive = t0 + minutes(alight_stop.arrive_min as u64) + minutes(delay as u64);
        let load = depart - minutes(15);
        let unload = arrive + minutes(10);

        if li == 0 {
            events.push(SimEvent {
                kind: EventKind::GateIn,
                t: gate_in,
                terminal: board_terminal.clone(),
                itu: itu.into(),
                train: None,
                order: order.into(),
            });
        }
        for (kind, t, terminal) in [
            (EventKind::Load, load, &board_terminal),
            (EventKind::Depart, depart, &board_terminal),
            (EventKind::Arrive, arrive, &alight_terminal),
            (EventKind::Unload, unload, &alight_terminal),
        ] {
            events.push(SimEvent {
                kind,
                t,
                terminal: terminal.clone(),
                itu: itu.into(),
                train: Some(train_id.clone()),
                order: order.into(),
            });
        }
        ready = unload + minutes(15);

        if li == legs.len() - 1 {
            events.push(SimEvent {
                kind: EventKind::GateOut,
                t: unload + minutes(20),
                terminal: alight_terminal,
                itu: itu.into(),
                train: None,
                order: order.into(),
            });
        }
    }
}

/// Event log CSV: kind, ISO-8601 timestamp, terminal, itu, train, order.
pub fn event_log_to_csv(log: &EventLog) -> String {
    let mut out = String::from("kind,t,terminal,itu,train,order\n");
    for e in &log.events {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.kind.label(),
            format_timestamp(e.t),
            e.terminal,
            e.itu,
            e.train.as_deref().unwrap_or(""),
            e.order
        ));
    }
    out
}

pub fn event_log_from_csv(text: &str) -> Result<EventLog, IlsError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| IlsError::EventLog("empty file".into()))?;
    if header.trim() != "kind,t,terminal,itu,train,order" {
        return Err(IlsError::EventLog("unexpected header".into()));
    }
    let mut events = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(IlsError::EventLog(format!("bad row at line {}", n + 2)));
        }
        let kind = EventKind::parse(fields[0])
            .ok_or_else(|| IlsError::EventLog(format!("unknown kind `{}`", fields[0])))?;
        let t = parse_timestamp(fields[1])
            .ok_or_else(|| IlsError::EventLog(format!("bad timestamp `{}`", fields[1])))?;
        events.push(SimEvent {
            kind,
            t,
            terminal: fields[2].into(),
            itu: fields[3].into(),
            train: (!fields[4].is_empty()).then(|| fields[4].into()),
            order: fields[5].into(),
        });
    }
    Ok(EventLog { events, parties: Vec::new() })
}

/// Check the per-ITU lifecycle: one GateIn, one GateOut, complete legs in
/// strictly increasing time order.
pub fn validate_event_log(log: &EventLog) -> Result<(), String> {
    use std::collections::BTreeMap;
    let mut per_itu: BTreeMap<&str, Vec<&SimEvent>> = BTreeMap::new();
    for e in &log.events {
        per_itu.entry(&e.itu).or_default().push(e);
    }
    for (itu, mut events) in per_itu {
        events.sort_by_key(|e| e.t);
        let mut last_t = 0;
        for e in &events {
            if e.t < last_t {
                return Err(format!("{itu}: time went backwards"));
            }
            last_t = e.t;
        }
        let kinds: Vec<EventKind> = events.iter().map(|e| e.kind).collect();
        if kinds.first() != Some(&EventKind::GateIn) || kinds.last() != Some(&EventKind::GateOut) {
            return Err(format!("{itu}: itinerary does not start GateIn / end GateOut"));
        }
        let legs = &kinds[1..kinds.len() - 1];
        if legs.is_empty() || !legs.len().is_multiple_of(4) {
            return Err(format!("{itu}: incomplete legs ({} inner events)", legs.len()));
        }
        for chunk in legs.chunks(4) {
            if chunk
                != [EventKind::Load, EventKind::Depart, EventKind::Arrive, EventKind::Unload]
            {
                return Err(format!("{itu}: malformed leg {chunk:?}"));
            }
        }
        if kinds.iter().filter(|k| **k == EventKind::GateIn).count() != 1
            || kinds.iter().filter(|k| **k == EventKind::GateOut).count() != 1
        {
            return Err(format!("{itu}: duplicated gate events"));
        }
    }
    Ok(())
}
