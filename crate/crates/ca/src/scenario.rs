//! Scenario construction and the round loop with lazy/eager lifecycles.
//!
//! A scenario is 3600 rounds of 52 process variables sampled at 1 Hz.
//! Faults are injected as staggered temperature excursions on the designated
//! traction variables, each ramping through the three severity ranges, so
//! one fault yields three observations. The eager strategy deletes an
//! observation's individuals right after its classification is published;
//! the lazy strategy retains everything and reclassifies the growing set.

use std::time::{Duration, Instant};

use ontomon_core::Ontology;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classify::classify;
use crate::detect::{DetectorState, Sample};
use crate::materialize::{materialize, AboxDelta};
use crate::CaError;

pub const ROUNDS: u32 = 3600;
pub const VARIABLES: u32 = 52;
/// Process variables designated as traction-group temperatures.
pub const TRACTION_VARIABLES: [u32; 4] = [1, 2, 3, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Lazy,
    Eager,
}

impl Strategy {
    pub fn label(&self) -> &'static str {
        match self {
            Strategy::Lazy => "lazy",
            Strategy::Eager => "eager",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub rounds: u32,
    pub variables: u32,
    pub fault_count: u32,
    /// samples[round][variable - 1]
    pub samples: Vec<Vec<f64>>,
}

/// Build a deterministic scenario with `fault_count` injected excursions.
///
/// Fault k occupies traction variable `k mod 4` from round `200 + 180k` for
/// 60 rounds: 20 rounds near 75, 20 near 90, 20 near 140, then back to the
/// baseline. Up to 17 faults fit well inside the 3600-round horizon.
pub fn build_scenario(fault_count: u32, seed: u64) -> Scenario {
    assert!(fault_count <= 17, "the protocol covers 0..=17 faults");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = vec![vec![0.0f64; VARIABLES as usize]; ROUNDS as usize];
    for (round, row) in samples.iter_mut().enumerate() {
        for (vi, cell) in row.iter_mut().enumerate() {
            let phase = (round as f64 + vi as f64 * 7.0) / 600.0 * std::f64::consts::TAU;
            *cell = 42.0 + 8.0 * phase.sin() + rng.gen_range(-3.0..3.0);
        }
    }
    for k in 0..fault_count {
        let var = TRACTION_VARIABLES[(k as usize) % TRACTION_VARIABLES.len()];
        let onset = 200 + 180 * k as usize;
        for step in 0..60 {
            let base = match step / 20 {
                0 => 75.0,
                1 => 90.0,
                _ => 140.0,
            };
            samples[onset + step][(var - 1) as usize] = base + rng.gen_range(-2.0..2.0);
        }
    }
    Scenario { rounds: ROUNDS, variables: VARIABLES, fault_count, samples }
}

/// Scenario file format: CSV of (round, variable, value) with a header row.
pub fn scenario_to_csv(s: &Scenario) -> String {
    let mut out = String::from("round,variable,value\n");
    for (round, row) in s.samples.iter().enumerate() {
        for (vi, value) in row.iter().enumerate() {
            out.push_str(&format!("{round},{},{value:.3}\n", vi + 1));
        }
    }
    out
}

pub fn scenario_from_csv(text: &str) -> Result<Scenario, CaError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CaError::Scenario("empty file".into()))?;
    if header.trim() != "round,variable,value" {
        return Err(CaError::Scenario("expected header `round,variable,value`".into()));
    }
    let mut cells: Vec<(u32, u32, f64)> = Vec::new();
    let mut max_round = 0;
    let mut max_var = 0;
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let parse_err = || CaError::Scenario(format!("bad row at line {}", n + 2));
        let round: u32 = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(parse_err)?;
        let var: u32 = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(parse_err)?;
        let value: f64 = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(parse_err)?;
        if var == 0 {
            return Err(parse_err());
        }
        max_round = max_round.max(round);
        max_var = max_var.max(var);
        cells.push((round, var, value));
    }
    if cells.is_empty() {
        return Err(CaError::Scenario("no samples".into()));
    }
    let mut samples = vec![vec![0.0f64; max_var as usize]; (max_round + 1) as usize];
    for (round, var, value) in cells {
        samples[round as usize][(var - 1) as usize] = value;
    }
    Ok(Scenario {
        rounds: max_round + 1,
        variables: max_var,
        fault_count: 0,
        samples,
    })
}

#[derive(Debug, Clone)]
pub struct ScenarioMetrics {
    pub strategy: Strategy,
    pub rounds: u32,
    pub observations: u64,
    pub peak_live_individuals: usize,
    pub per_round_time: Vec<Duration>,
    pub total_time: Duration,
    /// Total detection-active time divided by observation count; `None`
    /// ("ND") when no observation was detected.
    pub amortized_time: Option<Duration>,
    /// Published classification sequence: (individual, class) in order.
    pub published: Vec<(String, String)>,
}

/// Run the full detect → materialize → classify → publish loop.
///
/// `cap` bounds the live-individual count; exceeding it raises
/// [`CaError::CapExceeded`], which is how the lazy strategy runs out of
/// room on dense scenarios.
pub fn run_scenario(
    scn: &Scenario,
    fixture: &Ontology,
    strategy: Strategy,
    cap: Option<usize>,
) -> Result<ScenarioMetrics, CaError> {
    let mut detector = DetectorState::new();
    let mut retained: Vec<AboxDelta> = Vec::new();
    let mut published: Vec<(String, String)> = Vec::new();
    let mut published_upto = 0usize; // lazy: entries already published
    let mut peak_live = 0usize;
    let mut observations = 0u64;
    let mut per_round_time = Vec::with_capacity(scn.rounds as usize);
    let mut active_time = Duration::ZERO;

    for round in 0..scn.rounds {
        let started = Instant::now();
        let mut events = Vec::new();
        for var in 1..=scn.variables {
            let value = scn.samples[round as usize][(var - 1) as usize];
            let sample = Sample { variable: var, t: round as u64, value };
            if let Some(e) = detector.feed(&sample)? {
                events.push(e);
            }
        }

        let had_events = !events.is_empty();
        for event in events {
            observations += 1;
            let delta = materialize(&event);
            match strategy {
                Strategy::Eager => {
                    let live = delta.individuals.len();
                    peak_live = peak_live.max(live);
                    if cap.is_some_and(|c| live > c) {
                        return Err(CaError::CapExceeded(round));
                    }
                    let result = classify(std::slice::from_ref(&delta), fixture)?;
                    published.extend(result.pairs());
                    // Individuals dropped here: the delta goes out of scope.
                }
                Strategy::Lazy => {
                    retained.push(delta);
                    let live: usize = retained.iter().map(|d| d.individuals.len()).sum();
                    peak_live = peak_live.max(live);
                    if cap.is_some_and(|c| live > c) {
                        return Err(CaError::CapExceeded(round));
                    }
                }
            }
        }
        if strategy == Strategy::Lazy && had_events {
            // Reclassify the whole retained set, publish what is new.
            let result = classify(&retained, fixture)?;
            let pairs = result.pairs();
            published.extend(pairs[published_upto..].iter().cloned());
            published_upto = pairs.len();
        }

        let elapsed = started.elapsed();
        if had_events {
            active_time += elapsed;
        }
        per_round_time.push(elapsed);
    }

    let total_time = per_round_time.iter().sum();
    let amortized_time =
        (observations > 0).then(|| active_time / u32::try_from(observations).unwrap_or(u32::MAX));
    Ok(ScenarioMetrics {
        strategy,
        rounds: scn.rounds,
        observations,
        peak_live_individuals: peak_live,
        per_round_time,
        total_time,
        amortized_time,
        published,
    })
}

/// Metrics report rows shaped like the protocol table: strategy, scenario,
/// peak live individuals, total and amortized times with an "ND" sentinel.
pub fn metrics_csv(rows: &[(String, ScenarioMetrics)]) -> String {
    let mut out =
        String::from("strategy,scenario,peak_live_individuals,total_time_ms,amortized_time_ms\n");
    for (label, m) in rows {
        let amortized = match m.amortized_time {
            Some(d) => format!("{:.3}", d.as_secs_f64() * 1e3),
            None => "ND".to_string(),
        };
        out.push_str(&format!(
            "{},{},{},{:.3},{}\n",
            m.strategy.label(),
            label,
            m.peak_live_individuals,
            m.total_time.as_secs_f64() * 1e3,
            amortized
        ));
    }
    out
}
