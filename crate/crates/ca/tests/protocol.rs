//! Detection checked against an independent replay oracle, and the
//! lazy/eager lifecycle properties of the scenario protocol.

use ontomon_ca::{
    build_scenario, run_scenario, scenario_from_csv, scenario_to_csv, CaError, DetectorState,
    EventKind, Sample, SeverityRange, Strategy, TRACTION_ONTOLOGY,
};
use ontomon_core::{parse_ontology, Ontology};
use ontomon_testkit::rng;
use rand::Rng;

fn fixture() -> Ontology {
    parse_ontology(TRACTION_ONTOLOGY).unwrap()
}

/// Replay oracle: re-derives the expected event list for one variable by a
/// two-phase scan over the full series (find an opening window, then walk
/// the pattern), written independently of the streaming state machine.
fn replay_events(values: &[f64]) -> Vec<(usize, SeverityRange, EventKind)> {
    let mut out = Vec::new();
    let mut idx = 0;
    'outer: loop {
        // Phase 1: find three consecutive samples above 70.
        let mut run = 0;
        let start = loop {
            if idx >= values.len() {
                break 'outer;
            }
            if values[idx] > 70.0 {
                run += 1;
                if run == 3 {
                    break idx;
                }
            } else {
                run = 0;
            }
            idx += 1;
        };
        let mut max_range = SeverityRange::of(values[start]).unwrap();
        out.push((start, max_range, EventKind::Opening));

        // Phase 2: walk the open pattern until three samples at or below 70.
        let mut below = 0;
        idx = start + 1;
        while idx < values.len() {
            if values[idx] > 70.0 {
                below = 0;
                let r = SeverityRange::of(values[idx]).unwrap();
                if r > max_range {
                    max_range = r;
                    out.push((idx, r, EventKind::RangeTransition));
                }
            } else {
                below += 1;
                if below == 3 {
                    idx += 1;
                    continue 'outer;
                }
            }
            idx += 1;
        }
        break;
    }
    out
}

#[test]
fn detection_matches_replay_oracle_on_random_streams() {
    for seed in 0..40u64 {
        let mut r = rng(seed);
        let n = r.gen_range(20..300);
        let values: Vec<f64> = (0..n)
            .map(|_| {
                if r.gen_bool(0.5) {
                    r.gen_range(30.0..70.0)
                } else {
                    r.gen_range(70.0..150.0)
                }
            })
            .collect();

        let mut st = DetectorState::new();
        let mut got = Vec::new();
        for (i, v) in values.iter().enumerate() {
            if let Some(e) = st.feed(&Sample { variable: 7, t: i as u64, value: *v }).unwrap() {
                got.push((i, e.range, e.kind));
            }
        }
        assert_eq!(got, replay_events(&values), "seed {seed}");
    }
}

#[test]
fn zero_fault_scenario_eager_is_silent() {
    let scn = build_scenario(0, 9);
    let m = run_scenario(&scn, &fixture(), Strategy::Eager, None).unwrap();
    assert_eq!(m.observations, 0);
    assert_eq!(m.peak_live_individuals, 0);
    assert!(m.amortized_time.is_none(), "amortized time must be ND");
    assert!(m.published.is_empty());
}

#[test]
fn fault_counting_oracle() {
    // Each injected fault ramps through the three ranges: one opening plus
    // two transitions, three individuals per observation.
    for faults in [1u32, 5] {
        let scn = build_scenario(faults, 9);
        let lazy = run_scenario(&scn, &fixture(), Strategy::Lazy, None).unwrap();
        assert_eq!(lazy.observations, 3 * faults as u64);
        assert_eq!(lazy.peak_live_individuals, 9 * faults as usize);
    }
}

#[test]
fn strategies_publish_identical_sequences() {
    for faults in [1u32, 5] {
        let scn = build_scenario(faults, 9);
        let lazy = run_scenario(&scn, &fixture(), Strategy::Lazy, None).unwrap();
        let eager = run_scenario(&scn, &fixture(), Strategy::Eager, None).unwrap();
        assert_eq!(lazy.published, eager.published, "{faults} faults");
        assert!(!lazy.published.is_empty());
    }
}

#[test]
fn eager_memory_is_dominated_and_bounded() {
    let scn = build_scenario(5, 9);
    let lazy = run_scenario(&scn, &fixture(), Strategy::Lazy, None).unwrap();
    let eager = run_scenario(&scn, &fixture(), Strategy::Eager, None).unwrap();
    assert!(eager.peak_live_individuals <= lazy.peak_live_individuals);
    // One observation family at a time, regardless of scenario length.
    assert_eq!(eager.peak_live_individuals, 3);
}

#[test]
fn lazy_cap_overflow_raises() {
    let scn = build_scenario(5, 9);
    let peak_5 = run_scenario(&scn, &fixture(), Strategy::Lazy, None)
        .unwrap()
        .peak_live_individuals;
    // The same cap is fine for 5 faults, fatal for more.
    assert!(run_scenario(&scn, &fixture(), Strategy::Lazy, Some(peak_5)).is_ok());
    let denser = build_scenario(9, 9);
    let err = run_scenario(&denser, &fixture(), Strategy::Lazy, Some(peak_5)).unwrap_err();
    assert!(matches!(err, CaError::CapExceeded(_)));
}

#[test]
fn scenario_csv_round_trip() {
    let scn = build_scenario(1, 4);
    let csv = scenario_to_csv(&scn);
    let back = scenario_from_csv(&csv).unwrap();
    assert_eq!(back.rounds, scn.rounds);
    assert_eq!(back.variables, scn.variables);
    for (a, b) in scn.samples.iter().zip(back.samples.iter()) {
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-3);
        }
    }
}

#[test]
fn published_classes_match_severity_ranges() {
    let scn = build_scenario(1, 9);
    let m = run_scenario(&scn, &fixture(), Strategy::Eager, None).unwrap();
    // Three observations: maintenance first, then two mission-critical.
    let classes: Vec<&str> = m.published.iter().map(|(_, c)| c.as_str()).collect();
    assert_eq!(
        classes,
        vec![
            "MaintenanceRelatedSymptom",
            "NonPriorityFault",
            "MissionRelatedSymptom",
            "PriorityFault",
            "MissionRelatedSymptom",
            "PriorityFault",
        ]
    );
}
