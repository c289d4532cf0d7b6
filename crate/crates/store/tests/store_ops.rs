//! Store operations against small fixtures and a nested-loop reference
//! evaluator that shares no code with the hash-join executor.

use std::collections::BTreeSet;

use ontomon_core::{parse_ontology, ABoxAssertion};
use ontomon_store::time::format_timestamp;
use ontomon_store::{
    export_table_csv, import_table_csv, DataStore, RetentionPolicy, SqlText, StoreError,
};

const HVAC_MINI: &str = "\
    Class(System) Class(SystemComponent) Class(DataSource)\n\
    SubClassOf(SystemComponent System)\n\
    ObjectProperty(isInSystem) Domain(isInSystem DataSource) Range(isInSystem System)\n\
    DataProperty(hasTimestamp)\n\
    Individual(hvac1) Individual(sensor1)\n";

#[test]
fn hvac_schema_contains_expected_tables() {
    let o = parse_ontology(HVAC_MINI).unwrap();
    let store = DataStore::new(&o);
    for t in ["system", "datasource", "isinsystem", "hastimestamp"] {
        assert!(store.schema().table(t).is_some(), "missing table {t}");
    }
}

#[test]
fn ingest_is_idempotent() {
    let o = parse_ontology("Class(ITU) Individual(itu1)").unwrap();
    let mut store = DataStore::new(&o);
    let a = ABoxAssertion::Class("itu1".into(), "ITU".into());
    assert_eq!(store.ingest(std::slice::from_ref(&a)).unwrap(), 1);
    assert_eq!(store.row_count("itu").unwrap(), 1);
    assert_eq!(store.ingest(&[a]).unwrap(), 0);
    assert_eq!(store.row_count("itu").unwrap(), 1);
}

#[test]
fn ingest_rejects_unmapped_symbols() {
    let o = parse_ontology("Class(A) Individual(x)").unwrap();
    let mut store = DataStore::new(&o);
    let err = store.ingest(&[ABoxAssertion::Class("x".into(), "B".into())]).unwrap_err();
    assert_eq!(err, StoreError::UnmappedSymbol("B".into()));
}

#[test]
fn round_trip_on_random_instances() {
    use ontomon_testkit::{random_ontology, rng, OntoGenConfig};
    for seed in 0..20u64 {
        let o = random_ontology(&mut rng(seed), &OntoGenConfig::default());
        let mut store = DataStore::new(&o);
        store.ingest(&o.abox).unwrap();
        let mut expected = o.abox.clone();
        expected.sort();
        expected.dedup();
        assert_eq!(store.read_back(), expected, "seed {seed}");
    }
}

#[test]
fn round_trip_reconstructs_asserted_abox() {
    let src = "Class(Event) Class(Terminal) ObjectProperty(occursAt) DataProperty(atTime)\n\
               Individual(e1) Individual(e2) Individual(t1)\n\
               ClassAssertion(e1 Event) ClassAssertion(e2 Event) ClassAssertion(t1 Terminal)\n\
               ObjectAssertion(e1 occursAt t1) ObjectAssertion(e2 occursAt t1)\n\
               DataAssertion(e1 atTime \"100\") DataAssertion(e2 atTime \"200\")";
    let o = parse_ontology(src).unwrap();
    let mut store = DataStore::new(&o);
    store.ingest(&o.abox).unwrap();
    let mut expected = o.abox.clone();
    expected.sort();
    expected.dedup();
    assert_eq!(store.read_back(), expected);
}

#[test]
fn scan_of_empty_table_is_empty() {
    let o = parse_ontology("Class(ITU)").unwrap();
    let store = DataStore::new(&o);
    let rs = store.execute(&SqlText::minimal("SELECT DISTINCT t0.id FROM itu t0")).unwrap();
    assert!(rs.is_empty());
    assert_eq!(rs.columns, 1);
}

#[test]
fn union_of_identical_blocks_deduplicates() {
    let o = parse_ontology("Class(ITU) Individual(a) Individual(b)\n\
                            ClassAssertion(a ITU) ClassAssertion(b ITU)")
        .unwrap();
    let mut store = DataStore::new(&o);
    store.ingest(&o.abox).unwrap();
    let sql = SqlText::minimal(
        "SELECT DISTINCT t0.id FROM itu t0 UNION SELECT DISTINCT t0.id FROM itu t0",
    );
    let rs = store.execute(&sql).unwrap();
    assert_eq!(rs.len(), 2);
}

/// Nested-loop reference for a two-table equi-join on one column pair.
fn nested_loop_join(
    left: &[(String, String)],
    right: &[String],
) -> BTreeSet<Vec<String>> {
    let mut out = BTreeSet::new();
    for (s, o) in left {
        for id in right {
            if o == id {
                out.insert(vec![s.clone(), o.clone()]);
            }
        }
    }
    out
}

#[test]
fn single_join_matches_nested_loop_reference() {
    let src = "Class(Terminal) Class(Event) ObjectProperty(occursAt)\n\
               Individual(e1) Individual(e2) Individual(e3) Individual(t1) Individual(t2)\n\
               ClassAssertion(t1 Terminal) ClassAssertion(t2 Terminal)\n\
               ObjectAssertion(e1 occursAt t1) ObjectAssertion(e2 occursAt t2)\n\
               ObjectAssertion(e3 occursAt e1)";
    let o = parse_ontology(src).unwrap();
    let mut store = DataStore::new(&o);
    store.ingest(&o.abox).unwrap();
    let sql = SqlText::minimal(
        "SELECT DISTINCT t0.s, t0.o FROM occursat t0, terminal t1 WHERE t1.id = t0.o",
    );
    let got = store.execute(&sql).unwrap();

    let pairs: Vec<(String, String)> = vec![
        ("e1".into(), "t1".into()),
        ("e2".into(), "t2".into()),
        ("e3".into(), "e1".into()),
    ];
    let terminals: Vec<String> = vec!["t1".into(), "t2".into()];
    assert_eq!(got.rows, nested_loop_join(&pairs, &terminals));
    assert_eq!(got.len(), 2);
}

#[test]
fn executor_rejects_unknown_names_and_dialect_violations() {
    let o = parse_ontology("Class(ITU)").unwrap();
    let store = DataStore::new(&o);
    assert!(matches!(
        store.execute(&SqlText::minimal("SELECT DISTINCT t0.id FROM nosuch t0")),
        Err(StoreError::UnknownTable(_))
    ));
    assert!(matches!(
        store.execute(&SqlText::minimal("SELECT DISTINCT t0.nope FROM itu t0")),
        Err(StoreError::UnknownColumn(_))
    ));
    assert!(matches!(
        store.execute(&SqlText::minimal("SELECT t0.id FROM itu t0")),
        Err(StoreError::DialectViolation(_))
    ));
}

fn event_store_with_ages(ages_days: &[u64], now: u64) -> (DataStore, Vec<String>) {
    let mut src = String::from(
        "Class(Event) Class(Terminal) ObjectProperty(occursAt) DataProperty(atTime)\n\
         Individual(term1) ClassAssertion(term1 Terminal)\n",
    );
    let mut ids = Vec::new();
    for (i, age) in ages_days.iter().enumerate() {
        let id = format!("ev{i}");
        let t = format_timestamp(now - age * 86_400);
        src.push_str(&format!(
            "Individual({id}) ClassAssertion({id} Event) ObjectAssertion({id} occursAt term1)\n\
             DataAssertion({id} atTime \"{t}\")\n"
        ));
        ids.push(id);
    }
    let o = parse_ontology(&src).unwrap();
    let mut store = DataStore::new(&o);
    store.ingest(&o.abox).unwrap();
    (store, ids)
}

fn retention_scope() -> Vec<String> {
    ["event", "occursat", "attime"].map(String::from).to_vec()
}

#[test]
fn retention_deletes_everything_older_than_window() {
    let now = 1_000 * 86_400;
    let (mut store, ids) = event_store_with_ages(&[10, 10, 10], now);
    let policy = RetentionPolicy::new(7 * 86_400, retention_scope(), "atTime");
    let deleted = store.apply_retention(&policy, now).unwrap();
    assert_eq!(deleted, ids.len() * 3);
    assert_eq!(store.row_count("event").unwrap(), 0);
    assert_eq!(store.row_count("attime").unwrap(), 0);
    // Non-scoped rows survive.
    assert_eq!(store.row_count("terminal").unwrap(), 1);
}

#[test]
fn retention_with_wide_window_deletes_nothing() {
    let now = 1_000 * 86_400;
    let (mut store, _) = event_store_with_ages(&[1, 2, 3], now);
    let policy = RetentionPolicy::new(30 * 86_400, retention_scope(), "atTime");
    assert_eq!(store.apply_retention(&policy, now).unwrap(), 0);
    assert_eq!(store.row_count("event").unwrap(), 3);
}

#[test]
fn retention_mixed_ages_matches_filter_oracle() {
    let now = 1_000 * 86_400;
    let ages = [0u64, 3, 6, 9, 12, 15];
    let (mut store, ids) = event_store_with_ages(&ages, now);
    let window_days = 7;
    let policy = RetentionPolicy::new(window_days * 86_400, retention_scope(), "atTime");
    store.apply_retention(&policy, now).unwrap();

    let survivors: BTreeSet<String> = ids
        .iter()
        .zip(ages.iter())
        .filter(|(_, age)| **age < window_days)
        .map(|(id, _)| id.clone())
        .collect();
    let got: BTreeSet<String> =
        store.table("event").unwrap().rows.iter().map(|r| r[0].clone()).collect();
    assert_eq!(got, survivors);
    // No dangling property rows.
    for row in &store.table("occursat").unwrap().rows {
        assert!(survivors.contains(&row[0]));
    }
    for row in &store.table("attime").unwrap().rows {
        assert!(survivors.contains(&row[0]));
    }
}

#[test]
fn retention_requires_scoped_time_table() {
    let now = 1_000 * 86_400;
    let (mut store, _) = event_store_with_ages(&[1], now);
    let policy = RetentionPolicy::new(86_400, ["event".to_string()], "atTime");
    assert!(matches!(
        store.apply_retention(&policy, now),
        Err(StoreError::MissingTimestampColumn(_))
    ));
}

#[test]
fn concurrent_readers_share_the_store() {
    // Writes take `&mut self`, reads `&self`: the single-writer contract is
    // enforced at compile time, and shared readers are safe.
    let now = 1_000 * 86_400;
    let (store, _) = event_store_with_ages(&[1, 2, 3], now);
    let store = std::sync::Arc::new(store);
    let mut handles = Vec::new();
    for _ in 0..4 {
        let s = store.clone();
        handles.push(std::thread::spawn(move || {
            let rs = s
                .execute(&SqlText::minimal(
                    "SELECT DISTINCT t0.s, t1.id FROM attime t0, event t1 WHERE t1.id = t0.s",
                ))
                .unwrap();
            rs.len()
        }));
    }
    for h in handles {
        assert_eq!(h.join().unwrap(), 3);
    }
}

#[test]
fn csv_export_import_round_trip() {
    let now = 1_000 * 86_400;
    let (store, _) = event_store_with_ages(&[1, 2], now);
    let csv = export_table_csv(&store, "attime").unwrap();
    assert!(csv.starts_with("s,v\n"));

    let o = parse_ontology(
        "Class(Event) Class(Terminal) ObjectProperty(occursAt) DataProperty(atTime)",
    )
    .unwrap();
    let mut fresh = DataStore::new(&o);
    let n = import_table_csv(&mut fresh, "attime", &csv).unwrap();
    assert_eq!(n, 2);
    assert_eq!(export_table_csv(&fresh, "attime").unwrap(), csv);
}
