//! Per-day KPI latency benchmark over the growing store, cumulative or
//! retention-windowed, with a trend test per path.

use std::time::Instant;

use ontomon_store::{DataStore, RetentionPolicy};

use crate::abox::{event_assertions, ils_ontology, static_assertions};
use crate::fixture::NetworkFixture;
use crate::generate::{day_period, generate_scenario, GenParams};
use crate::kpi::{compute_kpi, event_scope_tables, KpiContext, KpiPath, Period};
use crate::trend::trend_test;
use crate::IlsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMode {
    /// The store accumulates every day's events.
    Cumulative,
    /// A recency window is applied after each day's ingestion.
    Windowed,
}

impl BenchMode {
    pub fn label(&self) -> &'static str {
        match self {
            BenchMode::Cumulative => "cumulative",
            BenchMode::Windowed => "windowed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchParams {
    pub itus_per_terminal_day: u32,
    pub days: u32,
    pub seed: u64,
    /// Latency repetitions per (day, path); the median is reported.
    pub reps: u32,
    pub kpi: String,
    pub paths: Vec<KpiPath>,
    /// Window for [`BenchMode::Windowed`], in days.
    pub retention_window_days: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayMeasure {
    pub day: u32,
    pub path: KpiPath,
    pub median_ms: f64,
    pub reps: u32,
    pub kpi_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendStat {
    pub path: KpiPath,
    pub slope: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub mode: BenchMode,
    pub kpi: String,
    pub per_day: Vec<DayMeasure>,
    pub trends: Vec<TrendStat>,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Generate a scenario, ingest it day by day, and measure per-day KPI
/// latency for each path on the quiesced store.
pub fn run_benchmark(
    fixture: &NetworkFixture,
    params: &BenchParams,
    mode: BenchMode,
) -> Result<BenchmarkReport, IlsError> {
    if params.reps == 0 {
        return Err(IlsError::InvalidParams("reps must be >= 1".into()));
    }
    let gen = GenParams {
        itus_per_terminal_day: params.itus_per_terminal_day,
        days: params.days,
        seed: params.seed,
    };
    let log = generate_scenario(fixture, &gen)?;
    let ontology = ils_ontology();
    let mut store = DataStore::new(&ontology);
    store.ingest(&static_assertions(fixture))?;
    // Parties are small and period-independent; load them up front.
    store.ingest(&event_assertions(&[], &log.parties))?;

    let policy = RetentionPolicy::new(
        params.retention_window_days.max(1) * 86_400,
        event_scope_tables(),
        "atTime",
    );

    let mut per_day = Vec::new();
    for day in 1..=params.days {
        let (start, end) = day_period(day);
        let day_events: Vec<_> =
            log.events.iter().filter(|e| e.t >= start && e.t < end).cloned().collect();
        store.ingest(&event_assertions(&day_events, &[]))?;
        if mode == BenchMode::Windowed {
            store.apply_retention(&policy, end)?;
        }

        let ctx = KpiContext {
            log: &log,
            store: &store,
            ontology: &ontology,
            terminals: fixture.terminals.len(),
        };
        let period = Period { start, end };
        for path in &params.paths {
            let mut samples_ms = Vec::with_capacity(params.reps as usize);
            let mut kpi_value = 0.0;
            for _ in 0..params.reps {
                let started = Instant::now();
                let r = compute_kpi(&ctx, &params.kpi, period, *path)?;
                samples_ms.push(started.elapsed().as_secs_f64() * 1e3);
                kpi_value = r.value;
            }
            per_day.push(DayMeasure {
                day,
                path: *path,
                median_ms: median(samples_ms),
                reps: params.reps,
                kpi_value,
            });
        }
    }

    // Windowed runs ramp until the window saturates; the trend is over the
    // steady state. Cumulative runs trend over every day.
    let first_day = match mode {
        BenchMode::Cumulative => 1,
        BenchMode::Windowed => {
            let steady = params.retention_window_days as u32 + 1;
            if params.days.saturating_sub(steady) + 1 >= 3 {
                steady
            } else {
                1
            }
        }
    };
    let mut trends = Vec::new();
    for path in &params.paths {
        let series: Vec<(f64, f64)> = per_day
            .iter()
            .filter(|m| m.path == *path && m.day >= first_day)
            .map(|m| (m.day as f64, m.median_ms))
            .collect();
        if series.len() >= 3 {
            let (slope, p_value) = trend_test(&series)?;
            trends.push(TrendStat { path: *path, slope, p_value });
        }
    }
    Ok(BenchmarkReport { mode, kpi: params.kpi.clone(), per_day, trends })
}

/// Report CSV: day, path, median latency, repetitions.
pub fn bench_report_csv(report: &BenchmarkReport) -> String {
    let mut out = String::from("day,path,median_ms,repetitions\n");
    for m in &report.per_day {
        out.push_str(&format!(
            "{},{},{:.4},{}\n",
            m.day,
            m.path.label(),
            m.median_ms,
            m.reps
        ));
    }
    out
}

/// Trend summary CSV: mode, path, slope, p-value.
pub fn trend_summary_csv(reports: &[&BenchmarkReport]) -> String {
    let mut out = String::from("mode,path,slope_ms_per_day,p_value\n");
    for r in reports {
        for t in &r.trends {
            out.push_str(&format!(
                "{},{},{:.6},{:.6}\n",
                r.mode.label(),
                t.path.label(),
                t.slope,
                t.p_value
            ));
        }
    }
    out
}

/// Plot-data CSV: x, y, series label — one series per (mode, path).
pub fn plot_data_csv(reports: &[&BenchmarkReport]) -> String {
    let mut out = String::from("x,y,series\n");
    for r in reports {
        for m in &r.per_day {
            out.push_str(&format!(
                "{},{:.4},{}_{}\n",
                m.day,
                m.median_ms,
                r.mode.label(),
                m.path.label()
            ));
        }
    }
    out
}
