//! Command-line entry point exposing every pipeline stage.
//!
//! Exit codes: 0 success, 1 user error (bad paths, bad syntax, bad
//! arguments), 2 internal error.

use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use ontomon_ca::{
    build_scenario, metrics_csv, run_scenario, scenario_from_csv, scenario_to_csv, CaError,
    Strategy, TRACTION_ONTOLOGY,
};
use ontomon_core::{parse_ontology, validate_ql_profile};
use ontomon_ddss::{generate_ddss, load_bundle, parse_rule_graph, serve, write_bundle, DdssService};
use ontomon_ils::{
    bench_report_csv, default_fixture, event_log_to_csv, generate_scenario, plot_data_csv,
    run_benchmark, trend_summary_csv, BenchMode, BenchParams, GenParams, KpiPath,
};
use ontomon_rewrite::{certain_answers, compile_to_sql, parse_cq, perfect_rewrite};
use ontomon_store::{generate_schema, DataStore};

#[derive(Parser)]
#[command(name = "ontomon", about = "Ontology-driven monitoring and diagnosis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Lazy,
    Eager,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Cumulative,
    Windowed,
    Both,
}

/// All machine-readable outputs are CSV; the flag pins that contract.
#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check an ontology against the QL profile
    Validate { onto: PathBuf },
    /// Print the rewriting of a query and its SQL compilation
    Rewrite { onto: PathBuf, query: String },
    /// Certain answers of a query over an ontology and a data file
    Query { onto: PathBuf, data: PathBuf, query: String },
    /// Generate a condition-analyzer scenario file
    CaGen {
        #[arg(long)]
        faults: u32,
        #[arg(long, default_value_t = 9)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the condition analyzer over a scenario file
    CaRun {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, default_value = "scenario")]
        label: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Generate a logistics event log
    SimGen {
        #[arg(long)]
        itus: u32,
        #[arg(long)]
        days: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Run the per-day KPI latency benchmark
    Bench {
        #[arg(long)]
        itus: u32,
        #[arg(long)]
        days: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        reps: u32,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
        #[arg(long, default_value_t = 3)]
        retention_days: u64,
        #[arg(long, default_value = "avg_itus_unloaded_per_hour")]
        kpi: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Generate a diagnostic service bundle from an ontology and rule graph
    DdssGen {
        onto: PathBuf,
        rules: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve a generated bundle over HTTP
    DdssServe {
        bundle: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

enum CliError {
    User(String),
    Internal(String),
}

fn user(e: impl std::fmt::Display) -> CliError {
    CliError::User(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| user(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| user(format!("{}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, text).map_err(|e| user(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { onto } => {
            let o = parse_ontology(&read(&onto)?).map_err(user)?;
            let report = validate_ql_profile(&o);
            if report.conformant {
                println!("conformant");
            } else {
                println!("non-conformant");
                for v in &report.violations {
                    println!("axiom {} {} {}", v.axiom_index, v.code, v.message);
                }
            }
            Ok(())
        }
        Command::Rewrite { onto, query } => {
            let o = parse_ontology(&read(&onto)?).map_err(user)?;
            let q = parse_cq(&query, &o).map_err(user)?;
            let ucq = perfect_rewrite(&q, &o).map_err(user)?;
            let (_, mapping) = generate_schema(&o);
            let sql = compile_to_sql(&ucq, &mapping).map_err(internal)?;
            println!("{ucq}");
            println!("--");
            println!("{}", sql.text);
            Ok(())
        }
        Command::Query { onto, data, query } => {
            let merged = format!("{}\n{}", read(&onto)?, read(&data)?);
            let o = parse_ontology(&merged).map_err(user)?;
            let q = parse_cq(&query, &o).map_err(user)?;
            let mut store = DataStore::new(&o);
            store.ingest(&o.abox).map_err(internal)?;
            let rs = certain_answers(&q, &o, &store).map_err(user)?;
            for row in &rs.rows {
                println!("{}", row.join(","));
            }
            Ok(())
        }
        Command::CaGen { faults, seed, out } => {
            if faults > 17 {
                return Err(user("fault count must be at most 17"));
            }
            let scn = build_scenario(faults, seed);
            write(&out, &scenario_to_csv(&scn))?;
            eprintln!("wrote {} rounds to {}", scn.rounds, out.display());
            Ok(())
        }
        Command::CaRun { scenario, strategy, cap, label, out, format: FormatArg::Csv } => {
            let scn = scenario_from_csv(&read(&scenario)?).map_err(user)?;
            let fixture = parse_ontology(TRACTION_ONTOLOGY).map_err(internal)?;
            let strategy = match strategy {
                StrategyArg::Lazy => Strategy::Lazy,
                StrategyArg::Eager => Strategy::Eager,
            };
            match run_scenario(&scn, &fixture, strategy, cap) {
                Ok(metrics) => {
                    let csv = metrics_csv(&[(label, metrics)]);
                    if let Some(path) = out {
                        write(&path, &csv)?;
                    }
                    print!("{csv}");
                    Ok(())
                }
                Err(CaError::CapExceeded(round)) => {
                    Err(user(format!("cap exceeded at round {round} (out of memory analogue)")))
                }
                Err(e) => Err(internal(e)),
            }
        }
        Command::SimGen { itus, days, seed, out, format: FormatArg::Csv } => {
            let fixture = default_fixture();
            let params = GenParams { itus_per_terminal_day: itus, days, seed };
            let log = generate_scenario(&fixture, &params).map_err(user)?;
            write(&out, &event_log_to_csv(&log))?;
            eprintln!("wrote {} events to {}", log.events.len(), out.display());
            Ok(())
        }
        Command::Bench { itus, days, seed, reps, mode, retention_days, kpi, out, format: FormatArg::Csv } => {
            let fixture = default_fixture();
            let params = BenchParams {
                itus_per_terminal_day: itus,
                days,
                seed,
                reps,
                kpi,
                paths: vec![KpiPath::Sql, KpiPath::Obda],
                retention_window_days: retention_days,
            };
            let modes: Vec<BenchMode> = match mode {
                ModeArg::Cumulative => vec![BenchMode::Cumulative],
                ModeArg::Windowed => vec![BenchMode::Windowed],
                ModeArg::Both => vec![BenchMode::Cumulative, BenchMode::Windowed],
            };
            let mut reports = Vec::new();
            for m in modes {
                let report = run_benchmark(&fixture, &params, m).map_err(user)?;
                write(
                    &out.join(format!("benchmark_{}.csv", m.label())),
                    &bench_report_csv(&report),
                )?;
                reports.push(report);
            }
            let refs: Vec<&_> = reports.iter().collect();
            write(&out.join("trend_summary.csv"), &trend_summary_csv(&refs))?;
            write(&out.join("plot_data.csv"), &plot_data_csv(&refs))?;
            print!("{}", trend_summary_csv(&refs));
            Ok(())
        }
        Command::DdssGen { onto, rules, out } => {
            let o = parse_ontology(&read(&onto)?).map_err(user)?;
            let g = parse_rule_graph(&read(&rules)?).map_err(user)?;
            let bundle = generate_ddss(&o, &g).map_err(user)?;
            write_bundle(&bundle, &out).map_err(internal)?;
            println!("digest {}", bundle.digest);
            for e in &bundle.endpoints {
                println!("{:?} {}", e.direction, e.path);
            }
            Ok(())
        }
        Command::DdssServe { bundle, port } => {
            let bundle = load_bundle(&bundle).map_err(user)?;
            let service = DdssService::new(bundle).map_err(internal)?;
            let handle = serve(Arc::new(Mutex::new(service)), port).map_err(internal)?;
            println!("listening on 127.0.0.1:{}", handle.port);
            loop {
                std::thread::sleep(std::time::Duration::from_secs(3600));
            }
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match run(cli) {
        Ok(()) => 0,
        Err(CliError::User(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            2
        }
    };
    std::process::exit(code);
}
