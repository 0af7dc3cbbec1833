use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use quekno::generator::Objective;
use quekno::graph::ArchitectureGraph;
use quekno::perm::PermType;
use quekno::route::{self, RouterConfig};
use quekno::suite::{self, CellStats, SuiteConfig, SuiteEntry};
use quekno::verify::{self, ratio_f64, Transcript};
use quekno::{Circuit, GraphSize};

/// Benchmark circuits for qubit mapping with known near-optimal costs.
#[derive(Parser)]
#[command(name = "quekno", version)]
struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark suite: QASM files, JSON sidecars and a manifest.
    Generate(GenerateArgs),
    /// Replay every sidecar in a suite, or check one external transcript.
    Verify(VerifyArgs),
    /// Route every circuit of a suite and compare with the known ratios.
    Evaluate(EvaluateArgs),
    /// Per-cell statistics of a suite.
    Stats(StatsArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    ag: String,
    #[arg(long)]
    objective: Objective,
    #[arg(long = "perm-type", value_delimiter = ',')]
    perm_type: Vec<PermType>,
    #[arg(long = "graph-size", value_delimiter = ',')]
    graph_size: Vec<GraphSize>,
    #[arg(long = "qbg-ratio", value_delimiter = ',')]
    qbg_ratio: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    costs: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, env = "QUEKNO_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite directory.
    dir: Option<PathBuf>,
    /// Transcript JSON to validate against `--circuit` on `--ag`.
    #[arg(long, requires_all = ["circuit", "ag"], conflicts_with = "dir")]
    transcript: Option<PathBuf>,
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long)]
    ag: Option<String>,
}

#[derive(Args)]
struct EvaluateArgs {
    dir: PathBuf,
    /// Directory of `<stem>.json` transcripts to score instead of routing.
    #[arg(long)]
    transcripts: Option<PathBuf>,
    /// CSV destination (stdout if absent).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, env = "QUEKNO_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 20)]
    lookahead: usize,
}

#[derive(Args)]
struct StatsArgs {
    dir: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("global pool is configured once");
    }
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Stats(a) => stats(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

enum Failure {
    Usage(String),
    Run(String),
}

fn run_err(e: impl ToString) -> Failure {
    Failure::Run(e.to_string())
}

fn generate(a: GenerateArgs) -> Result<ExitCode, Failure> {
    ArchitectureGraph::builtin(&a.ag).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut cfg = SuiteConfig::standard(&a.ag, a.objective, a.seed);
    if !a.perm_type.is_empty() {
        cfg.perm_types = a.perm_type;
    }
    if !a.graph_size.is_empty() {
        cfg.graph_sizes = a.graph_size;
    }
    if !a.qbg_ratio.is_empty() {
        cfg.qbg_ratios = a.qbg_ratio;
    }
    if !a.costs.is_empty() {
        cfg.costs = a.costs;
    }
    cfg.count = a.count;
    if let Some((_, spec)) = cfg.specs().first() {
        spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let summaries = suite::generate_suite(&cfg, &a.out).map_err(run_err)?;
    let metas: Vec<_> = suite::load_suite(&a.out)
        .map_err(run_err)?
        .into_iter()
        .filter_map(Result::ok)
        .map(|e| e.metadata)
        .collect();
    print_table(&suite::cell_stats(&metas));
    println!("{} circuits written to {}", summaries.len(), a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn print_table(stats: &[CellStats]) {
    println!(
        "{:<10} {:<7} {:>6} {:>5} {:>4} {:>9} {:>9} {:>9} {:>8}",
        "perm", "size", "ratio", "cost", "n", "mean_rho", "min_rho", "max_rho", "depth"
    );
    for s in stats {
        println!(
            "{:<10} {:<7} {:>6} {:>5} {:>4} {:>9.4} {:>9.4} {:>9.4} {:>8.1}",
            s.perm_type.to_string(),
            s.graph_size.to_string(),
            s.qbg_ratio,
            s.target_cost,
            s.count,
            s.mean_known_rho,
            s.min_known_rho,
            s.max_known_rho,
            s.mean_depth
        );
    }
}

fn verify_cmd(a: VerifyArgs) -> Result<ExitCode, Failure> {
    if let Some(tpath) = a.transcript {
        let circuit_path = a.circuit.expect("required by clap");
        let ag = ArchitectureGraph::builtin(&a.ag.expect("required by clap"))
            .map_err(|e| Failure::Usage(e.to_string()))?;
        let text = fs::read_to_string(&circuit_path)
            .map_err(|e| run_err(format!("{}: {e}", circuit_path.display())))?;
        let circuit = Circuit::from_qasm(&text)
            .map_err(|e| run_err(format!("{}: {e}", circuit_path.display())))?;
        let ttext = fs::read_to_string(&tpath)
            .map_err(|e| run_err(format!("{}: {e}", tpath.display())))?;
        let t = Transcript::from_json(&ttext)
            .map_err(|e| run_err(format!("{}: {e}", tpath.display())))?;
        let report = verify::validate_transcript(&circuit, &ag, &t);
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("reports serialize")
        );
        return Ok(if report.valid {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }
    let Some(dir) = a.dir else {
        return Err(Failure::Usage(
            "give a suite directory or --transcript/--circuit/--ag".into(),
        ));
    };
    let entries = suite::load_suite(&dir).map_err(run_err)?;
    let total = entries.len();
    let failures: Vec<String> = entries
        .into_par_iter()
        .filter_map(|entry| match entry {
            Err(e) => Some(e.to_string()),
            Ok(entry) => suite::check_entry(&entry)
                .err()
                .map(|msg| format!("{}: {msg}", entry.sidecar.display())),
        })
        .collect();
    for f in &failures {
        eprintln!("FAIL {f}");
    }
    println!("{}/{} valid", total - failures.len(), total);
    Ok(if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn load_valid(dir: &Path) -> Result<Vec<SuiteEntry>, Failure> {
    let mut out = Vec::new();
    for e in suite::load_suite(dir).map_err(run_err)? {
        out.push(e.map_err(run_err)?);
    }
    Ok(out)
}

fn evaluate(a: EvaluateArgs) -> Result<ExitCode, Failure> {
    let entries = load_valid(&a.dir)?;
    let rows: Vec<Result<String, String>> = entries
        .par_iter()
        .map(|e| {
            let meta = &e.metadata;
            let ag = ArchitectureGraph::builtin(&meta.spec.ag_name).map_err(|x| x.to_string())?;
            let objective = meta.spec.objective;
            let report = match &a.transcripts {
                Some(tdir) => {
                    let p = tdir.join(format!("{}.json", e.stem));
                    let text = fs::read_to_string(&p).map_err(|x| format!("{}: {x}", p.display()))?;
                    let t = Transcript::from_json(&text).map_err(|x| format!("{}: {x}", p.display()))?;
                    verify::validate_transcript(&e.circuit, &ag, &t)
                }
                None => {
                    let cfg = RouterConfig {
                        objective,
                        lookahead_window: a.lookahead,
                        seed: a.seed,
                        restarts: a.restarts,
                        ..RouterConfig::default()
                    };
                    route::route(&e.circuit, &ag, &cfg)
                        .map_err(|x| x.to_string())?
                        .report
                }
            };
            if let Some(v) = &report.first_violation {
                return Err(format!("{}: invalid transcript: {v}", e.stem));
            }
            let achieved = report.rho(objective).map_or(1.0, ratio_f64);
            Ok(format!(
                "{}.qasm,{:.6},{:.6},{:.6}",
                e.stem,
                meta.known_rho,
                achieved,
                achieved / meta.known_rho
            ))
        })
        .collect();
    let mut csv = String::from("file,known_rho,achieved_rho,ratio\n");
    let mut failed = false;
    for r in rows {
        match r {
            Ok(line) => {
                csv.push_str(&line);
                csv.push('\n');
            }
            Err(msg) => {
                eprintln!("FAIL {msg}");
                failed = true;
            }
        }
    }
    emit(a.csv.as_deref(), &csv)?;
    Ok(if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn stats(a: StatsArgs) -> Result<ExitCode, Failure> {
    let entries = load_valid(&a.dir)?;
    let cells = suite::cell_stats(entries.iter().map(|e| &e.metadata));
    print_table(&cells);
    if let Some(path) = a.csv {
        let mut csv = format!("{}\n", CellStats::CSV_HEADER);
        for c in &cells {
            csv.push_str(&c.csv_row());
            csv.push('\n');
        }
        emit(Some(&path), &csv)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => suite::write_atomic(p, text.as_bytes()).map_err(run_err),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(run_err),
    }
}
