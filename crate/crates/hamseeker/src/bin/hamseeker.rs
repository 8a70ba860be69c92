//! Thin command-line front end over the library.
//!
//! Exit codes: 0 Hamiltonian, 1 NonHamiltonian, 2 Failure, 3 usage error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hamseeker::bench::{self, ExperimentSpec, ReportFormat};
use hamseeker::list::solve_list;
use hamseeker::matrix::solve_matrix;
use hamseeker::verify;
use hamseeker::{generate_gnp, Graph, Parameters, SolverOutcome};

#[derive(Parser)]
#[command(name = "hamseeker", about = "Hamilton cycle solvers under metered oracle access")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    List,
    Matrix,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one seeded G(n,p) instance through the chosen oracle model.
    Solve {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// parameter override, repeatable: --param list_budget_coeff=128
        #[arg(long = "param")]
        params: Vec<String>,
        /// write the cycle order or certificate set to this file
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Run a batch experiment described by a JSON spec file.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        /// output path; extension picks the format (.json or .csv)
        #[arg(long)]
        out: PathBuf,
        /// print the summary as JSON to stdout
        #[arg(long, default_value_t = true)]
        summary: bool,
    },
    /// Check a claimed non-Hamiltonicity certificate against a graph file.
    VerifyCert {
        #[arg(long)]
        graph: PathBuf,
        /// comma-separated vertex ids, e.g. "1,5,9"
        #[arg(long)]
        set: String,
    },
    /// Decide Hamiltonicity exactly (small n only).
    Exact {
        #[arg(long)]
        graph: PathBuf,
    },
}

fn load_graph(path: &PathBuf) -> Result<Graph, String> {
    let file = fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Graph::read_edge_list(std::io::BufReader::new(file)).map_err(|e| e.to_string())
}

fn outcome_exit(out: &SolverOutcome) -> ExitCode {
    match out {
        SolverOutcome::Hamiltonian(_) => ExitCode::from(0),
        SolverOutcome::NonHamiltonian(_) => ExitCode::from(1),
        SolverOutcome::Failure(_) => ExitCode::from(2),
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(3)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version are successful exits, everything else is usage
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(3);
            }
            print!("{e}");
            return ExitCode::from(0);
        }
    };
    match cli.command {
        Command::Solve { model, n, p, seed, params, emit } => {
            let mut pset = Parameters::desk();
            for kv in &params {
                let Some((k, v)) = kv.split_once('=') else {
                    return usage_error("--param expects key=value");
                };
                let Ok(v) = v.parse::<f64>() else {
                    return usage_error("--param value must be numeric");
                };
                if let Err(e) = bench::apply_override(&mut pset, k, v) {
                    return usage_error(&e);
                }
            }
            if !(0.0..=1.0).contains(&p) {
                return usage_error("p must lie in [0,1]");
            }
            let g = generate_gnp(n, p, seed);
            let (out, ledger) = match model {
                ModelArg::List => solve_list(&g, p, seed ^ 0x9e37_79b9, &pset),
                ModelArg::Matrix => solve_matrix(&g, p, &pset),
            };
            let payload = serde_json::json!({
                "outcome": out.tag(),
                "detail": match &out {
                    SolverOutcome::Hamiltonian(c) => serde_json::json!({"cycle_len": c.order.len()}),
                    SolverOutcome::NonHamiltonian(s) => serde_json::json!({"certificate": s}),
                    SolverOutcome::Failure(code) => serde_json::json!({"code": code.to_string()}),
                },
                "ledger": ledger.to_json(),
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
            if let Some(path) = emit {
                let body = match &out {
                    SolverOutcome::Hamiltonian(c) => c
                        .order
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    SolverOutcome::NonHamiltonian(s) => s
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    SolverOutcome::Failure(code) => code.to_string(),
                };
                if let Err(e) = fs::write(&path, body + "\n") {
                    eprintln!("error: write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            outcome_exit(&out)
        }
        Command::Bench { spec, out, summary } => {
            let raw = match fs::read_to_string(&spec) {
                Ok(r) => r,
                Err(e) => return usage_error(&format!("{}: {e}", spec.display())),
            };
            let spec: ExperimentSpec = match serde_json::from_str(&raw) {
                Ok(s) => s,
                Err(e) => return usage_error(&format!("bad spec: {e}")),
            };
            let format = match out.extension().and_then(|e| e.to_str()) {
                Some("json") => ReportFormat::Json,
                Some("csv") => ReportFormat::Csv,
                _ => return usage_error("--out must end in .json or .csv"),
            };
            let (records, sum) = match bench::run_experiment(&spec) {
                Ok(r) => r,
                Err(e) => return usage_error(&e),
            };
            if let Err(e) = fs::write(&out, bench::emit_report(&records, format)) {
                eprintln!("error: write {}: {e}", out.display());
                return ExitCode::from(2);
            }
            if summary {
                println!("{}", serde_json::to_string_pretty(&sum).unwrap());
            }
            ExitCode::from(0)
        }
        Command::VerifyCert { graph, set } => {
            let g = match load_graph(&graph) {
                Ok(g) => g,
                Err(e) => return usage_error(&e),
            };
            let ids: Result<Vec<u32>, _> =
                set.split(',').map(|s| s.trim().parse::<u32>()).collect();
            let Ok(ids) = ids else {
                return usage_error("--set expects comma-separated vertex ids");
            };
            if ids.iter().any(|&v| (v as usize) >= g.n()) {
                return usage_error("certificate vertex out of range");
            }
            let res = verify::verify_certificate(&g, &ids);
            println!(
                "{}",
                serde_json::json!({"valid": res.valid, "method": format!("{:?}", res.method)})
            );
            if res.valid {
                ExitCode::from(1) // the graph is certified non-Hamiltonian
            } else {
                ExitCode::from(2)
            }
        }
        Command::Exact { graph } => {
            let g = match load_graph(&graph) {
                Ok(g) => g,
                Err(e) => return usage_error(&e),
            };
            match verify::exact_hamiltonian(&g) {
                Ok(verify::ExactResult::Cycle(c)) => {
                    println!(
                        "hamiltonian {}",
                        c.order
                            .iter()
                            .map(|v| v.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    );
                    ExitCode::from(0)
                }
                Ok(verify::ExactResult::Absent) => {
                    println!("non_hamiltonian");
                    ExitCode::from(1)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
