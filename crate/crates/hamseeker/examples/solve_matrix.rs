//! Runs the matrix-model solver on G(n,p) instances and reports the query
//! count against the n/p yardstick.
//!
//!     cargo run --release --example solve_matrix -- [n] [p] [trials]

use hamseeker::matrix::solve_matrix;
use hamseeker::{generate_gnp, Parameters, SolverOutcome};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let p: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let trials: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let params = Parameters::desk();
    let yardstick = n as f64 / p;

    let mut ratios = Vec::new();
    for seed in 0..trials {
        let g = generate_gnp(n, p, seed);
        let t0 = std::time::Instant::now();
        let (out, ledger) = solve_matrix(&g, p, &params);
        let ratio = ledger.total_queries as f64 / yardstick;
        println!(
            "seed {seed:3}  {:15}  queries {:9}  ratio {ratio:5.3}  {:6.2?}",
            out.tag(),
            ledger.total_queries,
            t0.elapsed()
        );
        if let SolverOutcome::Hamiltonian(c) = &out {
            assert!(hamseeker::verify::verify_cycle(&g, c));
            ratios.push(ratio);
        }
    }
    if !ratios.is_empty() {
        ratios.sort_by(|a, b| a.total_cmp(b));
        println!(
            "successes {}/{trials}  median ratio {:.3}  max {:.3}",
            ratios.len(),
            ratios[ratios.len() / 2],
            ratios.last().unwrap()
        );
    }
}
