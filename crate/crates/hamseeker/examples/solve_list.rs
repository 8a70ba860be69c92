//! Runs the adjacency-list solver over a handful of random instances and
//! prints the outcome, the query spend relative to the budget, and the
//! verification status of whatever the solver returned.
//!
//!     cargo run --release --example solve_list -- [n] [trials]

use hamseeker::verify;
use hamseeker::{generate_gnp, Parameters, SolverOutcome};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(4000);
    let trials: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let p = 3.0 * (n as f64).ln() / n as f64;
    let params = Parameters::desk();
    let mut wins = 0;
    for seed in 0..trials {
        let g = generate_gnp(n, p, seed);
        let (out, ledger) = hamseeker::list::solve_list(&g, p, seed ^ 0xabcd, &params);
        let status = match &out {
            SolverOutcome::Hamiltonian(c) => {
                assert!(verify::verify_cycle(&g, c));
                wins += 1;
                "cycle verified".to_string()
            }
            SolverOutcome::NonHamiltonian(s) => {
                assert!(verify::verify_certificate(&g, s).valid);
                format!("certificate over {} vertices verified", s.len())
            }
            SolverOutcome::Failure(code) => format!("gave up ({})", code),
        };
        println!(
            "seed {:2}  {:14} queries {:>9} ({:.1}% of budget)  {}",
            seed,
            out.tag(),
            ledger.total_queries,
            100.0 * ledger.total_queries as f64 / ledger.budget.unwrap_or(u64::MAX) as f64,
            status
        );
    }
    println!("{}/{} Hamiltonian at n={} p={:.5}", wins, trials, n, p);
}
