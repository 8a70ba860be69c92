//! Shows the per-phase query accounting both oracles keep: where the probes
//! went, how many came back positive, and how the spend compares to n/p.
//!
//!     cargo run --release --example query_ledger -- [n] [p]

use hamseeker::{generate_gnp, Parameters};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(8000);
    let p: f64 = args
        .next()
        .and_then(|s| s.parse().ok())
        .unwrap_or(4.0 * (n as f64).ln() / n as f64);
    let params = Parameters::desk();
    let g = generate_gnp(n, p, 7);

    let (out, ledger) = hamseeker::matrix::solve_matrix(&g, p, &params);
    println!("matrix model ({}):", out.tag());
    for (phase, count) in &ledger.phases {
        let share = 100.0 * *count as f64 / ledger.total_queries as f64;
        println!("  {phase:<14} {count:>9}  ({share:4.1}%)");
    }
    println!(
        "  total {} probes, {} ones, {:.3} of the n/p yardstick\n",
        ledger.total_queries,
        ledger.total_ones,
        ledger.total_queries as f64 / (n as f64 / p)
    );

    let (out, ledger) = hamseeker::list::solve_list(&g, p, 99, &params);
    println!("list model ({}):", out.tag());
    for (phase, count) in &ledger.phases {
        let share = 100.0 * *count as f64 / ledger.total_queries as f64;
        println!("  {phase:<14} {count:>9}  ({share:4.1}%)");
    }
    println!(
        "  total {} reads, {} of budget {}",
        ledger.total_queries,
        ledger.total_ones,
        ledger.budget.map(|b| b.to_string()).unwrap_or_default()
    );
}
