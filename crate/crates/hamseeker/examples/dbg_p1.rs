use hamseeker::{generate_gnp, Parameters};
fn main() {
    let n = 10000usize;
    let p = 3.0 * (n as f64).ln() / n as f64;
    for seed in [13u64, 35, 43, 84, 95] {
        let g = generate_gnp(n, p, seed);
        let (out, led) = hamseeker::list::solve_list(&g, p, seed ^ 0x9e37_79b9, &Parameters::desk());
        println!("seed {}: {} ({} queries) mindeg={}", seed, out.tag(), led.total_queries, g.min_degree());
        if let hamseeker::SolverOutcome::Failure(code) = out { println!("  code {}", code); }
    }
}
