use hamseeker::{generate_gnp, Parameters};
use std::time::Instant;
fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(80000);
    let seed: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(5);
    let p = 3.0 * (n as f64).ln() / n as f64;
    let g = generate_gnp(n, p, seed);
    let t1 = Instant::now();
    let (out, led) = hamseeker::list::solve_list(&g, p, seed ^ 0x9e37_79b9, &Parameters::desk());
    eprintln!("solve: {:?} outcome={} queries={}", t1.elapsed(), out.tag(), led.total_queries);
    for (k, v) in &led.phases {
        eprintln!("  {k}: {v}");
    }
}
