use hamseeker::{generate_gnp, Parameters};
fn main() {
    let n = 2000; let p = 0.00283;
    let g = generate_gnp(n, p, 3);
    let params = Parameters::desk();
    eprintln!("min degree {}", g.min_degree());
    let t = std::time::Instant::now();
    let (out, ledger) = hamseeker::list::solve_list(&g, p, 3 ^ 0x9e3779b9, &params);
    eprintln!("{} in {:?}, q={}", out.tag(), t.elapsed(), ledger.total_queries);
}
