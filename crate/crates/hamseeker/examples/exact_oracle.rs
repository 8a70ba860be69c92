//! Exercises the exact Hamiltonicity oracle on well-known small graphs.
//!
//!     cargo run --release --example exact_oracle

use hamseeker::verify::{exact_hamiltonian, ExactResult};
use hamseeker::Graph;

fn report(name: &str, g: &Graph) {
    match exact_hamiltonian(g) {
        Ok(ExactResult::Cycle(c)) => println!("{name:<16} hamiltonian: {:?}", c.order),
        Ok(ExactResult::Absent) => println!("{name:<16} non-hamiltonian"),
        Err(e) => println!("{name:<16} {e}"),
    }
}

fn main() {
    report("K4", &Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap());
    report("star K1,3", &Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap());

    // Petersen graph: 3-regular, famously not Hamiltonian
    let outer = [(0u32, 1u32), (1, 2), (2, 3), (3, 4), (0, 4)];
    let spokes = [(0u32, 5u32), (1, 6), (2, 7), (3, 8), (4, 9)];
    let inner = [(5u32, 7u32), (7, 9), (6, 9), (6, 8), (5, 8)];
    let edges: Vec<(u32, u32)> = outer
        .iter()
        .chain(&spokes)
        .chain(&inner)
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    report("Petersen", &Graph::from_edges(10, &edges).unwrap());

    // C20 with one chord: still Hamiltonian
    let mut c20: Vec<(u32, u32)> = (0..19).map(|i| (i, i + 1)).collect();
    c20.push((0, 19));
    c20.push((3, 11));
    report("C20 + chord", &Graph::from_edges(20, &c20).unwrap());
}
