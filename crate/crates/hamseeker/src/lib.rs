//! Hamilton cycle solvers for random graphs under metered oracle access.
//!
//! Two query models are supported: randomly ordered adjacency lists read
//! sequentially (linear total work target) and single-entry adjacency-matrix
//! probes (about n/p probes target). Each solver returns a verified Hamilton
//! cycle, a verified non-Hamiltonicity certificate (a vertex set that no
//! 2-matching saturates), or an honest failure code.

pub mod bench;
pub mod graph;
pub mod list;
pub mod matching;
pub mod matrix;
pub mod oracle;
pub mod outcome;
pub mod params;
pub mod rotation;
pub mod verify;

pub use graph::{generate_gnp, Graph};
pub use outcome::{FailureCode, HamiltonCycle, SolverOutcome};
pub use params::{Parameters, ScaleMode};
