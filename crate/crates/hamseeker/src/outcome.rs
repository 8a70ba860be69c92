//! Solver result types.

/// A cyclic vertex order claimed to be a Hamilton cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamiltonCycle {
    pub order: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FailureCode {
    /// Partition-scan budget exhausted.
    Failure0,
    /// A burned component admitted no covering path set but full knowledge was
    /// missing, so no certificate could be issued.
    Failure1,
    /// p below the lower threshold with no certificate found.
    Failure2,
    /// Class imbalance beyond the rebalance reserve.
    Failure3,
    /// Could not thread a disjoint length-4 path for a balance vertex.
    Failure4,
    /// An unsaturated vertex could not seed an alternating tree.
    Failure5,
    /// An alternating tree stalled below its growth quota.
    Failure6,
    /// A tree-growth round exceeded its query allowance.
    Failure7,
    /// Query budget exhausted.
    Budget,
    /// Any other honest dead end (stalled rotation, unmet reserve, ...).
    Generic,
}

impl std::fmt::Display for FailureCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FailureCode::Failure0 => "FAILURE0",
            FailureCode::Failure1 => "FAILURE1",
            FailureCode::Failure2 => "FAILURE2",
            FailureCode::Failure3 => "FAILURE3",
            FailureCode::Failure4 => "FAILURE4",
            FailureCode::Failure5 => "FAILURE5",
            FailureCode::Failure6 => "FAILURE6",
            FailureCode::Failure7 => "FAILURE7",
            FailureCode::Budget => "BUDGET",
            FailureCode::Generic => "FAILURE",
        };
        f.write_str(s)
    }
}

/// Outcome of a solver run. `Hamiltonian` carries a cycle that passed
/// `verify::verify_cycle`; `NonHamiltonian` carries a vertex set that passed
/// `verify::verify_certificate`. Anything unverifiable degrades to `Failure`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverOutcome {
    Hamiltonian(HamiltonCycle),
    NonHamiltonian(Vec<u32>),
    Failure(FailureCode),
}

impl SolverOutcome {
    pub fn tag(&self) -> &'static str {
        match self {
            SolverOutcome::Hamiltonian(_) => "hamiltonian",
            SolverOutcome::NonHamiltonian(_) => "non_hamiltonian",
            SolverOutcome::Failure(_) => "failure",
        }
    }

    pub fn is_hamiltonian(&self) -> bool {
        matches!(self, SolverOutcome::Hamiltonian(_))
    }
}
