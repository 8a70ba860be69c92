//! Metered oracle layers. Solvers may read the graph only through these.

use crate::graph::Graph;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::collections::HashSet;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("query discipline violation: {0}")]
    DisciplineViolation(&'static str),
    #[error("query budget exceeded")]
    BudgetExceeded,
}

/// Query accounting, shared by both oracles.
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct QueryLedger {
    pub total_queries: u64,
    pub total_ones: u64,
    pub budget: Option<u64>,
    pub phases: BTreeMap<String, u64>,
    #[serde(skip)]
    current_phase: String,
    /// charges since the last phase switch, folded in lazily so the hot
    /// path never touches the map
    #[serde(skip)]
    pending: u64,
}

impl QueryLedger {
    fn new(budget: Option<u64>) -> QueryLedger {
        QueryLedger {
            budget,
            current_phase: "setup".into(),
            ..QueryLedger::default()
        }
    }

    fn flush(&mut self) {
        if self.pending > 0 {
            *self.phases.entry(self.current_phase.clone()).or_insert(0) += self.pending;
            self.pending = 0;
        }
    }

    pub fn set_phase(&mut self, label: &str) {
        self.flush();
        self.current_phase = label.to_string();
    }

    pub fn phase(&self) -> &str {
        &self.current_phase
    }

    /// Clone with the pending phase tally folded in.
    pub fn snapshot(&self) -> QueryLedger {
        let mut s = self.clone();
        s.flush();
        s
    }

    fn charge(&mut self, hit: bool) -> Result<(), OracleError> {
        if let Some(b) = self.budget {
            if self.total_queries >= b {
                return Err(OracleError::BudgetExceeded);
            }
        }
        self.total_queries += 1;
        if hit {
            self.total_ones += 1;
        }
        self.pending += 1;
        Ok(())
    }

    pub fn remaining(&self) -> Option<u64> {
        self.budget.map(|b| b.saturating_sub(self.total_queries))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "total_queries": self.total_queries,
            "total_ones": self.total_ones,
            "budget": self.budget,
            "phases": self.phases,
        })
    }
}

/// Randomly ordered adjacency lists with sequential-read discipline.
///
/// Each list is a uniformly shuffled permutation of the true neighborhood,
/// seeded independently of the graph so the same graph can be re-presented
/// with fresh orderings. Reads are strictly sequential per vertex; after the
/// first undefined answer a vertex is closed; a hard per-list cap (3q in paper
/// mode) is enforced.
pub struct AdjacencyListOracle<'g> {
    graph: &'g Graph,
    lists: Vec<Vec<u32>>,
    cursor: Vec<u32>,
    closed: Vec<bool>,
    prefix_cap: usize,
    ledger: QueryLedger,
}

impl<'g> AdjacencyListOracle<'g> {
    pub fn new(
        graph: &'g Graph,
        shuffle_seed: u64,
        prefix_cap: usize,
        budget: Option<u64>,
    ) -> AdjacencyListOracle<'g> {
        let n = graph.n();
        let mut lists = Vec::with_capacity(n);
        for v in 0..n {
            let mut list = graph.neighbors(v as u32).to_vec();
            // one stream per vertex keeps orderings independent of read order
            let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed ^ (v as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            list.shuffle(&mut rng);
            lists.push(list);
        }
        AdjacencyListOracle {
            graph,
            lists,
            cursor: vec![0; n],
            closed: vec![false; n],
            prefix_cap,
            ledger: QueryLedger::new(budget),
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Sequential read of the next entry of L_v. `None` encodes "undefined".
    pub fn list_query(&mut self, v: u32) -> Result<Option<u32>, OracleError> {
        let vi = v as usize;
        if self.closed[vi] {
            return Err(OracleError::DisciplineViolation(
                "list closed after undefined answer",
            ));
        }
        if (self.cursor[vi] as usize) >= self.prefix_cap {
            return Err(OracleError::DisciplineViolation("per-list prefix cap reached"));
        }
        self.ledger.charge(true)?; // provisional; undefined reads count as queries too
        let idx = self.cursor[vi] as usize;
        self.cursor[vi] += 1;
        if idx < self.lists[vi].len() {
            Ok(Some(self.lists[vi][idx]))
        } else {
            self.ledger.total_ones -= 1; // the answer was "undefined", not an edge
            self.closed[vi] = true;
            Ok(None)
        }
    }

    /// Entries of L_v already served, in order.
    pub fn served(&self, v: u32) -> &[u32] {
        let c = (self.cursor[v as usize] as usize).min(self.lists[v as usize].len());
        &self.lists[v as usize][..c]
    }

    pub fn cursor(&self, v: u32) -> usize {
        self.cursor[v as usize] as usize
    }

    pub fn is_closed(&self, v: u32) -> bool {
        self.closed[v as usize]
    }

    /// True when the next read of v would be legal under C2/C4.
    pub fn can_read(&self, v: u32) -> bool {
        !self.closed[v as usize] && (self.cursor[v as usize] as usize) < self.prefix_cap
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn set_phase(&mut self, label: &str) {
        self.ledger.set_phase(label);
    }

    pub fn ledger_snapshot(&self) -> QueryLedger {
        self.ledger.snapshot()
    }
}

/// Symmetric membership of queried matrix entries. Dense bitset for small n,
/// hashed pairs for large n.
enum QueriedSet {
    Bits { n: usize, bits: Vec<u64> },
    Hash(HashSet<u64>),
}

impl QueriedSet {
    fn new(n: usize) -> QueriedSet {
        if n <= 32_768 {
            QueriedSet::Bits {
                n,
                bits: vec![0u64; (n * n + 63) / 64],
            }
        } else {
            QueriedSet::Hash(HashSet::new())
        }
    }

    fn key(i: u32, j: u32) -> u64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        ((a as u64) << 32) | b as u64
    }

    fn contains(&self, i: u32, j: u32) -> bool {
        match self {
            QueriedSet::Bits { n, bits } => {
                let idx = i as usize * n + j as usize;
                bits[idx / 64] >> (idx % 64) & 1 == 1
            }
            QueriedSet::Hash(set) => set.contains(&Self::key(i, j)),
        }
    }

    fn insert(&mut self, i: u32, j: u32) {
        match self {
            QueriedSet::Bits { n, bits } => {
                for (a, b) in [(i, j), (j, i)] {
                    let idx = a as usize * *n + b as usize;
                    bits[idx / 64] |= 1 << (idx % 64);
                }
            }
            QueriedSet::Hash(set) => {
                set.insert(Self::key(i, j));
            }
        }
    }
}

/// Adjacency-matrix probe oracle. Probing (i,j) also reveals (j,i); cached
/// repeats cost nothing.
pub struct AdjacencyMatrixOracle<'g> {
    graph: &'g Graph,
    queried: QueriedSet,
    row_queries: Vec<u32>,
    row_ones: Vec<u32>,
    ledger: QueryLedger,
}

impl<'g> AdjacencyMatrixOracle<'g> {
    pub fn new(graph: &'g Graph, budget: Option<u64>) -> AdjacencyMatrixOracle<'g> {
        let n = graph.n();
        AdjacencyMatrixOracle {
            graph,
            queried: QueriedSet::new(n),
            row_queries: vec![0; n],
            row_ones: vec![0; n],
            ledger: QueryLedger::new(budget),
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn matrix_query(&mut self, i: u32, j: u32) -> Result<bool, OracleError> {
        if i == j {
            return Err(OracleError::DisciplineViolation("diagonal entry"));
        }
        let bit = self.graph.has_edge(i, j);
        if self.queried.contains(i, j) {
            return Ok(bit); // cached, free
        }
        self.ledger.charge(bit)?;
        self.queried.insert(i, j);
        self.row_queries[i as usize] += 1;
        self.row_queries[j as usize] += 1;
        if bit {
            self.row_ones[i as usize] += 1;
            self.row_ones[j as usize] += 1;
        }
        Ok(bit)
    }

    pub fn is_queried(&self, i: u32, j: u32) -> bool {
        i != j && self.queried.contains(i, j)
    }

    /// Fresh queries that touched row v (either orientation).
    pub fn row_queries(&self, v: u32) -> usize {
        self.row_queries[v as usize] as usize
    }

    /// Ones revealed in row v.
    pub fn row_ones(&self, v: u32) -> usize {
        self.row_ones[v as usize] as usize
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn set_phase(&mut self, label: &str) {
        self.ledger.set_phase(label);
    }

    pub fn ledger_snapshot(&self) -> QueryLedger {
        self.ledger.snapshot()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_gnp;
    use crate::graph::Graph;

    fn k(n: usize) -> Graph {
        generate_gnp(n, 1.0, 0)
    }

    #[test]
    fn list_drain_k3() {
        let g = k(3);
        let mut o = AdjacencyListOracle::new(&g, 1, 10, None);
        let a = o.list_query(0).unwrap().unwrap();
        let b = o.list_query(0).unwrap().unwrap();
        let mut got = vec![a, b];
        got.sort();
        assert_eq!(got, vec![1, 2]);
        assert_eq!(o.list_query(0).unwrap(), None);
        assert!(o.list_query(0).is_err()); // closed by C4
        assert_eq!(o.ledger().total_queries, 3);
        assert_eq!(o.ledger().total_ones, 2);
    }

    #[test]
    fn isolated_vertex_undefined_immediately() {
        let g = Graph::from_edges(2, &[]).unwrap();
        let mut o = AdjacencyListOracle::new(&g, 1, 10, None);
        assert_eq!(o.list_query(0).unwrap(), None);
    }

    #[test]
    fn prefix_cap_enforced() {
        let g = k(8);
        let mut o = AdjacencyListOracle::new(&g, 1, 3, None);
        for _ in 0..3 {
            o.list_query(0).unwrap();
        }
        assert!(matches!(
            o.list_query(0),
            Err(OracleError::DisciplineViolation(_))
        ));
    }

    #[test]
    fn list_shuffle_deterministic_and_complete() {
        let g = generate_gnp(50, 0.3, 9);
        let drain = |seed: u64| -> Vec<Vec<u32>> {
            let mut o = AdjacencyListOracle::new(&g, seed, usize::MAX, None);
            (0..50u32)
                .map(|v| {
                    let mut out = Vec::new();
                    while let Ok(Some(u)) = o.list_query(v) {
                        out.push(u);
                    }
                    out
                })
                .collect()
        };
        let a = drain(5);
        assert_eq!(a, drain(5));
        // pooled answers reconstruct the hidden edge set
        for v in 0..50u32 {
            let mut sorted = a[v as usize].clone();
            sorted.sort();
            assert_eq!(sorted.as_slice(), g.neighbors(v));
        }
        assert_ne!(a, drain(6));
    }

    #[test]
    fn matrix_symmetry_and_cache() {
        let g = k(4);
        let mut o = AdjacencyMatrixOracle::new(&g, None);
        assert!(o.matrix_query(0, 1).unwrap());
        assert!(o.matrix_query(1, 0).unwrap());
        assert_eq!(o.ledger().total_queries, 1);
        assert_eq!(o.ledger().total_ones, 1);
        assert!(o.matrix_query(0, 0).is_err());
    }

    #[test]
    fn matrix_empty_graph() {
        let g = Graph::from_edges(5, &[]).unwrap();
        let mut o = AdjacencyMatrixOracle::new(&g, None);
        assert!(!o.matrix_query(2, 4).unwrap());
        assert_eq!(o.ledger().total_ones, 0);
    }

    #[test]
    fn ledger_phases_sum_to_total() {
        let g = k(6);
        let mut o = AdjacencyMatrixOracle::new(&g, None);
        o.set_phase("a");
        o.matrix_query(0, 1).unwrap();
        o.set_phase("b");
        o.matrix_query(0, 2).unwrap();
        o.matrix_query(0, 3).unwrap();
        let snap = o.ledger_snapshot();
        assert_eq!(snap.total_queries, 3);
        assert_eq!(snap.phases.values().sum::<u64>(), snap.total_queries);
        assert_eq!(snap.phases["a"], 1);
        assert_eq!(snap.phases["b"], 2);
    }

    #[test]
    fn budget_enforced() {
        let g = k(6);
        let mut o = AdjacencyMatrixOracle::new(&g, Some(2));
        o.matrix_query(0, 1).unwrap();
        o.matrix_query(0, 2).unwrap();
        assert!(matches!(o.matrix_query(0, 3), Err(OracleError::BudgetExceeded)));
    }

    #[test]
    fn fresh_ledger_zeroed() {
        let g = k(4);
        let o = AdjacencyMatrixOracle::new(&g, None);
        let snap = o.ledger_snapshot();
        assert_eq!(snap.total_queries, 0);
        assert_eq!(snap.total_ones, 0);
        assert!(snap.phases.is_empty());
    }
}
