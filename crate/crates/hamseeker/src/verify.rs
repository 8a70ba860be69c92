//! Trust anchor: cycle validation, certificate validation, exact
//! Hamiltonicity, and reference combinatorial checkers used by tests.
//!
//! Certificate semantics: a vertex set S certifies non-Hamiltonicity iff no
//! 2-matching of the graph saturates S (gives every vertex of S exactly two
//! incident edges while no vertex gets more than two). Only edges incident to
//! S can matter: dropping edges not touching S never changes degrees on S.

use crate::graph::Graph;
use crate::outcome::HamiltonCycle;

pub fn verify_cycle(graph: &Graph, cycle: &HamiltonCycle) -> bool {
    let n = graph.n();
    if cycle.order.len() != n || n < 3 {
        return n == cycle.order.len() && n >= 3;
    }
    let mut seen = vec![false; n];
    for &v in &cycle.order {
        if v as usize >= n || seen[v as usize] {
            return false;
        }
        seen[v as usize] = true;
    }
    (0..n).all(|i| graph.has_edge(cycle.order[i], cycle.order[(i + 1) % n]))
}

pub fn min_degree_at_least(graph: &Graph, k: usize) -> bool {
    (0..graph.n()).all(|v| graph.degree(v as u32) >= k)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactResult {
    Cycle(HamiltonCycle),
    Absent,
}

#[derive(Debug, thiserror::Error)]
pub enum ExactError {
    #[error("n = {0} exceeds the exact-solver cap {1}")]
    TooLarge(usize, usize),
}

/// Hard cap for the exact oracle: subset DP below `HELD_KARP_CAP`,
/// exhaustive backtracking up to `EXACT_CAP`.
pub const HELD_KARP_CAP: usize = 24;
pub const EXACT_CAP: usize = 63;

/// Decides Hamiltonicity exactly. Subset dynamic program for n <= 24,
/// pruned backtracking for 25..=63.
pub fn exact_hamiltonian(graph: &Graph) -> Result<ExactResult, ExactError> {
    let n = graph.n();
    if n > EXACT_CAP {
        return Err(ExactError::TooLarge(n, EXACT_CAP));
    }
    if n < 3 {
        return Ok(ExactResult::Absent);
    }
    if !min_degree_at_least(graph, 2) {
        return Ok(ExactResult::Absent);
    }
    if n <= HELD_KARP_CAP {
        Ok(held_karp(graph))
    } else {
        Ok(backtracking(graph))
    }
}

fn adjacency_masks(graph: &Graph) -> Vec<u64> {
    (0..graph.n())
        .map(|v| {
            graph
                .neighbors(v as u32)
                .iter()
                .fold(0u64, |m, &u| m | 1 << u)
        })
        .collect()
}

fn held_karp(graph: &Graph) -> ExactResult {
    let n = graph.n();
    let adj = adjacency_masks(graph);
    // dp[mask] = bitset of endpoints v such that a path 0 -> v spans mask
    // (mask always contains vertex 0).
    let full = (1u32 << n) - 1;
    let mut dp = vec![0u32; 1usize << n];
    dp[1] = 1;
    for mask in 1u32..=full {
        if mask & 1 == 0 {
            continue;
        }
        let ends = dp[mask as usize];
        if ends == 0 {
            continue;
        }
        let mut e = ends;
        while e != 0 {
            let v = e.trailing_zeros() as usize;
            e &= e - 1;
            let mut cand = (adj[v] as u32) & !mask & full;
            while cand != 0 {
                let u = cand.trailing_zeros();
                cand &= cand - 1;
                dp[(mask | 1 << u) as usize] |= 1 << u;
            }
        }
    }
    let closing = dp[full as usize] & (adj[0] as u32);
    if closing == 0 {
        return ExactResult::Absent;
    }
    // Reconstruct backwards.
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    let mut v = closing.trailing_zeros() as usize;
    while mask != 1 {
        order.push(v as u32);
        let prev_mask = mask & !(1 << v);
        let cands = dp[prev_mask as usize] & (adj[v] as u32);
        debug_assert!(cands != 0);
        v = cands.trailing_zeros() as usize;
        mask = prev_mask;
    }
    order.push(0);
    order.reverse();
    ExactResult::Cycle(HamiltonCycle { order })
}

fn backtracking(graph: &Graph) -> ExactResult {
    let n = graph.n();
    let adj = adjacency_masks(graph);
    let full: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let mut path = Vec::with_capacity(n);
    path.push(0u32);
    if dfs_ham(&adj, full, n, 1u64, 0, &mut path) {
        ExactResult::Cycle(HamiltonCycle { order: path })
    } else {
        ExactResult::Absent
    }
}

fn dfs_ham(adj: &[u64], full: u64, n: usize, visited: u64, v: usize, path: &mut Vec<u32>) -> bool {
    if path.len() == n {
        return adj[v] & 1 == 1;
    }
    // prune: every unvisited vertex must keep at least 2 usable connections
    // (towards unvisited vertices or the two path endpoints)
    let open = !visited & full;
    let endpoints = 1u64 | (1u64 << v);
    let mut scan = open;
    while scan != 0 {
        let u = scan.trailing_zeros() as usize;
        scan &= scan - 1;
        if (adj[u] & (open | endpoints)).count_ones() < 2 {
            return false;
        }
    }
    // least-degree-first candidate order
    let mut cands: Vec<(u32, u32)> = Vec::new();
    let mut m = adj[v] & open;
    while m != 0 {
        let u = m.trailing_zeros();
        m &= m - 1;
        let deg = (adj[u as usize] & open).count_ones();
        cands.push((deg, u));
    }
    cands.sort_unstable();
    for &(_, u) in &cands {
        path.push(u);
        if dfs_ham(adj, full, n, visited | 1 << u, u as usize, path) {
            return true;
        }
        path.pop();
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMethod {
    Flow,
    Exhaustive,
}

#[derive(Debug, Clone)]
pub struct CertificateCheckResult {
    /// true: S admits no saturating 2-matching, so the graph is certified
    /// non-Hamiltonian.
    pub valid: bool,
    /// When invalid, a saturating 2-matching of S (edges incident to S).
    pub witness: Option<Vec<(u32, u32)>>,
    pub method: CheckMethod,
}

/// Decides whether any 2-matching of `graph` saturates `S`.
///
/// Branches over the sub-2-matchings inside E(S,S) by depth-first search and
/// fills the residual per-vertex demands with a bipartite maximum flow from S
/// to N(S) \ S (vertex capacity 2 outside S, edge capacity 1). This is exact:
/// edges not incident to S never change degrees on S.
pub fn verify_certificate(graph: &Graph, s: &[u32]) -> CertificateCheckResult {
    assert!(!s.is_empty(), "certificate set must be nonempty");
    decide_saturation(graph, s, CheckMethod::Flow)
}

/// Brute-force comparator used by tests: assigns two incident edges to every
/// S-vertex directly.
pub fn verify_certificate_exhaustive(graph: &Graph, s: &[u32]) -> CertificateCheckResult {
    assert!(!s.is_empty());
    decide_saturation(graph, s, CheckMethod::Exhaustive)
}

fn decide_saturation(graph: &Graph, s: &[u32], method: CheckMethod) -> CertificateCheckResult {
    let mut s_sorted = s.to_vec();
    s_sorted.sort_unstable();
    s_sorted.dedup();
    // a vertex of degree < 2 can never reach degree 2 in any subgraph
    if s_sorted.iter().any(|&v| graph.degree(v) < 2) {
        return CertificateCheckResult {
            valid: true,
            witness: None,
            method,
        };
    }
    let outcome = match method {
        CheckMethod::Flow => flow_saturation(graph, &s_sorted),
        CheckMethod::Exhaustive => match exhaustive_saturation(graph, &s_sorted) {
            Some(w) => SatOutcome::Found(w),
            None => SatOutcome::Absent,
        },
    };
    match outcome {
        SatOutcome::Found(w) => CertificateCheckResult {
            valid: false,
            witness: Some(w),
            method,
        },
        SatOutcome::Absent => CertificateCheckResult {
            valid: true,
            witness: None,
            method,
        },
        // search truncated: existence undecided, so never certify
        SatOutcome::Truncated => CertificateCheckResult {
            valid: false,
            witness: None,
            method,
        },
    }
}

enum SatOutcome {
    Found(Vec<(u32, u32)>),
    Absent,
    Truncated,
}

fn exhaustive_saturation(graph: &Graph, s: &[u32]) -> Option<Vec<(u32, u32)>> {
    // Assign each S-vertex exactly two of its incident edges, sharing edges
    // between S-endpoints, keeping every vertex at degree <= 2.
    let in_s: std::collections::HashSet<u32> = s.iter().copied().collect();
    let mut chosen: Vec<(u32, u32)> = Vec::new();
    let mut deg: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
    fn norm(u: u32, v: u32) -> (u32, u32) {
        if u < v {
            (u, v)
        } else {
            (v, u)
        }
    }
    fn rec(
        graph: &Graph,
        s: &[u32],
        in_s: &std::collections::HashSet<u32>,
        idx: usize,
        chosen: &mut Vec<(u32, u32)>,
        deg: &mut std::collections::HashMap<u32, u32>,
    ) -> bool {
        if idx == s.len() {
            return true;
        }
        let v = s[idx];
        let have = *deg.get(&v).unwrap_or(&0);
        let need = 2 - have as i32;
        if need <= 0 {
            return rec(graph, s, in_s, idx + 1, chosen, deg);
        }
        let nbrs: Vec<u32> = graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| {
                *deg.get(&u).unwrap_or(&0) < 2 && !chosen.contains(&norm(u, v))
            })
            .collect();
        let need = need as usize;
        if nbrs.len() < need {
            return false;
        }
        // choose `need` neighbors out of nbrs
        let k = nbrs.len();
        let mut pick = vec![0usize; need];
        fn choose(
            graph: &Graph,
            s: &[u32],
            in_s: &std::collections::HashSet<u32>,
            idx: usize,
            v: u32,
            nbrs: &[u32],
            start: usize,
            slot: usize,
            pick: &mut Vec<usize>,
            chosen: &mut Vec<(u32, u32)>,
            deg: &mut std::collections::HashMap<u32, u32>,
        ) -> bool {
            if slot == pick.len() {
                return rec(graph, s, in_s, idx + 1, chosen, deg);
            }
            for i in start..nbrs.len() {
                let u = nbrs[i];
                if *deg.get(&u).unwrap_or(&0) >= 2 {
                    continue;
                }
                pick[slot] = i;
                chosen.push(norm(u, v));
                *deg.entry(u).or_insert(0) += 1;
                *deg.entry(v).or_insert(0) += 1;
                if choose(
                    graph, s, in_s, idx, v, nbrs, i + 1, slot + 1, pick, chosen, deg,
                ) {
                    return true;
                }
                chosen.pop();
                *deg.get_mut(&u).unwrap() -= 1;
                *deg.get_mut(&v).unwrap() -= 1;
            }
            false
        }
        let _ = k;
        choose(
            graph, s, in_s, idx, v, &nbrs, 0, 0, &mut pick, chosen, deg,
        )
    }
    if rec(graph, s, &in_s, 0, &mut chosen, &mut deg) {
        Some(chosen)
    } else {
        None
    }
}

fn flow_saturation(graph: &Graph, s: &[u32]) -> SatOutcome {
    let in_s: std::collections::HashSet<u32> = s.iter().copied().collect();
    // edges inside S
    let mut ss_edges: Vec<(u32, u32)> = Vec::new();
    for &v in s {
        for &u in graph.neighbors(v) {
            if u > v && in_s.contains(&u) {
                ss_edges.push((v, u));
            }
        }
    }
    // outside neighborhood
    let mut t_set: Vec<u32> = s
        .iter()
        .flat_map(|&v| graph.neighbors(v).iter().copied())
        .filter(|u| !in_s.contains(u))
        .collect();
    t_set.sort_unstable();
    t_set.dedup();
    // Branch over the sub-2-matchings inside E(S,S), flow-filling residual
    // demands at the leaves. Take-first ordering reaches saturations fast on
    // dense instances; the per-vertex bound deg + undecided + outside-degree
    // prunes sparse ones. A node budget keeps adversarial middles finite —
    // truncation is reported, never converted into a certificate.
    let mut deg: std::collections::HashMap<u32, u32> = s.iter().map(|&v| (v, 0)).collect();
    // undecided incident ss_edges and S-external degree per S-vertex
    let mut rem: std::collections::HashMap<u32, u32> = s.iter().map(|&v| (v, 0)).collect();
    for &(a, b) in &ss_edges {
        *rem.get_mut(&a).unwrap() += 1;
        *rem.get_mut(&b).unwrap() += 1;
    }
    let t_avail: std::collections::HashMap<u32, u32> = s
        .iter()
        .map(|&v| {
            let d = graph
                .neighbors(v)
                .iter()
                .filter(|u| !in_s.contains(u))
                .count() as u32;
            (v, d)
        })
        .collect();
    struct Ctx<'a> {
        graph: &'a Graph,
        s: &'a [u32],
        ss_edges: &'a [(u32, u32)],
        t_set: &'a [u32],
        deg: std::collections::HashMap<u32, u32>,
        rem: std::collections::HashMap<u32, u32>,
        t_avail: std::collections::HashMap<u32, u32>,
        picked: Vec<(u32, u32)>,
        nodes: u64,
    }
    const NODE_BUDGET: u64 = 3_000_000;
    fn rec(ctx: &mut Ctx, i: usize) -> SatOutcome {
        ctx.nodes += 1;
        if ctx.nodes > NODE_BUDGET {
            return SatOutcome::Truncated;
        }
        if i == ctx.ss_edges.len() {
            return match flow_fill(ctx.graph, ctx.s, ctx.t_set, &ctx.deg) {
                Some(mut fill) => {
                    fill.extend_from_slice(&ctx.picked);
                    SatOutcome::Found(fill)
                }
                None => SatOutcome::Absent,
            };
        }
        let (a, b) = ctx.ss_edges[i];
        *ctx.rem.get_mut(&a).unwrap() -= 1;
        *ctx.rem.get_mut(&b).unwrap() -= 1;
        let mut truncated = false;
        // take edge i
        if ctx.deg[&a] < 2 && ctx.deg[&b] < 2 {
            *ctx.deg.get_mut(&a).unwrap() += 1;
            *ctx.deg.get_mut(&b).unwrap() += 1;
            ctx.picked.push((a, b));
            let r = rec(ctx, i + 1);
            ctx.picked.pop();
            *ctx.deg.get_mut(&a).unwrap() -= 1;
            *ctx.deg.get_mut(&b).unwrap() -= 1;
            match r {
                SatOutcome::Found(w) => {
                    ctx.rem.get_mut(&a).map(|r| *r += 1);
                    ctx.rem.get_mut(&b).map(|r| *r += 1);
                    return SatOutcome::Found(w);
                }
                SatOutcome::Truncated => truncated = true,
                SatOutcome::Absent => {}
            }
        }
        // skip edge i, unless that strands an endpoint below its demand
        let feasible = [a, b]
            .iter()
            .all(|v| ctx.deg[v] + ctx.rem[v] + ctx.t_avail[v] >= 2);
        if feasible {
            match rec(ctx, i + 1) {
                SatOutcome::Found(w) => {
                    ctx.rem.get_mut(&a).map(|r| *r += 1);
                    ctx.rem.get_mut(&b).map(|r| *r += 1);
                    return SatOutcome::Found(w);
                }
                SatOutcome::Truncated => truncated = true,
                SatOutcome::Absent => {}
            }
        }
        *ctx.rem.get_mut(&a).unwrap() += 1;
        *ctx.rem.get_mut(&b).unwrap() += 1;
        if truncated {
            SatOutcome::Truncated
        } else {
            SatOutcome::Absent
        }
    }
    if ss_edges.len() > 2_000 {
        return SatOutcome::Truncated; // recursion depth tracks edge count
    }
    let mut ctx = Ctx {
        graph,
        s,
        ss_edges: &ss_edges,
        t_set: &t_set,
        deg: std::mem::take(&mut deg),
        rem: std::mem::take(&mut rem),
        t_avail,
        picked: Vec::new(),
        nodes: 0,
    };
    rec(&mut ctx, 0)
}

/// Fills residual demands r(v) = 2 - deg(v) for v in S from T via max flow.
/// Returns the S-T edges used, or None when infeasible.
fn flow_fill(
    graph: &Graph,
    s: &[u32],
    t_set: &[u32],
    deg: &std::collections::HashMap<u32, u32>,
) -> Option<Vec<(u32, u32)>> {
    let demand: Vec<u32> = s.iter().map(|v| 2 - deg[v]).collect();
    let total: u32 = demand.iter().sum();
    if total == 0 {
        return Some(Vec::new());
    }
    let t_index: std::collections::HashMap<u32, usize> =
        t_set.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // Node ids: 0 = src, 1..=|S| left, then |T| right, then sink.
    let ns = s.len();
    let nt = t_set.len();
    let sink = 1 + ns + nt;
    let mut flow = Dinic::new(sink + 1);
    for (i, &d) in demand.iter().enumerate() {
        flow.add_edge(0, 1 + i, d as i64);
    }
    for (j, _) in t_set.iter().enumerate() {
        flow.add_edge(1 + ns + j, sink, 2);
    }
    let mut edge_ids: Vec<(usize, u32, u32)> = Vec::new();
    for (i, &v) in s.iter().enumerate() {
        for &u in graph.neighbors(v) {
            if let Some(&j) = t_index.get(&u) {
                let id = flow.add_edge(1 + i, 1 + ns + j, 1);
                edge_ids.push((id, v, u));
            }
        }
    }
    if flow.max_flow(0, sink) < total as i64 {
        return None;
    }
    Some(
        edge_ids
            .iter()
            .filter(|(id, _, _)| flow.edge_flow(*id) > 0)
            .map(|&(_, v, u)| if v < u { (v, u) } else { (u, v) })
            .collect(),
    )
}

/// Small Dinic max-flow.
struct Dinic {
    to: Vec<usize>,
    cap: Vec<i64>,
    head: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
    initial: Vec<i64>,
}

impl Dinic {
    fn new(n: usize) -> Dinic {
        Dinic {
            to: Vec::new(),
            cap: Vec::new(),
            head: vec![Vec::new(); n],
            level: vec![0; n],
            iter: vec![0; n],
            initial: Vec::new(),
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: i64) -> usize {
        let id = self.to.len();
        self.to.push(v);
        self.cap.push(c);
        self.initial.push(c);
        self.head[u].push(id);
        self.to.push(u);
        self.cap.push(0);
        self.initial.push(0);
        self.head[v].push(id + 1);
        id
    }

    fn edge_flow(&self, id: usize) -> i64 {
        self.initial[id] - self.cap[id]
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = std::collections::VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &id in &self.head[u] {
                let v = self.to[id];
                if self.cap[id] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, f: i64) -> i64 {
        if u == t {
            return f;
        }
        while self.iter[u] < self.head[u].len() {
            let id = self.head[u][self.iter[u]];
            let v = self.to[id];
            if self.cap[id] > 0 && self.level[v] == self.level[u] + 1 {
                let d = self.dfs(v, t, f.min(self.cap[id]));
                if d > 0 {
                    self.cap[id] -= d;
                    self.cap[id ^ 1] += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }
}

/// Reference maximum bipartite matching (augmenting paths); test oracle.
/// `left_adj[i]` lists right-side neighbors of left vertex i.
pub fn max_bipartite_matching(left_adj: &[Vec<u32>], n_right: usize) -> (usize, Vec<Option<u32>>) {
    let nl = left_adj.len();
    let mut match_l: Vec<Option<u32>> = vec![None; nl];
    let mut match_r: Vec<Option<u32>> = vec![None; n_right];
    fn try_augment(
        u: usize,
        left_adj: &[Vec<u32>],
        match_l: &mut [Option<u32>],
        match_r: &mut [Option<u32>],
        visited: &mut [bool],
    ) -> bool {
        for &v in &left_adj[u] {
            let vi = v as usize;
            if visited[vi] {
                continue;
            }
            visited[vi] = true;
            if match_r[vi].is_none()
                || try_augment(
                    match_r[vi].unwrap() as usize,
                    left_adj,
                    match_l,
                    match_r,
                    visited,
                )
            {
                match_r[vi] = Some(u as u32);
                match_l[u] = Some(v);
                return true;
            }
        }
        false
    }
    let mut size = 0;
    for u in 0..nl {
        let mut visited = vec![false; n_right];
        if try_augment(u, left_adj, &mut match_l, &mut match_r, &mut visited) {
            size += 1;
        }
    }
    (size, match_l)
}
