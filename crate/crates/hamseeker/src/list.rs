//! Adjacency-list solver. Phase 1 partitions the vertex set into four equal
//! classes plus reserved paths covering every vertex whose scan burned; Phase
//! 2 builds four perfect matchings whose union with the reserved paths is a
//! 2-factor; Phase 3 merges the 2-factor cycles through the rotation engine.

use crate::graph::Graph;
use crate::matching::perfect_matching;
use crate::oracle::{AdjacencyListOracle, OracleError, QueryLedger};
use crate::outcome::{FailureCode, SolverOutcome};
use crate::params::{Parameters, Resolved};
use crate::rotation::{merge_all, RevealedEdges, RotationAccess};
use crate::verify;
use std::collections::{HashMap, HashSet};

/// Result of Phase 1.
pub struct Partition {
    /// the four balanced classes
    pub classes: [Vec<u32>; 4],
    /// reserved-path endpoint sets and interior set
    pub v5: Vec<u32>,
    pub v6: Vec<u32>,
    pub v7: Vec<u32>,
    /// reserved paths; one endpoint in v5, the other in v6
    pub paths: Vec<Vec<u32>>,
    /// everything revealed per vertex during the scan, in list order
    pub revealed: Vec<Vec<u32>>,
}

pub enum Phase1Term {
    /// FAILURE1 with a provable certificate: the vertex set admits no
    /// saturating 2-matching (all its lists were fully drained).
    Certificate(Vec<u32>),
    Fail(FailureCode),
}

/// Members of `cls` already revealed from v's list and still in their class;
/// reads more of the list when none are, until the list closes or caps out.
#[allow(clippy::too_many_arguments)]
fn class_pool(
    oracle: &mut AdjacencyListOracle,
    revealed_edges: &mut RevealedEdges,
    revealed: &mut [Vec<u32>],
    v: u32,
    cls: usize,
    bounds: &[usize; 5],
    in_class: &[bool],
) -> Vec<u32> {
    let mut pool: Vec<u32> = revealed[v as usize]
        .iter()
        .copied()
        .filter(|&u| class_of(u, bounds) == cls && in_class[u as usize])
        .collect();
    while pool.is_empty() && oracle.can_read(v) {
        match oracle.list_query(v) {
            Ok(Some(u)) => {
                revealed[v as usize].push(u);
                revealed_edges.insert(v, u);
                if class_of(u, bounds) == cls && in_class[u as usize] {
                    pool.push(u);
                }
            }
            _ => break,
        }
    }
    pool
}

fn class_bounds(n: usize) -> [usize; 5] {
    [0, n / 4, n / 2, 3 * n / 4, n]
}

fn class_of(v: u32, bounds: &[usize; 5]) -> usize {
    let v = v as usize;
    (1..=4).find(|&i| v < bounds[i]).unwrap() - 1
}

/// Algorithm: per-vertex class scan with burning, burned-component path
/// covers, class rebalance through the reserve prefixes, and disjoint
/// length-4 paths for the rebalance remainder.
pub fn phase1_partition(
    oracle: &mut AdjacencyListOracle,
    revealed_edges: &mut RevealedEdges,
    res: &Resolved,
) -> Result<Partition, Phase1Term> {
    let n = oracle.n();
    let bounds = class_bounds(n);
    oracle.set_phase("phase1");
    let mut revealed: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut burned: Vec<u32> = Vec::new();
    let mut removed = vec![false; n]; // out of the four classes
    for v in 0..n as u32 {
        let mut per_class = [0usize; 4];
        let mut reads = 0usize;
        let target = res.per_class_target;
        loop {
            if per_class.iter().all(|&c| c >= target) {
                break;
            }
            if reads >= res.q || !oracle.can_read(v) {
                burned.push(v);
                removed[v as usize] = true;
                break;
            }
            match oracle.list_query(v) {
                Ok(Some(u)) => {
                    reads += 1;
                    revealed[v as usize].push(u);
                    revealed_edges.insert(v, u);
                    per_class[class_of(u, &bounds)] += 1;
                }
                Ok(None) => {
                    burned.push(v);
                    removed[v as usize] = true;
                    break;
                }
                Err(OracleError::BudgetExceeded) => {
                    return Err(Phase1Term::Fail(FailureCode::Budget))
                }
                Err(_) => {
                    burned.push(v);
                    removed[v as usize] = true;
                    break;
                }
            }
        }
        if oracle.ledger().total_queries > (0.8 * res.list_budget as f64) as u64 {
            return Err(Phase1Term::Fail(FailureCode::Failure0));
        }
    }

    // burned-neighborhood graph F and its components
    let mut paths: Vec<Vec<u32>> = Vec::new();
    if !burned.is_empty() {
        let mut comp: HashMap<u32, usize> = HashMap::new();
        let mut adj_f: HashMap<u32, Vec<u32>> = HashMap::new();
        for &b in &burned {
            for &u in &revealed[b as usize] {
                adj_f.entry(b).or_default().push(u);
                adj_f.entry(u).or_default().push(b);
            }
        }
        let mut comp_count = 0usize;
        for &b in &burned {
            if comp.contains_key(&b) {
                continue;
            }
            let id = comp_count;
            comp_count += 1;
            let mut stack = vec![b];
            comp.insert(b, id);
            while let Some(x) = stack.pop() {
                for &y in adj_f.get(&x).map(|v| v.as_slice()).unwrap_or(&[]) {
                    if !comp.contains_key(&y) {
                        comp.insert(y, id);
                        stack.push(y);
                    }
                }
            }
        }
        for id in 0..comp_count {
            let targets: Vec<u32> = burned
                .iter()
                .copied()
                .filter(|b| comp[b] == id)
                .collect();
            if targets.is_empty() {
                continue;
            }
            let local = |revealed: &Vec<Vec<u32>>| -> Vec<(u32, u32)> {
                let mut e: Vec<(u32, u32)> = Vec::new();
                for &t in &targets {
                    for &u in &revealed[t as usize] {
                        e.push((t.min(u), t.max(u)));
                    }
                }
                e.sort_unstable();
                e.dedup();
                e
            };
            let mut cover = path_cover_component(&local(&revealed), &targets);
            if cover.is_none() {
                // a failed cover may just be missing knowledge: drain the
                // targets (few, low-degree) and retry with their full rows
                for &t in &targets {
                    while oracle.can_read(t) {
                        match oracle.list_query(t) {
                            Ok(Some(u)) => {
                                revealed[t as usize].push(u);
                                revealed_edges.insert(t, u);
                            }
                            Ok(None) => break,
                            Err(OracleError::BudgetExceeded) => {
                                return Err(Phase1Term::Fail(FailureCode::Budget))
                            }
                            Err(_) => break,
                        }
                    }
                }
                cover = path_cover_component(&local(&revealed), &targets);
            }
            if cover.is_none() {
                // the cover search wants open paths and misses saturations
                // that ride through cycles; ask the reference checker on the
                // revealed-only local graph (rows are drained, so this uses
                // no unqueried knowledge) and adopt its witness
                let lg = Graph::from_edges(n, &local(&revealed)).expect("revealed simple graph");
                if let Some(w) = verify::verify_certificate(&lg, &targets).witness {
                    cover = Some(witness_paths(&w));
                }
            }
            match cover {
                Some(cover) => {
                    for p in cover {
                        for &x in &p {
                            removed[x as usize] = true;
                        }
                        paths.push(p);
                    }
                }
                None => {
                    // provable only when every target's list was drained
                    if targets.iter().all(|&t| oracle.is_closed(t)) {
                        return Err(Phase1Term::Certificate(targets));
                    }
                    return Err(Phase1Term::Fail(FailureCode::Failure1));
                }
            }
        }
    }

    if res.p < res.p_star {
        return Err(Phase1Term::Fail(FailureCode::Failure2));
    }

    // classes after removals
    let mut classes: [Vec<u32>; 4] = Default::default();
    for v in 0..n as u32 {
        if !removed[v as usize] {
            classes[class_of(v, &bounds)].push(v);
        }
    }
    let reserve = ((n / 64).max(16)).min(classes.iter().map(|c| c.len()).min().unwrap_or(0));
    let d_max = (0..4)
        .map(|i| (bounds[i + 1] - bounds[i]) - classes[i].len())
        .max()
        .unwrap();
    let m_target = classes.iter().map(|c| c.len()).min().unwrap();
    if classes.iter().any(|c| c.len() - m_target > reserve) || d_max > n / 8 {
        return Err(Phase1Term::Fail(FailureCode::Failure3));
    }
    // trim every class to the minimum size using its reserve prefix
    let mut balance_set: Vec<u32> = Vec::new();
    for c in classes.iter_mut() {
        while c.len() > m_target {
            // reserve prefix = lowest labels of the class
            let v = c.remove(0);
            removed[v as usize] = true;
            balance_set.push(v);
        }
    }

    // disjoint length-4 paths w1-w2-v-w3-w4 through the revealed neighbors
    let mut in_class = vec![false; n];
    for c in classes.iter() {
        for &v in c {
            in_class[v as usize] = true;
        }
    }
    let mut v5 = Vec::new();
    let mut v6 = Vec::new();
    let mut v7 = Vec::new();
    for &v in &balance_set {
        // the path takes one vertex from each class with v at the center;
        // any assignment of classes to the four slots works, so search them all
        let mut found: Option<[u32; 4]> = None;
        'search: for a in 0..4usize {
            for b in 0..4usize {
                if a == b {
                    continue;
                }
                let rest: Vec<usize> = (0..4).filter(|&k| k != a && k != b).collect();
                for &(c, d) in &[(rest[0], rest[1]), (rest[1], rest[0])] {
                    for wa in
                        class_pool(oracle, revealed_edges, &mut revealed, v, a, &bounds, &in_class)
                    {
                        for wc in class_pool(
                            oracle, revealed_edges, &mut revealed, wa, c, &bounds, &in_class,
                        ) {
                            for wb in class_pool(
                                oracle, revealed_edges, &mut revealed, v, b, &bounds, &in_class,
                            ) {
                                for wd in class_pool(
                                    oracle, revealed_edges, &mut revealed, wb, d, &bounds,
                                    &in_class,
                                ) {
                                    found = Some([wc, wa, wb, wd]);
                                    break 'search;
                                }
                            }
                        }
                    }
                }
            }
        }
        let [w1, w2, w3, w4] = match found {
            Some(ws) => ws,
            None => return Err(Phase1Term::Fail(FailureCode::Failure4)),
        };
        let path = vec![w1, w2, v, w3, w4];
        for &x in &path {
            if in_class[x as usize] {
                in_class[x as usize] = false;
                let cls = class_of(x, &bounds);
                classes[cls].retain(|&y| y != x);
            }
        }
        paths.push(path);
    }

    // classify path vertices
    for p in &paths {
        v5.push(p[0]);
        v6.push(*p.last().unwrap());
        for &x in &p[1..p.len() - 1] {
            v7.push(x);
        }
    }
    let sizes: Vec<usize> = classes.iter().map(|c| c.len()).collect();
    if sizes.iter().any(|&s| s != sizes[0]) || sizes[0] == 0 {
        return Err(Phase1Term::Fail(FailureCode::Failure3));
    }
    Ok(Partition {
        classes,
        v5,
        v6,
        v7,
        paths,
        revealed,
    })
}

/// Finds vertex-disjoint paths covering `targets` with no endpoint in
/// `targets`, given the locally known edges (all edges incident to targets
/// when their lists are drained). Returns None when no saturating 2-matching
/// of the targets exists over these edges — the certificate trigger.
/// Splits a degree-<=2 edge set into vertex paths, opening cycles at an
/// arbitrary position.
fn witness_paths(w: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for &(a, b) in w {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut keys: Vec<u32> = adj.keys().copied().collect();
    keys.sort_unstable();
    let mut seen: HashSet<u32> = HashSet::new();
    let mut out: Vec<Vec<u32>> = Vec::new();
    let mut walk = |s: u32, seen: &mut HashSet<u32>| -> Vec<u32> {
        let mut path = vec![s];
        seen.insert(s);
        let mut cur = adj[&s][0];
        while seen.insert(cur) {
            path.push(cur);
            match adj[&cur].iter().copied().find(|x| !seen.contains(x)) {
                Some(x) => cur = x,
                None => break,
            }
        }
        path
    };
    for &s in keys.iter().filter(|&&v| adj[&v].len() == 1) {
        if !seen.contains(&s) {
            out.push(walk(s, &mut seen));
        }
    }
    for &s in &keys {
        // leftovers are cycles
        if !seen.contains(&s) {
            out.push(walk(s, &mut seen));
        }
    }
    out
}

pub fn path_cover_component(local_edges: &[(u32, u32)], targets: &[u32]) -> Option<Vec<Vec<u32>>> {
    // compact relabeling
    let mut ids: Vec<u32> = local_edges
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .chain(targets.iter().copied())
        .collect();
    ids.sort_unstable();
    ids.dedup();
    // scramble the compact labels so the flow's augmenting order carries no
    // bias toward low original labels (it would skew class sizes later)
    let mix = |v: u32| -> u64 {
        let mut x = v as u64 ^ 0x9E37_79B9_7F4A_7C15;
        x ^= x >> 30;
        x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
        x ^= x >> 27;
        x
    };
    ids.sort_unstable_by_key(|&v| mix(v));
    let index: HashMap<u32, u32> = ids.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let edges: Vec<(u32, u32)> = local_edges
        .iter()
        .map(|&(a, b)| (index[&a].min(index[&b]), index[&a].max(index[&b])))
        .collect();
    let g = Graph::from_edges(ids.len(), &edges).ok()?;
    let s: Vec<u32> = targets.iter().map(|t| index[t]).collect();
    let check = verify::verify_certificate(&g, &s);
    let witness = check.witness?; // None -> no saturating 2-matching
    // convert the witness 2-matching into disjoint paths
    let mut deg = vec![0u8; ids.len()];
    let mut nb: Vec<Vec<u32>> = vec![Vec::new(); ids.len()];
    for &(a, b) in &witness {
        deg[a as usize] += 1;
        deg[b as usize] += 1;
        nb[a as usize].push(b);
        nb[b as usize].push(a);
    }
    let in_s: HashSet<u32> = s.iter().copied().collect();
    let mut seen = vec![false; ids.len()];
    let mut paths = Vec::new();
    for start in 0..ids.len() {
        if seen[start] || deg[start] != 1 {
            continue;
        }
        // walk the path from a degree-1 endpoint
        let mut path = vec![start as u32];
        seen[start] = true;
        let mut cur = start as u32;
        loop {
            let next = nb[cur as usize]
                .iter()
                .copied()
                .find(|&x| !seen[x as usize]);
            match next {
                Some(x) => {
                    seen[x as usize] = true;
                    path.push(x);
                    cur = x;
                }
                None => break,
            }
        }
        paths.push(path);
    }
    // leftover cycles in the witness: broken at a non-target vertex if any
    for start in 0..ids.len() {
        if seen[start] || deg[start] != 2 {
            continue;
        }
        // trace the cycle
        let mut cyc = vec![start as u32];
        seen[start] = true;
        let mut cur = start as u32;
        loop {
            let next = nb[cur as usize]
                .iter()
                .copied()
                .find(|&x| !seen[x as usize]);
            match next {
                Some(x) => {
                    seen[x as usize] = true;
                    cyc.push(x);
                    cur = x;
                }
                None => break,
            }
        }
        // rotate so a non-target vertex is the break point
        let pos = cyc.iter().position(|v| !in_s.contains(v))?;
        cyc.rotate_left(pos);
        paths.push(cyc);
    }
    // endpoints must avoid targets; vertex budget 3|targets|
    let total: usize = paths.iter().map(|p| p.len()).sum();
    for p in &paths {
        if in_s.contains(&p[0]) || in_s.contains(p.last().unwrap()) {
            return None;
        }
    }
    if total > 3 * targets.len() + 2 {
        return None;
    }
    Some(
        paths
            .into_iter()
            .map(|p| p.into_iter().map(|x| ids[x as usize]).collect())
            .collect(),
    )
}

/// Orders a side of the (U1, U4) pair by the lexicographic 10-tuple of first
/// revealed neighbors in the reference class; ties fall back to vertex id.
fn order_by_tuples(side: &mut [u32], revealed: &[Vec<u32>], ref_class: (usize, usize)) -> usize {
    let key = |v: u32| -> Vec<u32> {
        revealed[v as usize]
            .iter()
            .copied()
            .filter(|&u| (u as usize) >= ref_class.0 && (u as usize) < ref_class.1)
            .take(10)
            .collect()
    };
    let mut keyed: Vec<(Vec<u32>, u32)> = side.iter().map(|&v| (key(v), v)).collect();
    keyed.sort();
    let ties = keyed.windows(2).filter(|w| w[0].0 == w[1].0).count();
    for (i, (_, v)) in keyed.into_iter().enumerate() {
        side[i] = v;
    }
    ties
}

/// Runs the full list-model pipeline. Returns the outcome plus the ledger.
pub fn solve_list(
    graph: &Graph,
    p: f64,
    shuffle_seed: u64,
    params: &Parameters,
) -> (SolverOutcome, QueryLedger) {
    let n = graph.n();
    if n < params.n_min {
        return (exact_dispatch(graph), QueryLedger::default());
    }
    let res = match params.resolve(n, p) {
        Ok(r) => r,
        Err(_) => return (SolverOutcome::Failure(FailureCode::Generic), QueryLedger::default()),
    };
    let mut oracle =
        AdjacencyListOracle::new(graph, shuffle_seed, res.list_prefix_cap, Some(res.list_budget));
    let mut revealed_edges = RevealedEdges::default();
    let mut part = match phase1_partition(&mut oracle, &mut revealed_edges, &res) {
        Ok(p) => p,
        Err(Phase1Term::Certificate(s)) => {
            // report the smallest witness available: a single low-degree
            // vertex certifies by itself and keeps the check cheap
            let s = match s.iter().find(|&&v| graph.degree(v) < 2) {
                Some(&v) => vec![v],
                None => s,
            };
            let out = if verify::verify_certificate(graph, &s).valid {
                SolverOutcome::NonHamiltonian(s)
            } else {
                SolverOutcome::Failure(FailureCode::Failure1)
            };
            return (out, oracle.ledger_snapshot());
        }
        Err(Phase1Term::Fail(code)) => {
            return (SolverOutcome::Failure(code), oracle.ledger_snapshot())
        }
    };

    // Phase 2: four perfect matchings
    oracle.set_phase("phase2");
    let mut u1: Vec<u32> = part.classes[0].iter().chain(part.v5.iter()).copied().collect();
    let mut u4: Vec<u32> = part.classes[3].iter().chain(part.v6.iter()).copied().collect();
    let bounds = class_bounds(n);
    order_by_tuples(&mut u1, &part.revealed, (bounds[2], bounds[3]));
    order_by_tuples(&mut u4, &part.revealed, (bounds[1], bounds[2]));
    let pairs: [(Vec<u32>, Vec<u32>); 4] = [
        (part.classes[0].clone(), part.classes[1].clone()),
        (part.classes[1].clone(), part.classes[2].clone()),
        (part.classes[2].clone(), part.classes[3].clone()),
        (u1, u4),
    ];
    let mut factor_edges: Vec<(u32, u32)> = Vec::new();
    let mut cut_pool: HashSet<u64> = HashSet::new();
    for (k, (xs, ys)) in pairs.iter().enumerate() {
        oracle.set_phase(&format!("phase2:pair_{}", k));
        match perfect_matching(
            &mut oracle,
            &mut revealed_edges,
            &mut part.revealed,
            xs,
            ys,
            &res,
        ) {
            Ok(m) => {
                if k == 3 {
                    for &(a, b) in &m {
                        cut_pool.insert(pair_key(a, b));
                    }
                }
                factor_edges.extend(m);
            }
            Err(code) => return (SolverOutcome::Failure(code), oracle.ledger_snapshot()),
        }
    }
    for path in &part.paths {
        for w in path.windows(2) {
            factor_edges.push((w[0], w[1]));
        }
    }
    // near-2-factor: degree two where the matchings saturated, never more;
    // leftovers surface as path endpoints for the merge phase
    let mut slot: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(a, b) in &factor_edges {
        slot[a as usize].push(b);
        slot[b as usize].push(a);
    }
    if slot.iter().any(|s| s.len() > 2) {
        return (
            SolverOutcome::Failure(FailureCode::Generic),
            oracle.ledger_snapshot(),
        );
    }

    let mut visited = vec![false; n];
    let mut paths_for_merge: Vec<Vec<u32>> = Vec::new();
    // open paths first (and isolated leftovers as singletons)
    for start in 0..n as u32 {
        if visited[start as usize] || slot[start as usize].len() == 2 {
            continue;
        }
        visited[start as usize] = true;
        let mut path = vec![start];
        let mut prev = start;
        let mut cur = match slot[start as usize].first() {
            Some(&x) => x,
            None => {
                paths_for_merge.push(path);
                continue;
            }
        };
        loop {
            visited[cur as usize] = true;
            path.push(cur);
            let nxt = slot[cur as usize].iter().copied().find(|&x| x != prev);
            match nxt {
                Some(x) if slot[cur as usize].len() == 2 => {
                    prev = cur;
                    cur = x;
                }
                _ => break,
            }
        }
        paths_for_merge.push(path);
    }
    // remaining components are cycles: cut one edge each, preferring the
    // (U1, U4) matching edge
    for start in 0..n as u32 {
        if visited[start as usize] {
            continue;
        }
        let mut cyc = vec![start];
        visited[start as usize] = true;
        let mut prev = start;
        let mut cur = slot[start as usize][0];
        while cur != start {
            visited[cur as usize] = true;
            cyc.push(cur);
            let nxt = if slot[cur as usize][0] == prev {
                slot[cur as usize][1]
            } else {
                slot[cur as usize][0]
            };
            prev = cur;
            cur = nxt;
        }
        let len = cyc.len();
        let i = (0..len)
            .find(|&i| cut_pool.contains(&pair_key(cyc[i], cyc[(i + 1) % len])))
            .unwrap_or(len - 1);
        let mut path = Vec::with_capacity(len);
        path.extend_from_slice(&cyc[i + 1..]);
        path.extend_from_slice(&cyc[..=i]);
        paths_for_merge.push(path);
    }

    // Phase 3: rotation merge
    oracle.set_phase("phase3");
    let mut access = RotationAccess::List {
        oracle: &mut oracle,
        revealed: &mut revealed_edges,
        history: &mut part.revealed,
    };
    let outcome = match merge_all(paths_for_merge, &mut access, &res) {
        Ok(cycle) => {
            if verify::verify_cycle(graph, &cycle) {
                SolverOutcome::Hamiltonian(cycle)
            } else {
                SolverOutcome::Failure(FailureCode::Generic)
            }
        }
        Err(code) => SolverOutcome::Failure(code),
    };
    (outcome, oracle.ledger_snapshot())
}

fn pair_key(a: u32, b: u32) -> u64 {
    let (x, y) = if a < b { (a, b) } else { (b, a) };
    ((x as u64) << 32) | y as u64
}

/// Exact oracle dispatch for n below n_min.
pub fn exact_dispatch(graph: &Graph) -> SolverOutcome {
    match verify::exact_hamiltonian(graph) {
        Ok(verify::ExactResult::Cycle(c)) => SolverOutcome::Hamiltonian(c),
        Ok(verify::ExactResult::Absent) => {
            // try to extract a small verified certificate
            for v in 0..graph.n() as u32 {
                if graph.degree(v) < 2 {
                    return SolverOutcome::NonHamiltonian(vec![v]);
                }
            }
            for v in 0..graph.n() as u32 {
                if verify::verify_certificate(graph, &[v]).valid {
                    return SolverOutcome::NonHamiltonian(vec![v]);
                }
            }
            SolverOutcome::Failure(FailureCode::Generic)
        }
        Err(_) => SolverOutcome::Failure(FailureCode::Generic),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_gnp;

    #[test]
    fn complete_graph_list_solve() {
        let g = generate_gnp(128, 1.0, 1);
        let (out, ledger) = solve_list(&g, 1.0, 42, &Parameters::desk());
        match out {
            SolverOutcome::Hamiltonian(c) => assert!(verify::verify_cycle(&g, &c)),
            other => panic!("K128 should solve, got {:?}", other.tag()),
        }
        assert!(ledger.total_queries > 0);
    }

    #[test]
    fn random_graph_list_solve_sound() {
        let n = 2000;
        let p = 3.0 * (n as f64).ln() / n as f64;
        let g = generate_gnp(n, p, 5);
        let (out, _) = solve_list(&g, p, 7, &Parameters::desk());
        match out {
            SolverOutcome::Hamiltonian(c) => assert!(verify::verify_cycle(&g, &c)),
            SolverOutcome::NonHamiltonian(s) => {
                assert!(verify::verify_certificate(&g, &s).valid)
            }
            SolverOutcome::Failure(_) => {}
        }
    }

    #[test]
    fn planted_isolated_vertex_yields_certificate_or_failure() {
        let n = 512;
        let p = 3.0 * (n as f64).ln() / n as f64;
        let base = generate_gnp(n - 1, p, 9);
        // re-embed with vertex n-1 isolated
        let mut edges = Vec::new();
        for v in 0..base.n() as u32 {
            for &u in base.neighbors(v) {
                if u > v {
                    edges.push((v, u));
                }
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        let (out, _) = solve_list(&g, p, 1, &Parameters::desk());
        match out {
            SolverOutcome::Hamiltonian(_) => panic!("graph has an isolated vertex"),
            SolverOutcome::NonHamiltonian(s) => {
                assert!(s.contains(&((n - 1) as u32)));
                assert!(verify::verify_certificate(&g, &s).valid);
            }
            SolverOutcome::Failure(_) => {}
        }
    }

    #[test]
    fn small_n_dispatches_to_exact() {
        let g = generate_gnp(10, 1.0, 0);
        let (out, _) = solve_list(&g, 1.0, 0, &Parameters::desk());
        assert!(out.is_hamiltonian());
    }

    #[test]
    fn path_cover_simple_cases() {
        // target v=1 adjacent to 0 and 2: path 0-1-2
        let cover = path_cover_component(&[(0, 1), (1, 2)], &[1]).unwrap();
        assert_eq!(cover.len(), 1);
        assert_eq!(cover[0].len(), 3);
        assert_eq!(cover[0][1], 1);
        // degree-1 target: impossible
        assert!(path_cover_component(&[(0, 1)], &[1]).is_none());
        // degree-0 target: impossible
        assert!(path_cover_component(&[], &[5]).is_none());
    }

    #[test]
    fn path_cover_matches_exhaustive_small() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for trial in 0..100u64 {
            let g = generate_gnp(20, 0.15, trial);
            let mut targets = Vec::new();
            while targets.len() < 5 {
                let v = rng.gen_range(0..20u32);
                if !targets.contains(&v) {
                    targets.push(v);
                }
            }
            let mut local: Vec<(u32, u32)> = Vec::new();
            for &t in &targets {
                for &u in g.neighbors(t) {
                    local.push((t.min(u), t.max(u)));
                }
            }
            local.sort_unstable();
            local.dedup();
            let coverable = path_cover_component(&local, &targets).is_some();
            // reference: saturating 2-matching existence over the same edges
            let built = Graph::from_edges(20, &local).unwrap();
            let expect = !verify::verify_certificate_exhaustive(&built, &targets).valid;
            if coverable {
                assert!(expect, "cover produced though no 2-matching exists");
            }
            // (a 2-matching may exist while its induced cover violates the
            // endpoint or budget rule, so the reverse implication is weaker)
        }
    }
}
