//! Adjacency-matrix solver: a greedy 2-matching cover over a scan window,
//! repair passes for under-covered vertices, a Karp-Sipser shrink of the
//! reserve pool, and rotation merging of the resulting path system.

use std::collections::BTreeSet;

use crate::graph::Graph;
use crate::list::{exact_dispatch, path_cover_component};
use crate::oracle::{AdjacencyMatrixOracle, OracleError, QueryLedger};
use crate::outcome::{FailureCode, SolverOutcome};
use crate::params::{Parameters, Resolved};
use crate::rotation::{merge_all, RotationAccess};
use crate::verify;

/// Union of vertex-disjoint paths, maintained under edge insertion and
/// removal. `end` maps each path endpoint to the opposite endpoint (and a
/// singleton to itself); interior entries are stale and never consulted.
pub struct TwoMatching {
    nbr: Vec<Vec<u32>>,
    end: Vec<u32>,
    edges: usize,
}

impl TwoMatching {
    pub fn new(n: usize) -> TwoMatching {
        TwoMatching {
            nbr: vec![Vec::new(); n],
            end: (0..n as u32).collect(),
            edges: 0,
        }
    }

    pub fn deg(&self, v: u32) -> usize {
        self.nbr[v as usize].len()
    }

    pub fn saturated(&self, v: u32) -> bool {
        self.deg(v) == 2
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.nbr[v as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Opposite endpoint of v's path; only meaningful while deg(v) < 2.
    pub fn other_end(&self, v: u32) -> u32 {
        debug_assert!(self.deg(v) < 2);
        self.end[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.nbr[u as usize].contains(&v)
    }

    /// Both endpoints must be path ends; joining the two ends of the same
    /// path is rejected by the cycle guard.
    pub fn add(&mut self, u: u32, v: u32) {
        assert!(u != v && self.deg(u) < 2 && self.deg(v) < 2);
        assert!(self.end[u as usize] != v, "edge would close a cycle");
        let a = self.end[u as usize];
        let b = self.end[v as usize];
        self.nbr[u as usize].push(v);
        self.nbr[v as usize].push(u);
        self.end[a as usize] = b;
        self.end[b as usize] = a;
        self.edges += 1;
        debug_assert!(self.end[self.end[a as usize] as usize] == a);
    }

    pub fn remove(&mut self, u: u32, v: u32) {
        let pos = self.nbr[u as usize]
            .iter()
            .position(|&x| x == v)
            .expect("edge not present");
        self.nbr[u as usize].swap_remove(pos);
        let pos = self.nbr[v as usize].iter().position(|&x| x == u).unwrap();
        self.nbr[v as usize].swap_remove(pos);
        self.edges -= 1;
        // both sides of the cut become path ends; re-walk their halves
        for side in [u, v] {
            let far = self.walk_end(side);
            self.end[side as usize] = far;
            self.end[far as usize] = side;
        }
    }

    /// Far endpoint of the path starting at `start` (deg(start) <= 1).
    fn walk_end(&self, start: u32) -> u32 {
        debug_assert!(self.deg(start) < 2);
        let mut prev = start;
        let mut cur = match self.nbr[start as usize].first() {
            Some(&x) => x,
            None => return start,
        };
        loop {
            let next = self.nbr[cur as usize].iter().find(|&&x| x != prev).copied();
            match next {
                Some(x) => {
                    prev = cur;
                    cur = x;
                }
                None => return cur,
            }
        }
    }

    /// Full decomposition into paths, singletons included.
    pub fn paths(&self) -> Vec<Vec<u32>> {
        let n = self.nbr.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for v in 0..n as u32 {
            if seen[v as usize] || self.deg(v) == 2 {
                continue;
            }
            let mut path = vec![v];
            seen[v as usize] = true;
            let mut prev = v;
            let mut cur = self.nbr[v as usize].first().copied();
            while let Some(c) = cur {
                path.push(c);
                seen[c as usize] = true;
                let next = self.nbr[c as usize].iter().find(|&&x| x != prev).copied();
                prev = c;
                cur = next;
            }
            out.push(path);
        }
        // any vertex still unseen would sit on a cycle
        assert!(seen.iter().all(|&s| s), "2-matching contains a cycle");
        out
    }

    /// Full structural scan: degree cap, acyclicity, end-map consistency.
    pub fn check(&self) -> bool {
        let n = self.nbr.len();
        let mut seen = vec![false; n];
        let mut count = 0usize;
        for v in 0..n as u32 {
            if self.deg(v) > 2 {
                return false;
            }
            if self.deg(v) < 2 && !seen[v as usize] {
                if self.end[self.end[v as usize] as usize] != v {
                    return false;
                }
                let mut prev = v;
                let mut cur = self.nbr[v as usize].first().copied();
                seen[v as usize] = true;
                count += 1;
                while let Some(c) = cur {
                    if seen[c as usize] {
                        return false;
                    }
                    seen[c as usize] = true;
                    count += 1;
                    let next = self.nbr[c as usize].iter().find(|&&x| x != prev).copied();
                    prev = c;
                    cur = next;
                }
            }
        }
        count == n
    }
}

/// Working state threaded through the cover and repair passes.
pub struct CoverState {
    pub m: TwoMatching,
    /// reserve pool, a prefix of the vertex ids
    pub v2: usize,
    /// scan window, a larger prefix
    pub v12: usize,
    /// adjacency among the reserve pool, fully known after the eager scan
    pub alice: Vec<Vec<u32>>,
    /// vertices the cover loops left under-covered
    pub d: Vec<u32>,
    /// spare true neighbors harvested for each member of d (parallel)
    pub e_sets: Vec<Vec<u32>>,
    pub dangerous: Vec<u32>,
    pub special: BTreeSet<u32>,
    pub special0: BTreeSet<u32>,
    pub special1: BTreeSet<u32>,
    pub burned: BTreeSet<u32>,
}

/// Eagerly reads every pair inside the reserve pool [0, v2).
fn alice_scan(
    oracle: &mut AdjacencyMatrixOracle,
    v2: usize,
) -> Result<Vec<Vec<u32>>, OracleError> {
    oracle.set_phase("alice");
    let mut adj = vec![Vec::new(); v2];
    for a in 0..v2 as u32 {
        for b in (a + 1)..v2 as u32 {
            if oracle.matrix_query(a, b)? {
                adj[a as usize].push(b);
                adj[b as usize].push(a);
            }
        }
    }
    Ok(adj)
}

/// Cover pass for the reserve pool: scan the window until each pool vertex
/// has at least one incident edge in m.
fn cover_v2_loop(
    oracle: &mut AdjacencyMatrixOracle,
    m: &mut TwoMatching,
    v2: usize,
    v12: usize,
    cap: usize,
) -> Result<(), OracleError> {
    for i in 0..v2 as u32 {
        let mut spent = 0usize;
        let mut j = v2 as u32;
        while m.deg(i) == 0 && spent < cap && (j as usize) < v12 {
            if !oracle.is_queried(i, j) && m.deg(j) < 2 && m.other_end(j) != i {
                spent += 1;
                if oracle.matrix_query(i, j)? {
                    m.add(i, j);
                }
            }
            j += 1;
        }
    }
    Ok(())
}

/// Saturation pass: each active vertex scans for the smallest unsaturated
/// partner until it carries two edges or gives up. Every hit fills a slot on
/// both sides, which is what keeps the total probe count near n/p.
fn cover_v1_loop(
    oracle: &mut AdjacencyMatrixOracle,
    m: &mut TwoMatching,
    active: &[u32],
    skip_lo: usize,
    cap: usize,
) -> Result<(), OracleError> {
    // partners come from outside the reserve prefix while any remain, so the
    // pool keeps its degree-1 members for the shrink phase and the final
    // path ends settle there instead of stranding a main vertex
    let mut unsat: BTreeSet<u32> = active
        .iter()
        .copied()
        .filter(|&v| (v as usize) >= skip_lo && m.deg(v) < 2)
        .collect();
    for &i in active {
        if (i as usize) < skip_lo {
            continue;
        }
        let mut spent = 0usize;
        // the smallest eligible partner only moves up while i's row fills in,
        // so a cursor avoids rescanning the prefix on every probe
        let mut cursor = 0u32;
        while m.deg(i) < 2 && spent < cap {
            let guard = if m.deg(i) < 2 { m.other_end(i) } else { i };
            let mut picked = None;
            for &k in unsat.range(cursor..) {
                if k == i || k == guard {
                    continue;
                }
                if oracle.is_queried(i, k) {
                    cursor = k + 1;
                    continue;
                }
                picked = Some(k);
                break;
            }
            let j = match picked {
                Some(j) => j,
                None => break,
            };
            spent += 1;
            if oracle.matrix_query(i, j)? {
                m.add(i, j);
                if m.deg(j) == 2 {
                    unsat.remove(&j);
                }
            }
            cursor = j + 1;
        }
        // endgame fallback: only pool vertices are left to pair with
        let mut fb = 0u32;
        while m.deg(i) < 2 && spent < cap && (fb as usize) < skip_lo {
            let guard = if m.deg(i) < 2 { m.other_end(i) } else { i };
            if fb != guard && m.deg(fb) < 2 && !oracle.is_queried(i, fb) {
                spent += 1;
                if oracle.matrix_query(i, fb)? {
                    m.add(i, fb);
                }
            }
            fb += 1;
        }
        if m.deg(i) == 2 {
            unsat.remove(&i);
        }
    }
    Ok(())
}

/// Classic worklist peel down to minimum degree 2 within `members`.
pub fn identify_2core(members: &[u32], adj: &dyn Fn(u32) -> Vec<u32>) -> Vec<u32> {
    let mut alive: BTreeSet<u32> = members.iter().copied().collect();
    let mut deg: std::collections::HashMap<u32, usize> = alive
        .iter()
        .map(|&v| (v, adj(v).iter().filter(|u| alive.contains(u)).count()))
        .collect();
    let mut work: Vec<u32> = alive
        .iter()
        .copied()
        .filter(|v| deg[v] < 2)
        .collect();
    while let Some(v) = work.pop() {
        if !alive.remove(&v) {
            continue;
        }
        for u in adj(v) {
            if alive.contains(&u) {
                let d = deg.get_mut(&u).unwrap();
                *d -= 1;
                if *d < 2 {
                    work.push(u);
                }
            }
        }
    }
    alive.into_iter().collect()
}

/// Full cover pass: eager pool scan, both cover loops, under-cover
/// classification, core peel, and spare-neighbor harvest.
pub fn greedy_cover(
    oracle: &mut AdjacencyMatrixOracle,
    res: &Resolved,
) -> Result<CoverState, FailureCode> {
    let n = res.n;
    let v2 = res.v2_size.min(res.v12_width);
    let v12 = res.v12_width;
    let alice = alice_scan(oracle, v2).map_err(budget_code)?;
    oracle.set_phase("greedy_cover");
    let mut m = TwoMatching::new(n);
    cover_v2_loop(oracle, &mut m, v2, v12, res.n1).map_err(budget_code)?;
    let active: Vec<u32> = (0..n as u32).collect();
    cover_v1_loop(oracle, &mut m, &active, v2, res.n1).map_err(budget_code)?;

    // d collects vertices the loops left short: unsaturated outside the pool,
    // uncovered inside it, plus pool vertices peeled out of the known core
    let mut d: Vec<u32> = Vec::new();
    for v in 0..n as u32 {
        if (v as usize) < v2 {
            if m.deg(v) == 0 {
                d.push(v);
            }
        } else if m.deg(v) < 2 {
            d.push(v);
        }
    }
    let in_d: Vec<bool> = {
        let mut b = vec![false; n];
        for &v in &d {
            b[v as usize] = true;
        }
        b
    };
    let pool_members: Vec<u32> = (0..v2 as u32).filter(|&v| !in_d[v as usize]).collect();
    let adj = |v: u32| alice[v as usize].clone();
    let core = identify_2core(&pool_members, &adj);
    let core_set: BTreeSet<u32> = core.into_iter().collect();
    for &v in &pool_members {
        if !core_set.contains(&v) && m.deg(v) < 2 {
            d.push(v);
        }
    }
    d.sort_unstable();
    d.dedup();

    let d_cap = if res.desk {
        ((n as f64) / (n as f64).ln()).ceil() as usize
    } else {
        ((n as f64) / (n as f64).ln().powi(9)).ceil() as usize
    };
    if d.len() > d_cap.max(8) {
        return Err(FailureCode::Generic);
    }

    // harvest a few spare true neighbors for each shortfall vertex from the
    // part of the row the cover loops never touched
    let d_set: BTreeSet<u32> = d.iter().copied().collect();
    let mut e_sets = Vec::with_capacity(d.len());
    for &v in &d {
        let want = (3usize.saturating_sub(m.deg(v))).max(res.e_set_target);
        let mut found = Vec::new();
        for j in 0..n as u32 {
            if found.len() >= want {
                break;
            }
            if j == v || (j as usize) < v12 || d_set.contains(&j) {
                continue;
            }
            if oracle.is_queried(v, j) {
                continue; // known miss: hits were matched on sight
            }
            if oracle.matrix_query(v, j).map_err(budget_code)? && !m.has_edge(v, j) {
                found.push(j);
            }
        }
        e_sets.push(found);
    }

    let burned: BTreeSet<u32> = d.iter().copied().collect();
    Ok(CoverState {
        m,
        v2,
        v12,
        alice,
        d,
        e_sets,
        dangerous: Vec::new(),
        special: BTreeSet::new(),
        special0: BTreeSet::new(),
        special1: BTreeSet::new(),
        burned,
    })
}

fn budget_code(e: OracleError) -> FailureCode {
    match e {
        OracleError::BudgetExceeded => FailureCode::Budget,
        _ => FailureCode::Generic,
    }
}

/// Outcome of the dangerous-vertex pass.
pub enum DangerOutcome {
    Saturated,
    /// verified-shape witness set; caller re-checks against the true graph
    Certificate(Vec<u32>),
    Fail(FailureCode),
}

/// Vertices whose spare-neighbor harvest came up short get their entire row
/// revealed; their components must then admit a path system covering them as
/// interior vertices, or the component is a witness of non-Hamiltonicity.
pub fn sat_dangerous(
    state: &mut CoverState,
    oracle: &mut AdjacencyMatrixOracle,
    res: &Resolved,
) -> DangerOutcome {
    oracle.set_phase("sat_dangerous");
    let n = res.n;
    state.dangerous = state
        .d
        .iter()
        .zip(&state.e_sets)
        .filter(|(&v, e)| e.len() + state.m.deg(v) < 2)
        .map(|(&v, _)| v)
        .collect();
    if state.dangerous.is_empty() {
        return DangerOutcome::Saturated;
    }
    if state.dangerous.len() > (n as f64).powf(0.1).ceil() as usize + 24 {
        return DangerOutcome::Fail(FailureCode::Generic);
    }
    // reveal complete rows, so every edge incident to a dangerous vertex is known
    let mut adj: std::collections::HashMap<u32, Vec<u32>> = Default::default();
    for &v in &state.dangerous {
        let mut nb = Vec::new();
        for j in 0..n as u32 {
            if j != v {
                match oracle.matrix_query(v, j) {
                    Ok(true) => nb.push(j),
                    Ok(false) => {}
                    Err(e) => return DangerOutcome::Fail(budget_code(e)),
                }
            }
        }
        adj.insert(v, nb);
    }
    // components of the dangerous set linked through shared neighbors
    let dang: Vec<u32> = state.dangerous.clone();
    let idx: std::collections::HashMap<u32, usize> =
        dang.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut comp = vec![usize::MAX; dang.len()];
    let mut ncomp = 0usize;
    for s in 0..dang.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = ncomp;
        while let Some(i) = stack.pop() {
            let mut mark = |other: usize, stack: &mut Vec<usize>| {
                if comp[other] == usize::MAX {
                    comp[other] = ncomp;
                    stack.push(other);
                }
            };
            for &u in &adj[&dang[i]] {
                if let Some(&oi) = idx.get(&u) {
                    mark(oi, &mut stack);
                }
                // two dangerous vertices sharing a neighbor interact
                for (j, dj) in dang.iter().enumerate() {
                    if j != i && adj[dj].contains(&u) {
                        mark(j, &mut stack);
                    }
                }
            }
        }
        ncomp += 1;
    }
    for c in 0..ncomp {
        let targets: Vec<u32> = dang
            .iter()
            .enumerate()
            .filter(|(i, _)| comp[*i] == c)
            .map(|(_, &v)| v)
            .collect();
        if targets.len() > 9 {
            return DangerOutcome::Fail(FailureCode::Generic);
        }
        let mut local: Vec<(u32, u32)> = Vec::new();
        for &t in &targets {
            for &u in &adj[&t] {
                local.push((t.min(u), t.max(u)));
            }
        }
        local.sort_unstable();
        local.dedup();
        match path_cover_component(&local, &targets) {
            None => return DangerOutcome::Certificate(targets),
            Some(paths) => {
                // splice the cover into m: free every spanned vertex first,
                // then lay the path edges down on degree-0 vertices
                for path in &paths {
                    for &v in path {
                        for u in state.m.neighbors(v).to_vec() {
                            state.m.remove(v, u);
                            state.special.insert(u);
                        }
                    }
                }
                for path in &paths {
                    for w in path.windows(2) {
                        if !state.m.has_edge(w[0], w[1]) {
                            state.m.add(w[0], w[1]);
                        }
                    }
                    for &e in [path[0], *path.last().unwrap()].iter() {
                        state.special.insert(e);
                    }
                }
            }
        }
    }
    DangerOutcome::Saturated
}

/// Saturates the remaining shortfall vertices through their harvested spare
/// neighbors, evicting one edge of a full partner when necessary; leftovers
/// become designated path ends rather than hard failures.
pub fn sat_trouble(state: &mut CoverState, oracle: &mut AdjacencyMatrixOracle, res: &Resolved) {
    oracle.set_phase("sat_trouble");
    let d = state.d.clone();
    for (i, &v) in d.iter().enumerate() {
        let spares = state.e_sets[i].clone();
        let mut k = 0usize;
        while state.m.deg(v) < 2 && k < spares.len() {
            let u = spares[k];
            k += 1;
            if state.m.has_edge(v, u) {
                continue;
            }
            if state.m.deg(u) == 2 {
                // free one slot on u; the displaced vertex becomes a path end
                let w = *state
                    .m
                    .neighbors(u)
                    .iter()
                    .find(|&&x| x != v)
                    .expect("saturated vertex has two neighbors");
                state.m.remove(u, w);
                state.special.insert(w);
            }
            if state.m.other_end(v) == u {
                continue; // would close a cycle
            }
            state.m.add(v, u);
        }
        if state.m.deg(v) < 2 {
            state.special.insert(v);
        }
    }
    // drain forced matches inside the reserve pool before the main shrink
    let vp = rebuild_v_prime(state);
    ks_loop(state, vp, true, 0);
    let _ = res;
}

/// Reserve-pool vertices still usable by the shrink: in the known core,
/// not a shortfall vertex, carrying exactly one matching edge.
fn rebuild_v_prime(state: &CoverState) -> BTreeSet<u32> {
    let d_set: BTreeSet<u32> = state.d.iter().copied().collect();
    let members: Vec<u32> = (0..state.v2 as u32)
        .filter(|v| !d_set.contains(v) && state.m.deg(*v) == 1)
        .collect();
    let alice = &state.alice;
    let adj = |v: u32| alice[v as usize].clone();
    identify_2core(&members, &adj)
        .into_iter()
        .filter(|&v| state.m.deg(v) == 1)
        .collect()
}

/// Degree-1-first greedy matching over the reserve pool using only the
/// eagerly read pool entries. `only_forced` restricts to the degree-1 phase;
/// otherwise runs until the pool shrinks to `stop`.
fn ks_loop(state: &mut CoverState, mut vp: BTreeSet<u32>, only_forced: bool, stop: usize) {
    let alice = state.alice.clone();
    let deg_in = |vp: &BTreeSet<u32>, v: u32| -> usize {
        alice[v as usize].iter().filter(|u| vp.contains(u)).count()
    };
    loop {
        if vp.len() <= stop && !only_forced {
            break;
        }
        // retire isolated vertices first
        let isolated: Vec<u32> = vp.iter().copied().filter(|&v| deg_in(&vp, v) == 0).collect();
        for v in isolated {
            vp.remove(&v);
            state.special0.insert(v);
        }
        if vp.len() <= stop {
            break;
        }
        let forced = vp.iter().copied().find(|&v| deg_in(&vp, v) == 1);
        let v = match forced {
            Some(v) => v,
            None if only_forced => break,
            None => match vp.iter().copied().next() {
                Some(v) => v,
                None => break,
            },
        };
        let guard = if state.m.deg(v) < 2 { state.m.other_end(v) } else { v };
        let u = alice[v as usize]
            .iter()
            .copied()
            .filter(|u| vp.contains(u) && *u != guard)
            .min();
        match u {
            Some(u) => {
                vp.remove(&v);
                vp.remove(&u);
                if state.m.deg(v) < 2 && state.m.deg(u) < 2 {
                    state.m.add(v, u);
                } else {
                    state.special1.insert(v);
                    state.special1.insert(u);
                }
            }
            None => {
                // only the cycle-closing partner is left
                vp.remove(&v);
                state.special1.insert(v);
                if deg_in(&vp, guard) > 0 || vp.contains(&guard) {
                    vp.remove(&guard);
                    state.special1.insert(guard);
                }
            }
        }
    }
    // whatever remains keeps its single edge and exits as a path end
    for v in vp {
        state.special.insert(v);
    }
}

/// Main shrink: matches reserve-pool vertices pairwise off the eager reads
/// until at most `ks_stop` remain unpaired.
pub fn karp_sipser(state: &mut CoverState, oracle: &mut AdjacencyMatrixOracle, res: &Resolved) {
    oracle.set_phase("karp_sipser");
    let vp = rebuild_v_prime(state);
    ks_loop(state, vp, false, res.ks_stop);
}

/// Last-chance saturation for any vertex still short of two edges: rescan
/// its row (cached entries are free), evicting a partner slot when needed.
/// A fully revealed row with fewer than two ones is a witness by itself.
fn rescue_pass(
    oracle: &mut AdjacencyMatrixOracle,
    m: &mut TwoMatching,
    specials: &mut BTreeSet<u32>,
    n: usize,
) -> Result<Option<Vec<u32>>, OracleError> {
    for v in 0..n as u32 {
        if m.deg(v) >= 2 || specials.contains(&v) {
            continue;
        }
        let mut ones = 0usize;
        let mut scanned_all = true;
        for j in 0..n as u32 {
            if j == v {
                continue;
            }
            if m.deg(v) >= 2 {
                scanned_all = false;
                break;
            }
            if oracle.matrix_query(v, j)? {
                ones += 1;
                if m.has_edge(v, j) || m.other_end(v) == j {
                    continue;
                }
                if m.deg(j) == 2 {
                    specials.insert(v);
                    scanned_all = false;
                    break; // leave v as a path end instead of cascading evictions
                }
                m.add(v, j);
            }
        }
        if scanned_all && ones < 2 {
            return Ok(Some(vec![v]));
        }
        if m.deg(v) < 2 {
            specials.insert(v);
        }
    }
    Ok(None)
}

fn finish(
    oracle: &mut AdjacencyMatrixOracle,
    graph: &Graph,
    m: TwoMatching,
    res: &Resolved,
) -> SolverOutcome {
    oracle.set_phase("matrix-phase2");
    debug_assert!(m.check());
    let paths = m.paths();
    let mut access = RotationAccess::Matrix { oracle };
    match merge_all(paths, &mut access, res) {
        Ok(cycle) => {
            if verify::verify_cycle(graph, &cycle) {
                SolverOutcome::Hamiltonian(cycle)
            } else {
                SolverOutcome::Failure(FailureCode::Generic)
            }
        }
        Err(code) => SolverOutcome::Failure(code),
    }
}

/// Entry point: regime dispatch on p, then the matching pipeline and the
/// rotation merge. Positive answers are re-verified against the true graph
/// and negative answers against the exhaustive certificate checker.
pub fn solve_matrix(graph: &Graph, p: f64, params: &Parameters) -> (SolverOutcome, QueryLedger) {
    let n = graph.n();
    if n < params.n_min {
        return (exact_dispatch(graph), QueryLedger::default());
    }
    let res = match params.resolve(n, p) {
        Ok(r) => r,
        Err(_) => {
            return (
                SolverOutcome::Failure(FailureCode::Generic),
                QueryLedger::default(),
            )
        }
    };
    let budget = ((3.0 * n as f64 / p.max(1e-12)) as u64).min((n as u64) * (n as u64));
    let mut oracle = AdjacencyMatrixOracle::new(graph, Some(budget));
    oracle.set_phase("dispatch");
    let out = if p < res.p_star {
        solve_sparse(graph, &mut oracle)
    } else if p >= res.large_p {
        solve_dense(graph, &mut oracle, &res)
    } else if p >= res.mid_p {
        solve_mid(graph, &mut oracle, &res)
    } else {
        solve_main(graph, &mut oracle, &res)
    };
    (out, oracle.ledger_snapshot())
}

/// Regime below the sparse threshold: hunt for an all-zero row.
fn solve_sparse(graph: &Graph, oracle: &mut AdjacencyMatrixOracle) -> SolverOutcome {
    let n = graph.n();
    for v in 0..n as u32 {
        let mut any = false;
        for j in 0..n as u32 {
            if j == v {
                continue;
            }
            match oracle.matrix_query(v, j) {
                Ok(true) => {
                    any = true;
                    break;
                }
                Ok(false) => {}
                Err(e) => return SolverOutcome::Failure(budget_code(e)),
            }
        }
        if !any {
            return if verify::verify_certificate(graph, &[v]).valid {
                SolverOutcome::NonHamiltonian(vec![v])
            } else {
                SolverOutcome::Failure(FailureCode::Failure1)
            };
        }
    }
    // every row has an edge; this regime has nothing cheaper to offer
    SolverOutcome::Failure(FailureCode::Failure2)
}

/// Dense regime: both cover loops with a tightened per-row allowance, a
/// rescue pass for stragglers, then straight to the merge.
fn solve_dense(graph: &Graph, oracle: &mut AdjacencyMatrixOracle, res: &Resolved) -> SolverOutcome {
    let n = res.n;
    oracle.set_phase("greedy_cover");
    let mut m = TwoMatching::new(n);
    let cap = ((n as f64).powf(0.4).ceil() as usize).max((8.0 / res.p).ceil() as usize);
    let v2 = res.v2_size.min(res.v12_width);
    if let Err(e) = cover_v2_loop(oracle, &mut m, v2, res.v12_width, cap) {
        return SolverOutcome::Failure(budget_code(e));
    }
    let active: Vec<u32> = (0..n as u32).collect();
    if let Err(e) = cover_v1_loop(oracle, &mut m, &active, v2, cap) {
        return SolverOutcome::Failure(budget_code(e));
    }
    let mut specials = BTreeSet::new();
    match rescue_pass(oracle, &mut m, &mut specials, n) {
        Ok(Some(cert)) => return certify(graph, cert),
        Ok(None) => {}
        Err(e) => return SolverOutcome::Failure(budget_code(e)),
    }
    finish(oracle, graph, m, res)
}

/// Mid regime: grow one long path greedily, then saturate the small
/// remainder with the cover loop seeded with the path already in place.
fn solve_mid(graph: &Graph, oracle: &mut AdjacencyMatrixOracle, res: &Resolved) -> SolverOutcome {
    let n = res.n;
    oracle.set_phase("greedy_cover");
    let mut m = TwoMatching::new(n);
    let mut covered = vec![false; n];
    let mut cur = 0u32;
    covered[0] = true;
    let mut covered_count = 1usize;
    let target = n.saturating_sub(res.tail_uncovered).max(2);
    while covered_count < target {
        let mut found = None;
        for j in 0..n as u32 {
            if covered[j as usize] || j == cur {
                continue;
            }
            match oracle.matrix_query(cur, j) {
                Ok(true) => {
                    found = Some(j);
                    break;
                }
                Ok(false) => {}
                Err(e) => return SolverOutcome::Failure(budget_code(e)),
            }
        }
        match found {
            Some(j) => {
                m.add(cur, j);
                covered[j as usize] = true;
                covered_count += 1;
                cur = j;
            }
            None => break, // dead end: hand the rest to the cover loop
        }
    }
    // remainder plus the two path ends enter the saturation loop together
    let mut active: Vec<u32> = (0..n as u32).filter(|&v| !covered[v as usize]).collect();
    active.push(0);
    active.push(cur);
    active.sort_unstable();
    active.dedup();
    if let Err(e) = cover_v1_loop(oracle, &mut m, &active, 0, res.n1) {
        return SolverOutcome::Failure(budget_code(e));
    }
    let mut specials = BTreeSet::new();
    match rescue_pass(oracle, &mut m, &mut specials, n) {
        Ok(Some(cert)) => return certify(graph, cert),
        Ok(None) => {}
        Err(e) => return SolverOutcome::Failure(budget_code(e)),
    }
    finish(oracle, graph, m, res)
}

/// Main regime: the full cover / repair / shrink pipeline.
fn solve_main(graph: &Graph, oracle: &mut AdjacencyMatrixOracle, res: &Resolved) -> SolverOutcome {
    let mut state = match greedy_cover(oracle, res) {
        Ok(s) => s,
        Err(code) => return SolverOutcome::Failure(code),
    };
    match sat_dangerous(&mut state, oracle, res) {
        DangerOutcome::Saturated => {}
        DangerOutcome::Certificate(cert) => return certify(graph, cert),
        DangerOutcome::Fail(code) => return SolverOutcome::Failure(code),
    }
    sat_trouble(&mut state, oracle, res);
    karp_sipser(&mut state, oracle, res);
    let mut specials: BTreeSet<u32> = state
        .special
        .iter()
        .chain(&state.special0)
        .chain(&state.special1)
        .copied()
        .collect();
    let mut m = state.m;
    match rescue_pass(oracle, &mut m, &mut specials, res.n) {
        Ok(Some(cert)) => return certify(graph, cert),
        Ok(None) => {}
        Err(e) => return SolverOutcome::Failure(budget_code(e)),
    }
    finish(oracle, graph, m, res)
}

fn certify(graph: &Graph, cert: Vec<u32>) -> SolverOutcome {
    let cert = match cert.iter().find(|&&v| graph.degree(v) < 2) {
        Some(&v) => vec![v],
        None => cert,
    };
    if verify::verify_certificate(graph, &cert).valid {
        SolverOutcome::NonHamiltonian(cert)
    } else {
        SolverOutcome::Failure(FailureCode::Failure1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_gnp;

    fn desk() -> Parameters {
        Parameters::desk()
    }

    #[test]
    fn two_matching_basics() {
        let mut m = TwoMatching::new(6);
        m.add(0, 1);
        m.add(1, 2);
        assert_eq!(m.other_end(0), 2);
        assert_eq!(m.other_end(2), 0);
        m.add(3, 4);
        m.add(2, 3);
        assert_eq!(m.other_end(0), 4);
        assert!(m.check());
        m.remove(1, 2);
        assert!(m.check());
        assert_eq!(m.other_end(1), 0);
        assert_eq!(m.other_end(2), 4);
        let paths = m.paths();
        assert_eq!(paths.len(), 3); // 0-1, 2-3-4, 5
    }

    #[test]
    #[should_panic(expected = "cycle")]
    fn two_matching_rejects_cycle() {
        let mut m = TwoMatching::new(3);
        m.add(0, 1);
        m.add(1, 2);
        m.add(2, 0);
    }

    #[test]
    fn complete_graph_cover_leaves_no_shortfall() {
        let g = generate_gnp(512, 1.0, 1);
        let res = desk().resolve(512, 1.0).unwrap();
        let mut oracle = AdjacencyMatrixOracle::new(&g, None);
        let state = greedy_cover(&mut oracle, &res).unwrap();
        assert!(state.d.is_empty());
        for v in 0..state.v2 as u32 {
            assert!(state.m.deg(v) >= 1, "pool vertex {v} uncovered");
        }
        for v in state.v2 as u32..512 {
            assert!(state.m.saturated(v), "vertex {v} unsaturated");
        }
        assert!(state.m.check());
    }

    #[test]
    fn planted_isolated_vertex_lands_in_shortfall() {
        let n = 512;
        let mut edges = Vec::new();
        let g0 = generate_gnp(n, 0.1, 7);
        let dead = 400u32; // outside the pool
        for v in 0..n as u32 {
            for &u in g0.neighbors(v) {
                if v < u && v != dead && u != dead {
                    edges.push((v, u));
                }
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        let res = desk().resolve(n, 0.1).unwrap();
        assert!((dead as usize) >= res.v2_size);
        let mut oracle = AdjacencyMatrixOracle::new(&g, None);
        let state = greedy_cover(&mut oracle, &res).unwrap();
        assert!(state.d.contains(&dead));
        assert!(state.m.check());
    }

    #[test]
    fn two_core_examples() {
        // C8 is retained whole
        let cyc: Vec<u32> = (0..8).collect();
        let adj_c = |v: u32| vec![(v + 7) % 8, (v + 1) % 8];
        let mut core = identify_2core(&cyc, &adj_c);
        core.sort_unstable();
        assert_eq!(core, cyc);
        // P8 peels away entirely
        let adj_p = |v: u32| -> Vec<u32> {
            let mut out = Vec::new();
            if v > 0 {
                out.push(v - 1);
            }
            if v < 7 {
                out.push(v + 1);
            }
            out
        };
        assert!(identify_2core(&cyc, &adj_p).is_empty());
    }

    #[test]
    fn two_core_matches_naive_reference() {
        let g = generate_gnp(100, 0.03, 11);
        let members: Vec<u32> = (0..100).collect();
        let adj = |v: u32| g.neighbors(v).to_vec();
        let mut fast = identify_2core(&members, &adj);
        fast.sort_unstable();
        // quadratic fixed-point reference
        let mut alive: Vec<bool> = vec![true; 100];
        loop {
            let mut changed = false;
            for v in 0..100u32 {
                if alive[v as usize] {
                    let d = g.neighbors(v).iter().filter(|u| alive[**u as usize]).count();
                    if d < 2 {
                        alive[v as usize] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let slow: Vec<u32> = (0..100u32).filter(|&v| alive[v as usize]).collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn degree_one_vertex_yields_certificate() {
        // vertex n-1 has exactly one neighbor: no interior placement exists
        let n = 256;
        let g0 = generate_gnp(n, 0.15, 3);
        let dead = (n - 1) as u32;
        let mut edges = Vec::new();
        for v in 0..n as u32 {
            for &u in g0.neighbors(v) {
                if v < u && v != dead && u != dead {
                    edges.push((v, u));
                }
            }
        }
        edges.push((0, dead));
        let g = Graph::from_edges(n, &edges).unwrap();
        let (out, _) = solve_matrix(&g, 0.15, &desk());
        match out {
            SolverOutcome::NonHamiltonian(s) => {
                assert!(verify::verify_certificate(&g, &s).valid);
            }
            other => panic!("expected a certificate, got {}", other.tag()),
        }
    }

    #[test]
    fn empty_graph_certified_non_hamiltonian() {
        let g = Graph::from_edges(128, &[]).unwrap();
        let (out, _) = solve_matrix(&g, 0.001, &desk());
        match out {
            SolverOutcome::NonHamiltonian(s) => assert_eq!(s, vec![0]),
            other => panic!("expected certificate, got {}", other.tag()),
        }
    }

    #[test]
    fn small_n_goes_exact() {
        let g = generate_gnp(24, 0.6, 5);
        let (out, ledger) = solve_matrix(&g, 0.6, &desk());
        assert_eq!(ledger.total_queries, 0);
        if let SolverOutcome::Hamiltonian(c) = out {
            assert!(verify::verify_cycle(&g, &c));
        }
    }

    #[test]
    fn ks_loop_on_even_cycle() {
        // pool = C10 known in full; forced matches never fire, pairings peel
        // the cycle down, and at most one pair diverts to the cycle guard
        let n = 32;
        let mut state = CoverState {
            m: TwoMatching::new(n),
            v2: 10,
            v12: 10,
            alice: (0..10u32)
                .map(|v| vec![(v + 9) % 10, (v + 1) % 10])
                .chain(std::iter::repeat(Vec::new()).take(n - 10))
                .collect(),
            d: Vec::new(),
            e_sets: Vec::new(),
            dangerous: Vec::new(),
            special: BTreeSet::new(),
            special0: BTreeSet::new(),
            special1: BTreeSet::new(),
            burned: BTreeSet::new(),
        };
        // each pool vertex already carries one cover edge to the outside
        for v in 0..10u32 {
            state.m.add(v, v + 10);
        }
        let vp: BTreeSet<u32> = (0..10).collect();
        ks_loop(&mut state, vp, false, 0);
        assert!(state.m.check());
        for v in 0..10u32 {
            assert!(state.m.deg(v) >= 1);
        }
        assert!(state.special1.len() <= 4);
    }

    #[test]
    fn random_solve_is_sound() {
        for seed in 0..3 {
            let n = 1500;
            let p = 3.5 * (n as f64).ln() / n as f64;
            let g = generate_gnp(n, p, seed);
            let (out, ledger) = solve_matrix(&g, p, &desk());
            match out {
                SolverOutcome::Hamiltonian(c) => assert!(verify::verify_cycle(&g, &c)),
                SolverOutcome::NonHamiltonian(s) => {
                    assert!(verify::verify_certificate(&g, &s).valid)
                }
                SolverOutcome::Failure(_) => {}
            }
            assert!(ledger.total_queries > 0);
        }
    }
}
