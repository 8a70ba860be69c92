//! Named constants of both solvers, with the published defaults and a
//! desk-scale preset usable at n in the thousands.

/// Which preset the constants follow. `Paper` reproduces every literal
/// constant; `Desk` rescales per-vertex targets and pool sizes so the phases
/// can succeed at n ~ 10^3..10^6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ScaleMode {
    Paper,
    Desk,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Parameters {
    /// Coefficient of log n / n in the lower threshold p*.
    pub p_star_coeff: f64,
    /// q = min(q_np_coeff * n p, q_log_coeff * log n).
    pub q_np_coeff: f64,
    pub q_log_coeff: f64,
    /// Total list-query budget is list_budget_coeff * n.
    pub list_budget_coeff: f64,
    /// Per-list read cap is list_prefix_cap_factor * q.
    pub list_prefix_cap_factor: f64,
    /// Per-class neighbor quota in the partition scan.
    pub per_class_neighbor_target: usize,
    /// Length of the prefix lists handed to the matching stage.
    pub matching_prefix_len: usize,
    /// Alternating-tree fanout and seed-tree size.
    pub tree_fanout: usize,
    pub tree_seed_size: usize,
    /// Endpoint-set target is n^endpoint_target_exp in a rotation round.
    pub endpoint_target_exp: f64,
    /// Smallest batch of fresh endpoints worth processing in a round.
    pub rotation_min_batch: usize,
    /// n1 = n / log^{n1_exp_denom} n.
    pub n1_exp_denom: f64,
    /// Width of the scan window V12 is n / (v12_width_denom * log log n).
    pub v12_width_denom: f64,
    /// Reserve-edge quota per vertex in the matrix cover (log log n based).
    pub g_set_coeff: f64,
    /// E(v) quota is e_set_target_coeff * log n.
    pub e_set_target_coeff: f64,
    /// A row is burned once burned_row_frac * n of its entries were queried.
    pub burned_row_frac: f64,
    /// Karp-Sipser stops once the core has at most n^ks_stop_exp vertices.
    pub ks_stop_exp: f64,
    /// Regime boundaries of the matrix dispatch.
    pub regime_large_p_exp: f64,
    pub regime_mid_p_coeff: f64,
    /// Greedy-path tail size is tail_uncovered_coeff * log n / p.
    pub tail_uncovered_coeff: f64,
    /// Fanout base replacing 10^4/10^3 in desk-scaled tree generations.
    pub tree_fanout_base: usize,
    /// Below n_min every solve dispatches to the exact oracle.
    pub n_min: usize,
    pub scale_mode: ScaleMode,
}

impl Parameters {
    /// The published constants, valid asymptotically.
    pub fn paper() -> Parameters {
        Parameters {
            p_star_coeff: 0.999,
            q_np_coeff: 0.25,
            q_log_coeff: 100.0,
            list_budget_coeff: 1e5,
            list_prefix_cap_factor: 3.0,
            per_class_neighbor_target: 4000,
            matching_prefix_len: 3000,
            tree_fanout: 1000,
            tree_seed_size: 2001,
            endpoint_target_exp: 0.55,
            rotation_min_batch: 1000,
            n1_exp_denom: 0.6,
            v12_width_denom: 1.0,
            g_set_coeff: 1.0,
            e_set_target_coeff: 0.01,
            burned_row_frac: 1e-5,
            ks_stop_exp: 0.41,
            regime_large_p_exp: 1.0 / 3.0,
            regime_mid_p_coeff: 101.0,
            tail_uncovered_coeff: 30.0,
            tree_fanout_base: 10_000,
            n_min: 64,
            scale_mode: ScaleMode::Paper,
        }
    }

    /// Desk preset: same formulas, constants rescaled so the phases are
    /// observable at reachable n. The scan coefficient rises to 1.5 np (burning
    /// a vertex only when a class is genuinely scarce among its neighbors) and
    /// the tree machinery shrinks geometrically with base 8.
    pub fn desk() -> Parameters {
        Parameters {
            q_np_coeff: 1.5,
            rotation_min_batch: 1,
            tree_fanout_base: 8,
            scale_mode: ScaleMode::Desk,
            ..Parameters::paper()
        }
    }

    pub fn resolve(&self, n: usize, p: f64) -> Result<Resolved, ResolveError> {
        resolve_parameters(n, p, self)
    }
}

impl Default for Parameters {
    fn default() -> Self {
        Parameters::desk()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ResolveError {
    #[error("n = {0} is below n_min = {1}; dispatch to the exact solver")]
    TooSmall(usize, usize),
    #[error("p = {0} outside [0,1]")]
    BadP(f64),
}

/// All formulas of `Parameters` evaluated at a concrete (n, p).
#[derive(Debug, Clone)]
pub struct Resolved {
    pub n: usize,
    pub p: f64,
    /// q = min(q_np_coeff np, q_log_coeff log n), at least 1.
    pub q: usize,
    pub p_star: f64,
    pub n1: usize,
    /// Total list budget in queries.
    pub list_budget: u64,
    /// Hard per-list read cap (3q in paper mode).
    pub list_prefix_cap: usize,
    pub per_class_target: usize,
    pub matching_prefix_len: usize,
    pub tree_fanout: usize,
    pub tree_seed_size: usize,
    /// |End| target per rotation expansion.
    pub endpoint_target: usize,
    pub rotation_min_batch: usize,
    /// Scan-window width for the matrix cover.
    pub v12_width: usize,
    /// Size of the reserve pool V2 in the matrix cover.
    pub v2_size: usize,
    pub g_set_target: usize,
    pub e_set_target: usize,
    /// Row-query count at which a row burns.
    pub burned_row_cap: usize,
    pub ks_stop: usize,
    /// Matrix regime boundaries.
    pub large_p: f64,
    pub mid_p: f64,
    /// Greedy-path tail size for the mid regime.
    pub tail_uncovered: usize,
    pub tree_fanout_base: usize,
    pub desk: bool,
}

pub fn resolve_parameters(n: usize, p: f64, params: &Parameters) -> Result<Resolved, ResolveError> {
    if n < params.n_min.max(3) {
        return Err(ResolveError::TooSmall(n, params.n_min));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(ResolveError::BadP(p));
    }
    let nf = n as f64;
    let ln = nf.ln();
    let lln = ln.ln().max(1.0);
    let desk = params.scale_mode == ScaleMode::Desk;
    let q = (params.q_np_coeff * nf * p)
        .min(params.q_log_coeff * ln)
        .floor()
        .max(1.0) as usize;
    let per_class_target = if desk {
        // caps the quota so the scan can actually meet it at desk degrees
        params
            .per_class_neighbor_target
            .min(((nf * p / 24.0).round() as usize).max(1))
    } else {
        params.per_class_neighbor_target
    };
    let list_budget = if desk {
        (params.list_budget_coeff * nf).max(64.0 * nf) as u64
    } else {
        (params.list_budget_coeff * nf) as u64
    };
    let deg_bound = (nf * p).max(1.0);
    let cap_quarter_deg = |v: usize| -> usize {
        if desk {
            v.min(((deg_bound / 4.0).floor() as usize).max(1))
        } else {
            v
        }
    };
    let endpoint_target = (nf.powf(params.endpoint_target_exp).ceil() as usize).max(4);
    let v12_width = if desk {
        n.min(((nf / (params.v12_width_denom * lln)).ceil() as usize).max(64))
    } else {
        (nf / (params.v12_width_denom * lln)).ceil() as usize
    };
    let n1 = (nf / ln.powf(params.n1_exp_denom)).ceil() as usize;
    let v2_size = if desk {
        // internal average degree about 5 keeps the core machinery alive
        ((5.0 / p.max(1e-12)).ceil() as usize).max(16).min(n / 4)
    } else {
        (10 * n1).min(n / 4)
    };
    let g_set_target = if desk {
        ((params.g_set_coeff * lln).ceil() as usize).max(3)
    } else {
        (params.g_set_coeff * lln).ceil() as usize
    };
    let e_set_target = ((params.e_set_target_coeff * ln).ceil() as usize).max(1);
    Ok(Resolved {
        n,
        p,
        q,
        p_star: params.p_star_coeff * ln / nf,
        n1,
        list_budget,
        list_prefix_cap: ((params.list_prefix_cap_factor * q as f64).ceil() as usize).max(3),
        per_class_target,
        matching_prefix_len: params.matching_prefix_len,
        tree_fanout: cap_quarter_deg(params.tree_fanout),
        tree_seed_size: params.tree_seed_size,
        endpoint_target,
        rotation_min_batch: params.rotation_min_batch,
        v12_width,
        v2_size,
        g_set_target,
        e_set_target,
        burned_row_cap: ((params.burned_row_frac * nf).ceil() as usize).max(if desk { n } else { 1 }),
        ks_stop: (nf.powf(params.ks_stop_exp).ceil() as usize).max(1),
        large_p: nf.powf(-params.regime_large_p_exp),
        mid_p: params.regime_mid_p_coeff * ln / nf,
        tail_uncovered: ((params.tail_uncovered_coeff * ln / p.max(1e-12)).ceil() as usize).min(n),
        tree_fanout_base: params.tree_fanout_base,
        desk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_min_branches() {
        let paper = Parameters::paper();
        // (n=10^4, p=0.002): q = min(0.25 * 20, 100 ln 10^4) = 5
        let r = resolve_parameters(10_000, 0.002, &paper).unwrap();
        assert_eq!(r.q, 5);
        // (n=10^4, p=1.0): q = 100 ln 10^4
        let r = resolve_parameters(10_000, 1.0, &paper).unwrap();
        assert_eq!(r.q, (100.0 * (10_000f64).ln()).floor() as usize);
        // boundary of the min: 0.25 n p = 100 log n at p = 400 log n / n
        let n = 10_000usize;
        let p = 400.0 * (n as f64).ln() / n as f64;
        let r = resolve_parameters(n, p.min(1.0), &paper).unwrap();
        let lhs = 0.25 * n as f64 * p;
        let rhs = 100.0 * (n as f64).ln();
        assert!((lhs - rhs).abs() < 1e-6);
        assert_eq!(r.q, lhs.floor() as usize);
    }

    #[test]
    fn rejects_tiny_n() {
        assert!(resolve_parameters(10, 0.5, &Parameters::desk()).is_err());
    }

    #[test]
    fn paper_literals_survive() {
        let p = Parameters::paper();
        assert_eq!(p.per_class_neighbor_target, 4000);
        assert_eq!(p.matching_prefix_len, 3000);
        assert_eq!(p.tree_seed_size, 2001);
        assert_eq!(p.tree_fanout, 1000);
        assert!((p.list_budget_coeff - 1e5).abs() < 1e-9);
        assert!((p.p_star_coeff - 0.999).abs() < 1e-12);
        let r = resolve_parameters(100_000, 0.001, &p).unwrap();
        assert_eq!(r.per_class_target, 4000);
    }

    #[test]
    fn desk_scales_targets_down() {
        let r = resolve_parameters(10_000, 3.0 * (10_000f64).ln() / 10_000.0, &Parameters::desk())
            .unwrap();
        assert!(r.per_class_target >= 1 && r.per_class_target <= 4000);
        assert!(r.q >= 1);
        assert!(r.v2_size >= 16);
    }
}
