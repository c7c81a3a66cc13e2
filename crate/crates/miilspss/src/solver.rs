//! Exact branch-and-bound over [`ModelIr`], root-node branch-and-cut with
//! (l,S_j) cuts, the windowed MIP heuristic driver, the fixed-setup repair
//! subroutine, and the brute-force oracle.
//!
//! All incumbents come from [`fix_y_optimal_x`]-style repair on integral
//! (or rounded) setup patterns: with setups fixed, the problem decomposes
//! per demand and the cheapest open source is chosen directly, so every
//! incumbent is a feasible plan with an exactly computed cost.

use std::collections::BinaryHeap;
use std::time::Instant;

use crate::cuts::{self, FractionalPoint, LsjCut};
use crate::instance::{Instance, PlanSolution};
use crate::lp::{solve_lp, LpError, LpLimits, LpStatus};
use crate::model::{build_mh, build_std, lsj_row, ModelIr, VarTag};

/// Limits and strategy knobs for a solve. The defaults follow the exact
/// setting; [`SolveConfig::heuristic`] switches to the heuristic time limit.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Wall-clock limit in seconds.
    pub time_limit: f64,
    /// Relative optimality gap at which a solve stops and prunes.
    pub rel_gap_tol: f64,
    /// Maximum rounds of root-node cut separation (branch-and-cut only).
    pub max_cut_rounds: usize,
    /// Separation window length; `None` picks 5 when `NT <= 50`, else 2.
    pub cut_window: Option<usize>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            time_limit: 3600.0,
            rel_gap_tol: 1e-6,
            max_cut_rounds: 10,
            cut_window: None,
        }
    }
}

impl SolveConfig {
    /// Heuristic setting: ten-minute time limit, everything else as exact.
    pub fn heuristic() -> Self {
        Self {
            time_limit: 600.0,
            ..Self::default()
        }
    }

    pub fn window_for(&self, nt: usize) -> usize {
        self.cut_window
            .unwrap_or(if nt <= 50 { 5 } else { 2 })
            .min(nt)
            .max(1)
    }
}

/// Outcome counters of a solve, mirroring the benchmark table schema.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub ub: f64,
    pub lb: f64,
    /// Root relaxation bound after any root cutting.
    pub root_bound: f64,
    /// Root relaxation bound of the plain model, before cuts.
    pub pure_lp_bound: f64,
    pub gap_pct: f64,
    pub nodes: usize,
    pub cuts_added: usize,
    pub time: f64,
    pub proven_optimal: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("model relaxation is infeasible at the root")]
    InfeasibleRoot,
    #[error("LP relaxation did not converge within the iteration limit")]
    LpStalled,
}

/// Optimal purchases for fixed setups: each positive demand `d^i_k` is
/// served entirely from the open `(j, t <= k)` minimizing
/// `P_ij + (k - t) * H_i` (ties: smaller `t`, then smaller `j`). The result
/// is optimal among all plans with exactly these setups, or `None` when
/// some positive demand has no open source.
pub fn fix_y_optimal_x(inst: &Instance, y: &[bool]) -> Option<PlanSolution> {
    repair_with_max_age(inst, y, inst.num_periods() - 1)
}

/// Repair restricted to sources at most `max_age` periods before the
/// demand (`k - t <= max_age`). With `max_age = NT - 1` this is
/// [`fix_y_optimal_x`]; smaller values give the windowed heuristic's
/// notion of optimality for fixed setups.
fn repair_with_max_age(inst: &Instance, y: &[bool], max_age: usize) -> Option<PlanSolution> {
    let (nj, ni, nt) = (
        inst.num_suppliers(),
        inst.num_items(),
        inst.num_periods(),
    );
    assert_eq!(y.len(), nj * nt);
    let mut purchase = vec![0.0; ni * nj * nt];
    for i in 0..ni {
        for k in 0..nt {
            if inst.demand(i, k) == 0.0 {
                continue;
            }
            let mut best: Option<(f64, usize, usize)> = None;
            for t in k.saturating_sub(max_age)..=k {
                for j in 0..nj {
                    if !y[inst.yidx(j, t)] {
                        continue;
                    }
                    let cost = inst.price(i, j) + (k - t) as f64 * inst.holding_cost(i);
                    let better = match best {
                        None => true,
                        Some((c, bt, bj)) => {
                            cost < c || (cost == c && (t < bt || (t == bt && j < bj)))
                        }
                    };
                    if better {
                        best = Some((cost, t, j));
                    }
                }
            }
            let (_, t, j) = best?;
            purchase[inst.xidx(i, j, t)] += inst.demand(i, k);
        }
    }
    Some(PlanSolution::new(inst, purchase, y.to_vec()))
}

/// Exact optimum by enumerating all `2^(NJ * NT)` setup patterns and
/// repairing each. Guarded to `NJ * NT <= 20`.
pub fn brute_force_opt(inst: &Instance) -> (f64, PlanSolution) {
    let bits = inst.num_suppliers() * inst.num_periods();
    assert!(bits <= 20, "brute-force guard exceeded ({bits} setup bits)");
    let mut best: Option<PlanSolution> = None;
    for mask in 0u32..1 << bits {
        let y: Vec<bool> = (0..bits).map(|b| mask >> b & 1 == 1).collect();
        if let Some(plan) = fix_y_optimal_x(inst, &y) {
            if best.as_ref().is_none_or(|b| plan.cost < b.cost) {
                best = Some(plan);
            }
        }
    }
    let best = best.expect("the all-open pattern is always repairable");
    (best.cost, best)
}

/// Best-bound branch-and-bound over the model's LP relaxation. The model's
/// binaries must be exactly its setup variables and must address the given
/// instance.
pub fn solve_bnb(
    inst: &Instance,
    model: &ModelIr,
    cfg: &SolveConfig,
) -> Result<(SolveReport, PlanSolution), SolveError> {
    bnb_with_repair(inst, model, cfg, inst.num_periods() - 1)
}

/// Branch-and-cut: root-node (l,S_j) separation over the standard
/// formulation, then branch-and-bound on the strengthened model.
pub fn solve_bc(
    inst: &Instance,
    cfg: &SolveConfig,
) -> Result<(SolveReport, PlanSolution), SolveError> {
    let mut model = build_std(inst);
    let limits = LpLimits::default();
    let window = cfg.window_for(inst.num_periods());
    let started = Instant::now();
    let mut pure_lp_bound = None;
    let mut cuts_added = 0usize;
    let mut seen = std::collections::HashSet::new();
    for _round in 0..cfg.max_cut_rounds {
        let res = solve_lp(&model, &[], &limits)?;
        match res.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(SolveError::InfeasibleRoot),
            _ => return Err(SolveError::LpStalled),
        }
        if pure_lp_bound.is_none() {
            pure_lp_bound = Some(res.objective);
        }
        let pt = fractional_point(inst, &model, &res.primal);
        let mut fresh: Vec<LsjCut> = Vec::new();
        for i in 0..inst.num_items() {
            for l in 0..inst.num_periods() {
                for start in l.saturating_sub(window - 1)..=l {
                    let cut = cuts::separate_windowed(inst, &pt, i, start, l);
                    if cut.violation > cuts::VIOLATION_TOL && seen.insert(cut.key()) {
                        fresh.push(cut);
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        for cut in &fresh {
            let row = lsj_row(inst, &model, cut).expect("cut addresses the standard model");
            model.push_row(row);
        }
        cuts_added += fresh.len();
    }
    let pre_cut_bound = pure_lp_bound.expect("at least one root LP was solved");
    let remaining = SolveConfig {
        time_limit: (cfg.time_limit - started.elapsed().as_secs_f64()).max(1.0),
        ..cfg.clone()
    };
    let (mut report, plan) = solve_bnb(inst, &model, &remaining)?;
    report.pure_lp_bound = pre_cut_bound;
    report.cuts_added = cuts_added;
    report.time = started.elapsed().as_secs_f64();
    Ok((report, plan))
}

/// Windowed MIP heuristic: branch-and-bound on the restricted
/// facility-location model with earmarks at most `k_mh - 1` periods ahead.
/// The returned plan is feasible for the original instance; its cost upper
/// bounds the true optimum. With `k_mh = NT` this is exact.
pub fn solve_mh(
    inst: &Instance,
    k_mh: usize,
    cfg: &SolveConfig,
) -> Result<(SolveReport, PlanSolution), SolveError> {
    let model = build_mh(inst, k_mh);
    bnb_with_repair(inst, &model, cfg, k_mh - 1)
}

/// Extracts a standard-space fractional point from a model's LP primal.
/// Earmark variables (if any) are aggregated into purchases.
pub fn fractional_point(inst: &Instance, model: &ModelIr, primal: &[f64]) -> FractionalPoint {
    let (nj, ni, nt) = (
        inst.num_suppliers(),
        inst.num_items(),
        inst.num_periods(),
    );
    let mut xbar = vec![0.0; ni * nj * nt];
    let mut ybar = vec![0.0; nj * nt];
    for (idx, var) in model.vars().iter().enumerate() {
        match var.tag {
            VarTag::Purchase {
                item,
                supplier,
                period,
            } => xbar[inst.xidx(item, supplier, period)] += primal[idx],
            VarTag::Earmark {
                item,
                supplier,
                period,
                ..
            } => xbar[inst.xidx(item, supplier, period)] += primal[idx],
            VarTag::Setup { supplier, period } => {
                ybar[inst.yidx(supplier, period)] = primal[idx];
            }
        }
    }
    FractionalPoint { xbar, ybar }
}

struct Node {
    bound: f64,
    /// Fixed setup variables: `(model var index, value)`.
    fixings: Vec<(usize, f64)>,
    /// Tie-break for deterministic heap order.
    serial: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.serial == other.serial
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap on "better": smaller bound first, then older serial.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(other.serial.cmp(&self.serial))
    }
}

const INTEGRALITY_TOL: f64 = 1e-6;

fn bnb_with_repair(
    inst: &Instance,
    model: &ModelIr,
    cfg: &SolveConfig,
    max_age: usize,
) -> Result<(SolveReport, PlanSolution), SolveError> {
    let started = Instant::now();
    let limits = LpLimits::default();
    let binaries: Vec<usize> = model.binary_vars().collect();
    for &v in &binaries {
        debug_assert!(matches!(model.vars()[v].tag, VarTag::Setup { .. }));
    }
    let setup_of = |fixings: &[(usize, f64)], primal: &[f64], rule: &dyn Fn(f64) -> bool| {
        let mut y = vec![false; inst.num_suppliers() * inst.num_periods()];
        for &v in &binaries {
            if let VarTag::Setup { supplier, period } = model.vars()[v].tag {
                let fixed = fixings.iter().find(|&&(f, _)| f == v).map(|&(_, x)| x);
                y[inst.yidx(supplier, period)] = match fixed {
                    Some(x) => x > 0.5,
                    None => rule(primal[v]),
                };
            }
        }
        y
    };

    // Initial incumbent: open everything and repair.
    let all_open = vec![true; inst.num_suppliers() * inst.num_periods()];
    let mut incumbent = repair_with_max_age(inst, &all_open, max_age)
        .expect("the all-open pattern is always repairable");
    let mut ub = incumbent.cost;

    let root = solve_lp(model, &[], &limits)?;
    let root_bound = match root.status {
        LpStatus::Optimal => root.objective,
        LpStatus::Infeasible => return Err(SolveError::InfeasibleRoot),
        _ => return Err(SolveError::LpStalled),
    };

    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut serial = 0usize;
    heap.push(Node {
        bound: root_bound,
        fixings: Vec::new(),
        serial,
    });
    let mut nodes = 0usize;
    let mut global_lb = root_bound;
    let mut hit_limit = false;

    while let Some(node) = heap.pop() {
        global_lb = global_lb.max(node.bound.min(ub));
        if node.bound >= ub * (1.0 - cfg.rel_gap_tol) {
            // Best-bound order: every remaining node is at least as bad.
            global_lb = ub;
            break;
        }
        if started.elapsed().as_secs_f64() > cfg.time_limit {
            hit_limit = true;
            // Put the node back so the final bound accounts for it.
            heap.push(node);
            break;
        }
        nodes += 1;
        let overrides: Vec<(usize, f64, f64)> =
            node.fixings.iter().map(|&(v, x)| (v, x, x)).collect();
        let res = solve_lp(model, &overrides, &limits)?;
        match res.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            _ => return Err(SolveError::LpStalled),
        }
        if res.objective >= ub * (1.0 - cfg.rel_gap_tol) {
            continue;
        }
        // Most fractional free binary, ties to the smallest (j, t).
        let mut branch: Option<(usize, f64)> = None;
        for &v in &binaries {
            let x = res.primal[v];
            let frac = x.min(1.0 - x);
            if frac > INTEGRALITY_TOL && branch.is_none_or(|(_, f)| frac > f) {
                branch = Some((v, frac));
            }
        }
        match branch {
            None => {
                // Integral node: the repaired plan costs exactly the node's
                // LP value's integer counterpart; close the node.
                let y = setup_of(&node.fixings, &res.primal, &|x| x > 0.5);
                if let Some(plan) = repair_with_max_age(inst, &y, max_age) {
                    if plan.cost < ub {
                        ub = plan.cost;
                        incumbent = plan;
                    }
                }
            }
            Some((v, _)) => {
                // Cheap rounding heuristic for an early strong incumbent.
                let y = setup_of(&node.fixings, &res.primal, &|x| x > 0.5);
                if let Some(plan) = repair_with_max_age(inst, &y, max_age) {
                    if plan.cost < ub {
                        ub = plan.cost;
                        incumbent = plan;
                    }
                }
                for value in [0.0, 1.0] {
                    serial += 1;
                    let mut fixings = node.fixings.clone();
                    fixings.push((v, value));
                    heap.push(Node {
                        bound: res.objective,
                        fixings,
                        serial,
                    });
                }
            }
        }
    }

    let lb = if hit_limit {
        heap.iter()
            .map(|n| n.bound)
            .fold(ub, f64::min)
            .max(global_lb.min(ub))
    } else {
        ub
    };
    let gap_pct = if ub > 0.0 { 100.0 * (ub - lb) / ub } else { 0.0 };
    let proven_optimal = !hit_limit || (ub - lb) <= cfg.rel_gap_tol * ub.abs();
    debug_assert!(inst.validate(&incumbent, 1e-6).is_ok());
    Ok((
        SolveReport {
            ub,
            lb,
            root_bound,
            pure_lp_bound: root_bound,
            gap_pct,
            nodes,
            cuts_added: 0,
            time: started.elapsed().as_secs_f64(),
            proven_optimal,
        },
        incumbent,
    ))
}
