//! Two-phase primal simplex over a revised, sparse representation.
//!
//! The problem is held in computational standard form: `min c'x` subject
//! to `Ax = b` with a slack column on every row (row sense is encoded in
//! the slack bounds) and general variable bounds `l <= x <= u`. Phase 1
//! starts from an all-artificial basis and minimizes the artificial sum;
//! phase 2 optimizes the true objective. The basis inverse is kept as a
//! sparse LU factorization plus a product-form eta file, refactorized
//! periodically. Pricing is Dantzig's rule, falling back to Bland's rule
//! after a long degeneracy streak.

use super::lu::LuFactors;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, thiserror::Error)]
pub enum SimplexError {
    #[error("numerical breakdown: {0}")]
    Numerical(String),
}

/// Problem in computational standard form. Columns `0..n_structural` are
/// the caller's variables; the rest are row slacks.
#[derive(Debug, Clone)]
pub struct StandardForm {
    pub m: usize,
    /// All columns (structural then slack), sparse `(row, value)`.
    pub cols: Vec<Vec<(usize, f64)>>,
    pub b: Vec<f64>,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub n_structural: usize,
}

#[derive(Debug)]
pub struct RawSolution {
    pub status: RawStatus,
    /// Values of all columns (structural and slack).
    pub x: Vec<f64>,
    /// Row duals from the final basis.
    pub dual: Vec<f64>,
    /// `cost . x` over all columns (no constant offset).
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexLimits {
    pub max_iterations: usize,
    pub feas_tol: f64,
    pub opt_tol: f64,
}

impl Default for SimplexLimits {
    fn default() -> Self {
        Self {
            max_iterations: 200_000,
            feas_tol: 1e-7,
            opt_tol: 1e-9,
        }
    }
}

const REFACTOR_EVERY: usize = 64;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERACY_STREAK: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Loc {
    Basic,
    AtLower,
    AtUpper,
}

struct Eta {
    pos: usize,
    pivot: f64,
    /// Off-pivot entries `(position, value)` of the transformed column.
    col: Vec<(usize, f64)>,
}

pub fn solve(problem: &StandardForm, limits: &SimplexLimits) -> Result<RawSolution, SimplexError> {
    Solver::new(problem, limits).run()
}

struct Solver<'a> {
    p: &'a StandardForm,
    limits: SimplexLimits,
    /// Total columns including artificials.
    n_total: usize,
    art_cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    loc: Vec<Loc>,
    basis: Vec<usize>,
    x_basic: Vec<f64>,
    lu: Option<LuFactors>,
    etas: Vec<Eta>,
    iterations: usize,
    degenerate_streak: usize,
    bland: bool,
    // Scratch buffers.
    work_row: Vec<f64>,
    work_pos: Vec<f64>,
}

enum StepOutcome {
    Optimal,
    Unbounded,
    Moved,
}

impl<'a> Solver<'a> {
    fn new(problem: &'a StandardForm, limits: &SimplexLimits) -> Self {
        let m = problem.m;
        let n = problem.cols.len();
        Solver {
            p: problem,
            limits: *limits,
            n_total: n + m,
            art_cols: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            loc: Vec::new(),
            basis: Vec::new(),
            x_basic: vec![0.0; m],
            lu: None,
            etas: Vec::new(),
            iterations: 0,
            degenerate_streak: 0,
            bland: false,
            work_row: vec![0.0; m],
            work_pos: vec![0.0; m],
        }
    }

    fn col(&self, j: usize) -> &[(usize, f64)] {
        if j < self.p.cols.len() {
            &self.p.cols[j]
        } else {
            &self.art_cols[j - self.p.cols.len()]
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.loc[j] {
            Loc::AtLower => self.lower[j],
            Loc::AtUpper => self.upper[j],
            Loc::Basic => unreachable!(),
        }
    }

    fn run(mut self) -> Result<RawSolution, SimplexError> {
        let m = self.p.m;
        let n = self.p.cols.len();
        self.lower = self.p.lower.clone();
        self.upper = self.p.upper.clone();
        self.loc = Vec::with_capacity(self.n_total);
        for j in 0..n {
            // Nonbasic at the finite bound closest to zero.
            let (lo, hi) = (self.lower[j], self.upper[j]);
            let at_lower = lo.is_finite() && (!hi.is_finite() || lo.abs() <= hi.abs());
            self.loc.push(if at_lower { Loc::AtLower } else { Loc::AtUpper });
        }
        // Residual left for the artificial basis.
        let mut residual = self.p.b.clone();
        for j in 0..n {
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                for &(row, a) in &self.p.cols[j] {
                    residual[row] -= a * v;
                }
            }
        }
        self.art_cols = (0..m)
            .map(|r| vec![(r, if residual[r] < 0.0 { -1.0 } else { 1.0 })])
            .collect();
        self.lower.resize(n + m, 0.0);
        self.upper.resize(n + m, f64::INFINITY);
        self.basis = (n..n + m).collect();
        self.loc.resize(n + m, Loc::Basic);
        self.x_basic = residual.iter().map(|r| r.abs()).collect();
        self.refactorize()?;

        // Phase 1: minimize the artificial sum.
        let mut phase1_cost = vec![0.0; self.n_total];
        for c in phase1_cost.iter_mut().skip(n) {
            *c = 1.0;
        }
        let status = self.optimize(&phase1_cost, true)?;
        if status == RawStatus::IterationLimit {
            return Ok(self.finish(RawStatus::IterationLimit));
        }
        let infeas: f64 = self
            .basis
            .iter()
            .zip(&self.x_basic)
            .filter(|(&j, _)| j >= n)
            .map(|(_, &v)| v)
            .sum();
        let b_scale = 1.0 + self.p.b.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
        if infeas > self.limits.feas_tol * b_scale {
            return Ok(self.finish(RawStatus::Infeasible));
        }
        // Phase 2: pin artificials to zero and optimize the true costs.
        for j in n..self.n_total {
            self.lower[j] = 0.0;
            self.upper[j] = 0.0;
        }
        let mut phase2_cost = vec![0.0; self.n_total];
        phase2_cost[..n].copy_from_slice(&self.p.cost);
        self.bland = false;
        self.degenerate_streak = 0;
        let status = self.optimize(&phase2_cost, false)?;
        Ok(self.finish(status))
    }

    fn finish(mut self, status: RawStatus) -> RawSolution {
        let n = self.p.cols.len();
        let mut x = vec![0.0; n];
        for (j, xj) in x.iter_mut().enumerate() {
            if self.loc[j] != Loc::Basic {
                *xj = self.nonbasic_value(j);
            }
        }
        for (pos, &j) in self.basis.clone().iter().enumerate() {
            if j < n {
                x[j] = self.x_basic[pos];
            }
        }
        let mut phase2_cost = vec![0.0; self.n_total];
        phase2_cost[..n].copy_from_slice(&self.p.cost);
        let dual = if self.lu.is_some() {
            self.btran_costs(&phase2_cost).to_vec()
        } else {
            vec![0.0; self.p.m]
        };
        let objective = self
            .p
            .cost
            .iter()
            .zip(&x)
            .map(|(c, v)| c * v)
            .sum::<f64>();
        RawSolution {
            status,
            x,
            dual,
            objective,
            iterations: self.iterations,
        }
    }

    fn refactorize(&mut self) -> Result<(), SimplexError> {
        let m = self.p.m;
        let cols: Vec<Vec<(usize, f64)>> =
            self.basis.iter().map(|&j| self.col(j).to_vec()).collect();
        self.lu = Some(
            LuFactors::factorize(m, &cols)
                .map_err(|e| SimplexError::Numerical(e.to_string()))?,
        );
        self.etas.clear();
        // Recompute basic values from scratch to wash out drift.
        let mut rhs = self.p.b.clone();
        for j in 0..self.n_total {
            if self.loc[j] != Loc::Basic {
                let v = self.nonbasic_value(j);
                if v != 0.0 {
                    for &(row, a) in self.col(j) {
                        rhs[row] -= a * v;
                    }
                }
            }
        }
        let lu = self.lu.as_ref().unwrap();
        let mut out = vec![0.0; m];
        lu.ftran(&mut rhs, &mut out);
        self.x_basic = out;
        Ok(())
    }

    /// `B^{-1} a_j` in basis-position space.
    fn ftran_col(&mut self, j: usize) -> Vec<f64> {
        let m = self.p.m;
        self.work_row.iter_mut().for_each(|v| *v = 0.0);
        if j < self.p.cols.len() {
            for &(row, a) in &self.p.cols[j] {
                self.work_row[row] = a;
            }
        } else {
            // Artificial columns are single-entry.
            let (row, a) = self.art_cols[j - self.p.cols.len()][0];
            self.work_row[row] = a;
        }
        let lu = self.lu.as_ref().unwrap();
        let mut out = vec![0.0; m];
        lu.ftran(&mut self.work_row, &mut out);
        for eta in &self.etas {
            let t = out[eta.pos] / eta.pivot;
            if t != 0.0 {
                for &(p, v) in &eta.col {
                    out[p] -= v * t;
                }
            }
            out[eta.pos] = t;
        }
        out
    }

    /// Row duals `z` with `z = B^{-T} c_B`, indexed by original row.
    fn btran_costs(&mut self, cost: &[f64]) -> &[f64] {
        let m = self.p.m;
        for (pos, &j) in self.basis.iter().enumerate() {
            self.work_pos[pos] = cost[j];
        }
        for eta in self.etas.iter().rev() {
            let mut v = self.work_pos[eta.pos];
            for &(p, w) in &eta.col {
                v -= w * self.work_pos[p];
            }
            self.work_pos[eta.pos] = v / eta.pivot;
        }
        let lu = self.lu.as_ref().unwrap();
        lu.btran(&self.work_pos, &mut self.work_row);
        (0..m).for_each(|pos| self.work_pos[pos] = 0.0);
        &self.work_row
    }

    fn optimize(&mut self, cost: &[f64], phase1: bool) -> Result<RawStatus, SimplexError> {
        loop {
            if self.iterations >= self.limits.max_iterations {
                return Ok(RawStatus::IterationLimit);
            }
            if self.etas.len() >= REFACTOR_EVERY {
                self.refactorize()?;
            }
            match self.step(cost, phase1)? {
                StepOutcome::Optimal => return Ok(RawStatus::Optimal),
                StepOutcome::Unbounded => return Ok(RawStatus::Unbounded),
                StepOutcome::Moved => {}
            }
        }
    }

    fn step(&mut self, cost: &[f64], phase1: bool) -> Result<StepOutcome, SimplexError> {
        let z: Vec<f64> = self.btran_costs(cost).to_vec();
        // Pricing.
        let mut entering: Option<(usize, f64)> = None;
        for (j, &cj) in cost.iter().enumerate() {
            if self.loc[j] == Loc::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            if phase1 && j >= self.p.cols.len() && self.loc[j] != Loc::Basic {
                // Nonbasic artificials never re-enter.
                continue;
            }
            let mut d = cj;
            for &(row, a) in self.col(j) {
                d -= z[row] * a;
            }
            let eligible = match self.loc[j] {
                Loc::AtLower => d < -self.limits.opt_tol,
                Loc::AtUpper => d > self.limits.opt_tol,
                Loc::Basic => false,
            };
            if !eligible {
                continue;
            }
            if self.bland {
                entering = Some((j, d));
                break;
            }
            if entering.is_none_or(|(_, best)| d.abs() > best.abs()) {
                entering = Some((j, d));
            }
        }
        let Some((q, _)) = entering else {
            return Ok(StepOutcome::Optimal);
        };
        let dir = if self.loc[q] == Loc::AtLower { 1.0 } else { -1.0 };
        let w = self.ftran_col(q);

        // Ratio test: basics hitting a bound, or the entering variable
        // flipping to its opposite bound.
        let flip_limit = self.upper[q] - self.lower[q];
        let mut theta = flip_limit;
        let mut leaving: Option<(usize, f64)> = None; // (position, |w|)
        for (pos, &wp) in w.iter().enumerate() {
            let delta = dir * wp;
            let jb = self.basis[pos];
            let limit = if delta > PIVOT_TOL {
                if self.lower[jb].is_finite() {
                    (self.x_basic[pos] - self.lower[jb]) / delta
                } else {
                    continue;
                }
            } else if delta < -PIVOT_TOL {
                if self.upper[jb].is_finite() {
                    (self.upper[jb] - self.x_basic[pos]) / -delta
                } else {
                    continue;
                }
            } else {
                continue;
            };
            let limit = limit.max(0.0);
            let replace = match leaving {
                None => limit < theta,
                Some((best_pos, best_abs)) => {
                    if limit < theta - 1e-12 {
                        true
                    } else if limit <= theta + 1e-12 {
                        if self.bland {
                            self.basis[pos] < self.basis[best_pos]
                        } else {
                            wp.abs() > best_abs
                        }
                    } else {
                        false
                    }
                }
            };
            if replace {
                theta = limit.min(theta);
                leaving = Some((pos, wp.abs()));
            }
        }
        if !theta.is_finite() {
            return Ok(StepOutcome::Unbounded);
        }
        self.iterations += 1;
        if theta <= 1e-12 {
            self.degenerate_streak += 1;
            if self.degenerate_streak >= DEGENERACY_STREAK {
                self.bland = true;
            }
        } else {
            self.degenerate_streak = 0;
            self.bland = false;
        }

        match leaving {
            None => {
                // Bound flip: the entering variable crosses to its other bound.
                for (pos, &wp) in w.iter().enumerate() {
                    if wp != 0.0 {
                        self.x_basic[pos] -= dir * wp * theta;
                    }
                }
                self.loc[q] = if self.loc[q] == Loc::AtLower {
                    Loc::AtUpper
                } else {
                    Loc::AtLower
                };
            }
            Some((pos, _)) => {
                let pivot = w[pos];
                if pivot.abs() < 1e-9 && !self.etas.is_empty() {
                    // Stale representation; rebuild and retry this step.
                    self.iterations -= 1;
                    self.refactorize()?;
                    return self.step(cost, phase1);
                }
                if pivot.abs() < 1e-11 {
                    return Err(SimplexError::Numerical(format!(
                        "pivot {pivot:.3e} too small after refactorization"
                    )));
                }
                let entering_value = self.nonbasic_value(q) + dir * theta;
                let leaving_var = self.basis[pos];
                let delta = dir * w[pos];
                self.loc[leaving_var] = if delta > 0.0 { Loc::AtLower } else { Loc::AtUpper };
                for (p, &wp) in w.iter().enumerate() {
                    if wp != 0.0 {
                        self.x_basic[p] -= dir * wp * theta;
                    }
                }
                self.basis[pos] = q;
                self.loc[q] = Loc::Basic;
                self.x_basic[pos] = entering_value;
                let col: Vec<(usize, f64)> = w
                    .iter()
                    .enumerate()
                    .filter(|&(p, &v)| p != pos && v != 0.0)
                    .map(|(p, &v)| (p, v))
                    .collect();
                self.etas.push(Eta {
                    pos,
                    pivot,
                    col,
                });
            }
        }
        Ok(StepOutcome::Moved)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(
        m: usize,
        cols: Vec<Vec<(usize, f64)>>,
        b: Vec<f64>,
        cost: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        n_structural: usize,
    ) -> StandardForm {
        StandardForm {
            m,
            cols,
            b,
            cost,
            lower,
            upper,
            n_structural,
        }
    }

    #[test]
    fn one_variable_lower_bound() {
        // min v s.t. v >= 5  ->  v + s = 5, s <= 0.
        let p = lp(
            1,
            vec![vec![(0, 1.0)], vec![(0, 1.0)]],
            vec![5.0],
            vec![1.0, 0.0],
            vec![0.0, f64::NEG_INFINITY],
            vec![f64::INFINITY, 0.0],
            1,
        );
        let sol = solve(&p, &SimplexLimits::default()).unwrap();
        assert_eq!(sol.status, RawStatus::Optimal);
        assert!((sol.objective - 5.0).abs() < 1e-9);
        assert!((sol.x[0] - 5.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_below() {
        // min -v, v >= 0, one vacuous row 0*v + s = 0 with free-ish slack.
        let p = lp(
            1,
            vec![vec![(0, 1.0)], vec![(0, 1.0)]],
            vec![0.0],
            vec![-1.0, 0.0],
            vec![0.0, f64::NEG_INFINITY],
            vec![f64::INFINITY, 0.0],
            1,
        );
        let sol = solve(&p, &SimplexLimits::default()).unwrap();
        assert_eq!(sol.status, RawStatus::Unbounded);
    }

    #[test]
    fn infeasible_bounds() {
        // v >= 5 and v <= 3.
        let p = lp(
            2,
            vec![
                vec![(0, 1.0), (1, 1.0)],
                vec![(0, 1.0)],
                vec![(1, 1.0)],
            ],
            vec![5.0, 3.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, f64::NEG_INFINITY, 0.0],
            vec![f64::INFINITY, 0.0, f64::INFINITY],
            1,
        );
        let sol = solve(&p, &SimplexLimits::default()).unwrap();
        assert_eq!(sol.status, RawStatus::Infeasible);
    }

    #[test]
    fn equality_row_with_upper_bounds() {
        // min x1 + 2 x2 s.t. x1 + x2 = 3, 0 <= x1 <= 2, 0 <= x2 <= 5.
        let p = lp(
            1,
            vec![vec![(0, 1.0)], vec![(0, 1.0)], vec![(0, 1.0)]],
            vec![3.0],
            vec![1.0, 2.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![2.0, 5.0, 0.0],
            2,
        );
        let sol = solve(&p, &SimplexLimits::default()).unwrap();
        assert_eq!(sol.status, RawStatus::Optimal);
        assert!((sol.objective - 4.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0).abs() < 1e-9);
        assert!((sol.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn duals_satisfy_strong_duality() {
        // min 3x + 2y s.t. x + y >= 4, x + 3y >= 6, x,y >= 0.
        let p = lp(
            2,
            vec![
                vec![(0, 1.0), (1, 1.0)],
                vec![(0, 1.0), (1, 3.0)],
                vec![(0, 1.0)],
                vec![(1, 1.0)],
            ],
            vec![4.0, 6.0],
            vec![3.0, 2.0, 0.0, 0.0],
            vec![0.0, 0.0, f64::NEG_INFINITY, f64::NEG_INFINITY],
            vec![f64::INFINITY, f64::INFINITY, 0.0, 0.0],
            2,
        );
        let sol = solve(&p, &SimplexLimits::default()).unwrap();
        assert_eq!(sol.status, RawStatus::Optimal);
        let dual_obj = 4.0 * sol.dual[0] + 6.0 * sol.dual[1];
        assert!((sol.objective - dual_obj).abs() < 1e-8);
        assert!(sol.dual.iter().all(|&d| d >= -1e-9));
    }
}
