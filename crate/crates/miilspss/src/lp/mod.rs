//! Linear-programming layer: relaxes a [`ModelIr`](crate::model::ModelIr),
//! converts it to computational standard form (one slack per row, general
//! bounds) and solves it with the built-in revised simplex.
//!
//! Binary variables are always treated as their `[0, 1]` relaxation here;
//! integrality is the branch-and-bound layer's concern. That layer passes
//! per-variable bound overrides to fix or tighten variables at a node.

mod lu;
mod simplex;

pub use simplex::{RawSolution, RawStatus, SimplexError, SimplexLimits, StandardForm};

use crate::model::{Domain, ModelIr, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    /// Objective value including the model's constant offset. Meaningful
    /// only when `status == Optimal`.
    pub objective: f64,
    /// Values of the model's variables, in variable order.
    pub primal: Vec<f64>,
    /// Row duals, in row order.
    pub dual: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LpLimits {
    pub max_iterations: usize,
    /// Absolute primal feasibility tolerance (scaled by row magnitudes).
    pub feas_tol: f64,
    /// Reduced-cost tolerance for optimality.
    pub opt_tol: f64,
}

impl Default for LpLimits {
    fn default() -> Self {
        Self {
            max_iterations: 200_000,
            feas_tol: 1e-7,
            opt_tol: 1e-9,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LpError {
    #[error("simplex failed: {0}")]
    Simplex(#[from] SimplexError),
    #[error("solution fails feasibility verification: row {row} has residual {residual:.3e}")]
    Verification { row: usize, residual: f64 },
    #[error("bound override for variable {var} is empty ({lo} > {hi})")]
    EmptyBound { var: usize, lo: f64, hi: f64 },
}

/// Fixed or tightened bounds for a subset of variables, used by the
/// branch-and-bound tree. Entries are `(variable index, lower, upper)`.
pub type BoundOverrides = [(usize, f64, f64)];

/// Backend seam: anything that can solve a standard-form LP. The built-in
/// simplex is the default; an adapter to an external solver can be swapped
/// in without touching callers of [`solve_lp_with`].
pub trait LpBackend {
    fn solve_form(
        &self,
        form: &StandardForm,
        limits: &SimplexLimits,
    ) -> Result<RawSolution, SimplexError>;
}

/// The built-in two-phase revised primal simplex.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuiltinSimplex;

impl LpBackend for BuiltinSimplex {
    fn solve_form(
        &self,
        form: &StandardForm,
        limits: &SimplexLimits,
    ) -> Result<RawSolution, SimplexError> {
        simplex::solve(form, limits)
    }
}

/// Continuous relaxation of a model (binaries become `[0, 1]`).
pub fn relax(model: &ModelIr) -> ModelIr {
    model.relaxed()
}

/// Solves the LP relaxation of `model` with optional bound overrides,
/// using the built-in simplex.
pub fn solve_lp(
    model: &ModelIr,
    overrides: &BoundOverrides,
    limits: &LpLimits,
) -> Result<LpResult, LpError> {
    solve_lp_with(&BuiltinSimplex, model, overrides, limits)
}

/// [`solve_lp`] with an explicit backend.
pub fn solve_lp_with(
    backend: &dyn LpBackend,
    model: &ModelIr,
    overrides: &BoundOverrides,
    limits: &LpLimits,
) -> Result<LpResult, LpError> {
    let form = to_standard_form(model, overrides)?;
    let sim_limits = SimplexLimits {
        max_iterations: limits.max_iterations,
        feas_tol: limits.feas_tol,
        opt_tol: limits.opt_tol,
    };
    let raw = backend.solve_form(&form, &sim_limits)?;
    let status = match raw.status {
        RawStatus::Optimal => LpStatus::Optimal,
        RawStatus::Infeasible => LpStatus::Infeasible,
        RawStatus::Unbounded => LpStatus::Unbounded,
        RawStatus::IterationLimit => LpStatus::IterationLimit,
    };
    let primal: Vec<f64> = raw.x[..form.n_structural].to_vec();
    if status == LpStatus::Optimal {
        verify_feasible(model, &primal, limits.feas_tol)?;
    }
    Ok(LpResult {
        status,
        objective: raw.objective + model.objective_offset(),
        primal,
        dual: raw.dual,
        iterations: raw.iterations,
    })
}

fn verify_feasible(model: &ModelIr, x: &[f64], feas_tol: f64) -> Result<(), LpError> {
    // The simplex reports optimality from its internal state; double-check
    // the returned point against the original rows so downstream bound
    // logic never consumes a silently broken solve.
    let tol_for = |rhs: f64| 1e3 * feas_tol * (1.0 + rhs.abs());
    for (r, row) in model.rows().iter().enumerate() {
        let lhs: f64 = row.terms.iter().map(|&(v, c)| c * x[v]).sum();
        let residual = match row.sense {
            Sense::Le => (lhs - row.rhs).max(0.0),
            Sense::Ge => (row.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - row.rhs).abs(),
        };
        if residual > tol_for(row.rhs) {
            return Err(LpError::Verification { row: r, residual });
        }
    }
    Ok(())
}

fn to_standard_form(
    model: &ModelIr,
    overrides: &BoundOverrides,
) -> Result<StandardForm, LpError> {
    let n = model.num_vars();
    let m = model.num_rows();
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut b = Vec::with_capacity(m);
    for (r, row) in model.rows().iter().enumerate() {
        for &(var, coeff) in &row.terms {
            cols[var].push((r, coeff));
        }
        b.push(row.rhs);
    }
    // Merge duplicate terms within a row (cuts may repeat a variable).
    for col in &mut cols {
        col.sort_unstable_by_key(|&(r, _)| r);
        col.dedup_by(|a, b| {
            if a.0 == b.0 {
                b.1 += a.1;
                true
            } else {
                false
            }
        });
        col.retain(|&(_, c)| c != 0.0);
    }
    let mut cost: Vec<f64> = model.vars().iter().map(|v| v.objective).collect();
    let mut lower: Vec<f64> = Vec::with_capacity(n + m);
    let mut upper: Vec<f64> = Vec::with_capacity(n + m);
    for v in model.vars() {
        match v.domain {
            Domain::NonNegative => {
                lower.push(0.0);
                upper.push(f64::INFINITY);
            }
            Domain::UnitInterval | Domain::Binary => {
                lower.push(0.0);
                upper.push(1.0);
            }
        }
    }
    for &(var, lo, hi) in overrides {
        assert!(var < n, "bound override for unknown variable {var}");
        if lo > hi {
            return Err(LpError::EmptyBound { var, lo, hi });
        }
        lower[var] = lower[var].max(lo);
        upper[var] = upper[var].min(hi);
        if lower[var] > upper[var] {
            return Err(LpError::EmptyBound {
                var,
                lo: lower[var],
                hi: upper[var],
            });
        }
    }
    // One slack column per row; the sense lives in the slack bounds.
    for (r, row) in model.rows().iter().enumerate() {
        cols.push(vec![(r, 1.0)]);
        cost.push(0.0);
        match row.sense {
            Sense::Le => {
                lower.push(0.0);
                upper.push(f64::INFINITY);
            }
            Sense::Ge => {
                lower.push(f64::NEG_INFINITY);
                upper.push(0.0);
            }
            Sense::Eq => {
                lower.push(0.0);
                upper.push(0.0);
            }
        }
    }
    Ok(StandardForm {
        m,
        cols,
        b,
        cost,
        lower,
        upper,
        n_structural: n,
    })
}
