//! Solver-agnostic MILP representations of the lot-sizing problem.
//!
//! Four builders produce [`ModelIr`] values: the standard formulation over
//! purchase variables `x(i,j,t)`, the facility-location formulation over
//! earmark variables `X(i,j,t,k)` (amount bought in `t` for the demand of
//! `k`), its cost-based preprocessed variant, and the windowed heuristic
//! variant that only keeps earmarks within a `K`-period window. Variables
//! carry semantic tags so that cuts and repairs can address them by
//! meaning rather than by position.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::cuts::LsjCut;
use crate::instance::Instance;

/// Semantic identity of a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarTag {
    /// `x(i,j,t)`: units of item `i` bought from supplier `j` in period `t`.
    Purchase {
        item: usize,
        supplier: usize,
        period: usize,
    },
    /// `X(i,j,t,k)`: units bought in `t` earmarked for the demand of `k >= t`.
    Earmark {
        item: usize,
        supplier: usize,
        period: usize,
        for_period: usize,
    },
    /// `y(j,t)`: whether anything is ordered from supplier `j` in period `t`.
    Setup { supplier: usize, period: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Continuous, `[0, inf)`.
    NonNegative,
    /// Continuous, `[0, 1]` (a relaxed setup variable).
    UnitInterval,
    /// Integer `{0, 1}`.
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub tag: VarTag,
    pub domain: Domain,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// One sparse constraint row: `sum(coeff * var) sense rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinRow {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A sparse mixed-integer linear model. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelIr {
    vars: Vec<Variable>,
    rows: Vec<LinRow>,
    /// Constant added to the objective (the standard formulation folds the
    /// holding term into per-variable coefficients plus this constant).
    objective_offset: f64,
    index: HashMap<VarTag, usize>,
}

impl ModelIr {
    fn new() -> Self {
        Self {
            vars: Vec::new(),
            rows: Vec::new(),
            objective_offset: 0.0,
            index: HashMap::new(),
        }
    }

    fn add_var(&mut self, tag: VarTag, domain: Domain, objective: f64) -> usize {
        debug_assert!(objective >= 0.0, "cost coefficients are nonnegative");
        if let VarTag::Earmark {
            period, for_period, ..
        } = tag
        {
            debug_assert!(period <= for_period, "earmark must not serve the past");
        }
        let idx = self.vars.len();
        let prev = self.index.insert(tag, idx);
        debug_assert!(prev.is_none(), "duplicate variable tag {tag:?}");
        self.vars.push(Variable {
            tag,
            domain,
            objective,
        });
        idx
    }

    fn add_row(&mut self, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.rows.push(LinRow { terms, sense, rhs });
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn rows(&self) -> &[LinRow] {
        &self.rows
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective_offset(&self) -> f64 {
        self.objective_offset
    }

    pub fn var_index(&self, tag: VarTag) -> Option<usize> {
        self.index.get(&tag).copied()
    }

    /// Indices of the binary variables, in variable order.
    pub fn binary_vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.domain == Domain::Binary)
            .map(|(i, _)| i)
    }

    /// Appends an extra constraint row (used for cutting planes). The row
    /// must reference existing variables.
    pub fn push_row(&mut self, row: LinRow) {
        for &(var, _) in &row.terms {
            assert!(var < self.vars.len(), "row references unknown variable");
        }
        self.rows.push(row);
    }

    /// Continuous relaxation: every binary variable becomes `[0, 1]`
    /// continuous. Idempotent.
    pub fn relaxed(&self) -> ModelIr {
        let mut out = self.clone();
        for v in &mut out.vars {
            if v.domain == Domain::Binary {
                v.domain = Domain::UnitInterval;
            }
        }
        out
    }

    /// Objective value of a point, including the constant offset.
    pub fn objective_value(&self, point: &[f64]) -> f64 {
        self.objective_offset
            + self
                .vars
                .iter()
                .zip(point)
                .map(|(v, x)| v.objective * x)
                .sum::<f64>()
    }
}

/// Big-M choice for the standard formulation's linking rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BigM {
    /// `M_it = d^i_{t..NT}`: remaining demand, the tightest valid value.
    #[default]
    Tight,
    /// A single `M = max_i d^i_{1..NT}`, mimicking a loose formulation.
    Global,
}

/// Standard formulation: continuous `x(i,j,t)`, binary `y(j,t)`, cumulative
/// demand rows and big-M linking rows. The holding term is folded into the
/// `x` coefficients (`P_ij + (NT - t) * H_i` for zero-based `t`) plus a
/// constant objective offset.
pub fn build_std(inst: &Instance) -> ModelIr {
    build_std_with(inst, BigM::default())
}

pub fn build_std_with(inst: &Instance, big_m: BigM) -> ModelIr {
    let (nj, ni, nt) = dims(inst);
    let mut m = ModelIr::new();
    for j in 0..nj {
        for t in 0..nt {
            m.add_var(
                VarTag::Setup {
                    supplier: j,
                    period: t,
                },
                Domain::Binary,
                inst.transaction_cost(j),
            );
        }
    }
    for i in 0..ni {
        for j in 0..nj {
            for t in 0..nt {
                let coeff = inst.price(i, j) + (nt - t) as f64 * inst.holding_cost(i);
                m.add_var(
                    VarTag::Purchase {
                        item: i,
                        supplier: j,
                        period: t,
                    },
                    Domain::NonNegative,
                    coeff,
                );
            }
        }
    }
    for i in 0..ni {
        for t in 0..nt {
            m.objective_offset -= inst.holding_cost(i) * inst.cumulative_demand(i, 0, t);
        }
    }
    // Demand coverage: cumulative purchases of item i through t cover d^i_{1..t}.
    for i in 0..ni {
        for t in 0..nt {
            let mut terms = Vec::with_capacity(nj * (t + 1));
            for j in 0..nj {
                for k in 0..=t {
                    terms.push((purchase_idx(&m, i, j, k), 1.0));
                }
            }
            m.add_row(terms, Sense::Ge, inst.cumulative_demand(i, 0, t));
        }
    }
    let global_m = (0..ni)
        .map(|i| inst.total_demand(i))
        .fold(0.0_f64, f64::max);
    // Linking: x(i,j,t) <= M_it y(j,t).
    for i in 0..ni {
        for j in 0..nj {
            for t in 0..nt {
                let m_it = match big_m {
                    BigM::Tight => inst.cumulative_demand(i, t, nt - 1),
                    BigM::Global => global_m,
                };
                let terms = vec![
                    (purchase_idx(&m, i, j, t), 1.0),
                    (setup_idx(&m, j, t), -m_it),
                ];
                m.add_row(terms, Sense::Le, 0.0);
            }
        }
    }
    m
}

/// Facility-location formulation: earmark variables `X(i,j,t,k)` for all
/// `t <= k`, equality demand rows and disaggregated linking rows.
pub fn build_fl(inst: &Instance) -> ModelIr {
    build_fl_filtered(inst, |_, _, _, _| true)
}

/// Windowed heuristic formulation: the facility-location model restricted
/// to earmarks with `k <= t + k_mh - 1`. With `k_mh = NT` this is exactly
/// [`build_fl`].
pub fn build_mh(inst: &Instance, k_mh: usize) -> ModelIr {
    assert!(
        k_mh >= 1 && k_mh <= inst.num_periods(),
        "window size must be in [1, NT]"
    );
    build_fl_filtered(inst, |_, _, t, k| k - t < k_mh)
}

/// Which earmark variables were removed by preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessReport {
    /// Removed `(item, supplier, period, for_period)` tuples.
    pub eliminated: Vec<(usize, usize, usize, usize)>,
    /// Share of all `NI*NJ*NT*(NT+1)/2` earmark variables removed, in percent.
    pub reduction_pct: f64,
}

/// Cost-based preprocessing of the facility-location formulation: for each
/// `(i,j,t)`, once holding the demand of some period `k > t` from `t`
/// costs at least one fresh transaction (`O_j <= (k-t) * H_i * d^i_k`),
/// earmarks for `k` and every later period are dropped. The reduced model
/// keeps the same MILP optimum. Same-period earmarks `X(i,j,t,t)` are
/// never dropped.
pub fn preprocess_fl(inst: &Instance) -> (ModelIr, PreprocessReport) {
    let (nj, ni, nt) = dims(inst);
    let mut eliminated = Vec::new();
    // cutoff[(i,j,t)] = first eliminated demand period, or nt if none.
    let mut cutoff = vec![nt; ni * nj * nt];
    for i in 0..ni {
        for j in 0..nj {
            for t in 0..nt {
                for k in t + 1..nt {
                    if inst.transaction_cost(j)
                        <= (k - t) as f64 * inst.holding_cost(i) * inst.demand(i, k)
                    {
                        cutoff[(i * nj + j) * nt + t] = k;
                        for kk in k..nt {
                            eliminated.push((i, j, t, kk));
                        }
                        break;
                    }
                }
            }
        }
    }
    let model = build_fl_filtered(inst, |i, j, t, k| k < cutoff[(i * nj + j) * nt + t]);
    let total = ni * nj * nt * (nt + 1) / 2;
    let reduction_pct = 100.0 * eliminated.len() as f64 / total as f64;
    (
        model,
        PreprocessReport {
            eliminated,
            reduction_pct,
        },
    )
}

fn build_fl_filtered(
    inst: &Instance,
    keep: impl Fn(usize, usize, usize, usize) -> bool,
) -> ModelIr {
    let (nj, ni, nt) = dims(inst);
    let mut m = ModelIr::new();
    for j in 0..nj {
        for t in 0..nt {
            m.add_var(
                VarTag::Setup {
                    supplier: j,
                    period: t,
                },
                Domain::Binary,
                inst.transaction_cost(j),
            );
        }
    }
    for i in 0..ni {
        for j in 0..nj {
            for t in 0..nt {
                for k in t..nt {
                    if !keep(i, j, t, k) {
                        continue;
                    }
                    let coeff = inst.price(i, j) + (k - t) as f64 * inst.holding_cost(i);
                    m.add_var(
                        VarTag::Earmark {
                            item: i,
                            supplier: j,
                            period: t,
                            for_period: k,
                        },
                        Domain::NonNegative,
                        coeff,
                    );
                }
            }
        }
    }
    // Demand rows: every period's demand is fully earmarked.
    for i in 0..ni {
        for k in 0..nt {
            let mut terms = Vec::new();
            for j in 0..nj {
                for t in 0..=k {
                    if let Some(idx) = m.var_index(VarTag::Earmark {
                        item: i,
                        supplier: j,
                        period: t,
                        for_period: k,
                    }) {
                        terms.push((idx, 1.0));
                    }
                }
            }
            m.add_row(terms, Sense::Eq, inst.demand(i, k));
        }
    }
    // Disaggregated linking: X(i,j,t,k) <= d^i_k y(j,t).
    for (idx, var) in m.vars.clone().iter().enumerate() {
        if let VarTag::Earmark {
            item,
            supplier,
            period,
            for_period,
        } = var.tag
        {
            let y = setup_idx(&m, supplier, period);
            let terms = vec![(idx, 1.0), (y, -inst.demand(item, for_period))];
            m.add_row(terms, Sense::Le, 0.0);
        }
    }
    m
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RowError {
    #[error("cut prefix end {l} is outside the horizon (NT = {nt})")]
    PrefixOutOfRange { l: usize, nt: usize },
    #[error("setup set for supplier {supplier} contains period {period} beyond the prefix end {l}")]
    PeriodBeyondPrefix {
        supplier: usize,
        period: usize,
        l: usize,
    },
    #[error("model is missing the standard-formulation tag for {0}")]
    MissingTag(String),
}

/// Materializes one (l,S_j) inequality as a row over a standard-formulation
/// model: purchase terms for prefix periods outside `S_j`, setup terms
/// weighted by remaining prefix demand for periods inside, right-hand side
/// the full prefix demand of the cut's item.
pub fn lsj_row(inst: &Instance, model: &ModelIr, cut: &LsjCut) -> Result<LinRow, RowError> {
    let nt = inst.num_periods();
    let l = cut.l;
    if l >= nt {
        return Err(RowError::PrefixOutOfRange { l, nt });
    }
    let mut terms = Vec::new();
    for (j, s_j) in cut.s_sets.iter().enumerate() {
        if let Some(&period) = s_j.iter().find(|&&u| u > l) {
            return Err(RowError::PeriodBeyondPrefix {
                supplier: j,
                period,
                l,
            });
        }
        for u in 0..=l {
            if s_j.contains(&u) {
                let idx = model
                    .var_index(VarTag::Setup {
                        supplier: j,
                        period: u,
                    })
                    .ok_or_else(|| RowError::MissingTag(format!("y({j},{u})")))?;
                terms.push((idx, inst.cumulative_demand(cut.item, u, l)));
            } else {
                let idx = model
                    .var_index(VarTag::Purchase {
                        item: cut.item,
                        supplier: j,
                        period: u,
                    })
                    .ok_or_else(|| RowError::MissingTag(format!("x({},{j},{u})", cut.item)))?;
                terms.push((idx, 1.0));
            }
        }
    }
    Ok(LinRow {
        terms,
        sense: Sense::Ge,
        rhs: inst.cumulative_demand(cut.item, 0, l),
    })
}

fn dims(inst: &Instance) -> (usize, usize, usize) {
    (
        inst.num_suppliers(),
        inst.num_items(),
        inst.num_periods(),
    )
}

fn purchase_idx(m: &ModelIr, i: usize, j: usize, t: usize) -> usize {
    m.var_index(VarTag::Purchase {
        item: i,
        supplier: j,
        period: t,
    })
    .expect("purchase variable exists")
}

fn setup_idx(m: &ModelIr, j: usize, t: usize) -> usize {
    m.var_index(VarTag::Setup {
        supplier: j,
        period: t,
    })
    .expect("setup variable exists")
}

fn var_name(tag: VarTag) -> String {
    match tag {
        VarTag::Purchase {
            item,
            supplier,
            period,
        } => format!("x_{item}_{supplier}_{period}"),
        VarTag::Earmark {
            item,
            supplier,
            period,
            for_period,
        } => format!("X_{item}_{supplier}_{period}_{for_period}"),
        VarTag::Setup { supplier, period } => format!("y_{supplier}_{period}"),
    }
}

/// Debug export in LP-style plain text (zero-based variable names). Not a
/// bit-critical format; intended for eyeballing and external cross-checks.
pub fn write_lp_text(model: &ModelIr) -> String {
    let mut out = String::new();
    out.push_str("minimize\n obj:");
    for v in model.vars() {
        let _ = write!(out, " + {} {}", v.objective, var_name(v.tag));
    }
    if model.objective_offset() != 0.0 {
        let _ = write!(out, " + {}", model.objective_offset());
    }
    out.push_str("\nsubject to\n");
    for (r, row) in model.rows().iter().enumerate() {
        let _ = write!(out, " c{r}:");
        for &(var, coeff) in &row.terms {
            let _ = write!(out, " + {} {}", coeff, var_name(model.vars()[var].tag));
        }
        let sense = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {sense} {}", row.rhs);
    }
    out.push_str("bounds\n");
    for v in model.vars() {
        match v.domain {
            Domain::NonNegative => {
                let _ = writeln!(out, " 0 <= {}", var_name(v.tag));
            }
            Domain::UnitInterval | Domain::Binary => {
                let _ = writeln!(out, " 0 <= {} <= 1", var_name(v.tag));
            }
        }
    }
    out.push_str("binaries\n");
    for v in model.vars() {
        if v.domain == Domain::Binary {
            let _ = writeln!(out, " {}", var_name(v.tag));
        }
    }
    out.push_str("end\n");
    out
}
