//! Uncapacitated facility location instances and their reduction to
//! single-period lot-sizing: facilities become suppliers, clients become
//! items with unit demand, opening costs become transaction costs. Optimal
//! values of the two problems coincide.

use thiserror::Error;

use crate::instance::{Instance, InstanceError, PlanSolution};

/// Uncapacitated facility location instance.
#[derive(Debug, Clone, PartialEq)]
pub struct UflInstance {
    nf: usize,
    nc: usize,
    /// Cost `q_f` of opening facility `f`.
    open_cost: Vec<f64>,
    /// Cost `v_cf` of serving client `c` from facility `f`, row-major by
    /// client: `serve_cost[c * nf + f]`.
    serve_cost: Vec<f64>,
}

impl UflInstance {
    pub fn new(
        nf: usize,
        nc: usize,
        open_cost: Vec<f64>,
        serve_cost: Vec<f64>,
    ) -> Result<Self, InstanceError> {
        if nf == 0 || nc == 0 {
            return Err(InstanceError::EmptyDimension {
                nj: nf,
                ni: nc,
                nt: 1,
            });
        }
        if open_cost.len() != nf {
            return Err(InstanceError::DimensionMismatch {
                what: "open costs",
                got: open_cost.len(),
                expected: nf,
            });
        }
        if serve_cost.len() != nc * nf {
            return Err(InstanceError::DimensionMismatch {
                what: "service costs",
                got: serve_cost.len(),
                expected: nc * nf,
            });
        }
        for (what, vals) in [("open costs", &open_cost), ("service costs", &serve_cost)] {
            if let Some(index) = vals.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(InstanceError::NegativeValue { what, index });
            }
        }
        Ok(Self {
            nf,
            nc,
            open_cost,
            serve_cost,
        })
    }

    pub fn num_facilities(&self) -> usize {
        self.nf
    }

    pub fn num_clients(&self) -> usize {
        self.nc
    }

    pub fn open_cost(&self, f: usize) -> f64 {
        self.open_cost[f]
    }

    pub fn open_costs(&self) -> &[f64] {
        &self.open_cost
    }

    pub fn serve_cost(&self, c: usize, f: usize) -> f64 {
        self.serve_cost[c * self.nf + f]
    }
}

/// A facility location solution: the set of open facilities and the
/// facility assigned to each client.
#[derive(Debug, Clone, PartialEq)]
pub struct UflSolution {
    pub open: Vec<usize>,
    pub assignment: Vec<usize>,
    pub cost: f64,
}

/// Builds the single-period lot-sizing instance corresponding to a
/// facility location instance: `NT = 1`, one supplier per facility with
/// `O_f = q_f`, one item per client with `P_cf = v_cf` and unit demand.
/// Holding costs never apply with one period and are set to zero.
pub fn ufl_to_miilspss(u: &UflInstance) -> Instance {
    Instance::new(
        u.nf,
        u.nc,
        1,
        u.open_cost.clone(),
        vec![0.0; u.nc],
        u.serve_cost.clone(),
        vec![1.0; u.nc],
    )
    .expect("reduction of a valid instance is valid")
}

#[derive(Debug, Error, PartialEq)]
pub enum ExtractError {
    #[error("purchase of item {client} from supplier {facility} is fractional ({amount})")]
    FractionalPurchase {
        client: usize,
        facility: usize,
        amount: f64,
    },
    #[error("client {client} is not assigned to any open facility")]
    Unassigned { client: usize },
}

/// Reads a facility location solution back out of a plan for the reduced
/// instance. Purchases must be integral (0 or 1 per client/facility pair).
pub fn extract_ufl_solution(
    u: &UflInstance,
    sol: &PlanSolution,
) -> Result<UflSolution, ExtractError> {
    let inst = ufl_to_miilspss(u);
    let open: Vec<usize> = (0..u.nf).filter(|&f| sol.setup(&inst, f, 0)).collect();
    let mut assignment = Vec::with_capacity(u.nc);
    for c in 0..u.nc {
        let mut assigned = None;
        for f in 0..u.nf {
            let x = sol.purchase(&inst, c, f, 0);
            if (x - x.round()).abs() > 1e-9 {
                return Err(ExtractError::FractionalPurchase {
                    client: c,
                    facility: f,
                    amount: x,
                });
            }
            if x.round() >= 1.0 && assigned.is_none() {
                assigned = Some(f);
            }
        }
        assignment.push(assigned.ok_or(ExtractError::Unassigned { client: c })?);
    }
    let cost = open.iter().map(|&f| u.open_cost(f)).sum::<f64>()
        + assignment
            .iter()
            .enumerate()
            .map(|(c, &f)| u.serve_cost(c, f))
            .sum::<f64>();
    Ok(UflSolution {
        open,
        assignment,
        cost,
    })
}

/// Exact facility location optimum by enumerating all nonempty facility
/// subsets. Test oracle; guarded to small instances.
pub fn brute_force_ufl(u: &UflInstance) -> UflSolution {
    assert!(
        u.nf * u.nc <= 64 && u.nf <= 20,
        "brute force guard exceeded ({}x{})",
        u.nf,
        u.nc
    );
    let mut best: Option<UflSolution> = None;
    for mask in 1u64..(1u64 << u.nf) {
        let open: Vec<usize> = (0..u.nf).filter(|f| mask >> f & 1 == 1).collect();
        let mut cost: f64 = open.iter().map(|&f| u.open_cost(f)).sum();
        let mut assignment = Vec::with_capacity(u.nc);
        for c in 0..u.nc {
            let (f, serve) = open
                .iter()
                .map(|&f| (f, u.serve_cost(c, f)))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            cost += serve;
            assignment.push(f);
        }
        if best.as_ref().is_none_or(|b| cost < b.cost) {
            best = Some(UflSolution {
                open,
                assignment,
                cost,
            });
        }
    }
    best.unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> UflInstance {
        UflInstance::new(1, 1, vec![7.0], vec![3.0]).unwrap()
    }

    fn two_facilities() -> UflInstance {
        UflInstance::new(2, 1, vec![10.0, 1.0], vec![1.0, 100.0]).unwrap()
    }

    #[test]
    fn reduction_has_unit_demands_and_one_period() {
        let inst = ufl_to_miilspss(&tiny());
        assert_eq!(inst.num_periods(), 1);
        assert_eq!(inst.demand(0, 0), 1.0);
        assert_eq!(inst.transaction_cost(0), 7.0);
        assert_eq!(inst.price(0, 0), 3.0);
        assert_eq!(inst.holding_cost(0), 0.0);
    }

    #[test]
    fn single_facility_optimum_is_ten() {
        let u = tiny();
        assert_eq!(brute_force_ufl(&u).cost, 10.0);
        let inst = ufl_to_miilspss(&u);
        let plan = PlanSolution::new(&inst, vec![1.0], vec![true]);
        assert_eq!(plan.cost, 10.0);
    }

    #[test]
    fn two_facility_optimum_picks_cheaper_total() {
        let sol = brute_force_ufl(&two_facilities());
        assert_eq!(sol.cost, 11.0);
        assert_eq!(sol.open, vec![0]);
        assert_eq!(sol.assignment, vec![0]);
    }

    #[test]
    fn extraction_round_trips_costs() {
        let u = two_facilities();
        let inst = ufl_to_miilspss(&u);
        let plan = PlanSolution::new(&inst, vec![1.0, 0.0], vec![true, false]);
        let sol = extract_ufl_solution(&u, &plan).unwrap();
        assert_eq!(sol.open, vec![0]);
        assert_eq!(sol.assignment, vec![0]);
        assert_eq!(sol.cost, 11.0);
        assert_eq!(sol.cost, plan.cost);
    }

    #[test]
    fn extraction_rejects_fractional_purchases() {
        let u = tiny();
        let inst = ufl_to_miilspss(&u);
        let plan = PlanSolution::new(&inst, vec![0.5], vec![true]);
        assert!(matches!(
            extract_ufl_solution(&u, &plan),
            Err(ExtractError::FractionalPurchase { .. })
        ));
    }
}
