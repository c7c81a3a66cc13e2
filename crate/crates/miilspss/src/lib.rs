//! Solver suite for the multi-item inventory lot-sizing problem with
//! supplier selection: exact branch-and-bound and branch-and-cut over a
//! built-in simplex core, a facility-location reformulation with
//! optimality-preserving preprocessing, (l,S_j) cutting planes, a windowed
//! MIP heuristic, benchmark instance generation, and brute-force oracles.

pub mod bench;
pub mod cuts;
pub mod instance;
pub mod io;
pub mod lp;
pub mod model;
pub mod solver;
pub mod ufl;

pub use instance::{generate_instance, Family, Instance, PlanSolution};
pub use model::{build_fl, build_mh, build_std, preprocess_fl, ModelIr};
pub use solver::{solve_bc, solve_bnb, solve_mh, SolveConfig, SolveReport};
