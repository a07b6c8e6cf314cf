//! Delaunay weights, the load functional, the chain LP and its solution.

mod assemble;
mod extract;
mod load;
pub mod lp;
mod weight;

pub use assemble::{assemble_problem, solve_lp, AssembleOptions, LpProblem, Normalization, ProblemSummary};
pub use extract::{extract_solution, ReconstructionResult, SnapEntry};
pub use load::{load, load_sign, LoadTarget};
pub use weight::{delaunay_weight, energy, weight_integral_oracle, weight_of_points, WeightEstimate, WeightTable};
