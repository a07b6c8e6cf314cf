//! Standard-form linear programs `min c^T x, A x = b, x >= 0` and a two-phase
//! revised simplex solver.

mod lu;
mod simplex;
mod text;

use serde::Serialize;

use crate::sparse::CscMatrix;

pub use simplex::solve_standard;
pub use text::{read_lp_text, write_lp_text};

#[derive(Clone, Debug, PartialEq)]
pub struct StandardLp {
    pub cost: Vec<f64>,
    pub a: CscMatrix,
    pub b: Vec<f64>,
}

impl StandardLp {
    pub fn n_vars(&self) -> usize {
        self.a.ncols()
    }

    pub fn n_rows(&self) -> usize {
        self.a.nrows()
    }

    /// `max_i |(A x - b)_i|`.
    pub fn primal_residual(&self, x: &[f64]) -> f64 {
        let ax = self.a.mul_vec(x);
        ax.iter().zip(&self.b).fold(0.0, |m, (u, v)| m.max((u - v).abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct LpLimits {
    pub max_iterations: usize,
    /// Pivots between fresh factorizations of the basis.
    pub refactor_every: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub max_condition: f64,
}

impl Default for LpLimits {
    fn default() -> Self {
        Self {
            max_iterations: 200_000,
            refactor_every: 50,
            bland_after: 1000,
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            max_condition: 1e12,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row duals `y` with `c - A^T y >= 0` at an optimum.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    /// Basic structural variables (artificials left in the basis are omitted).
    pub basis: Vec<usize>,
    pub iterations: usize,
    pub phase_one_iterations: usize,
    pub bland_engaged: bool,
}
