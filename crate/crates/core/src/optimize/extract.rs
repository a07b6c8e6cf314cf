use serde::Serialize;

use super::assemble::LpProblem;
use super::lp::{LpSolution, LpStatus};
use super::weight::{energy, WeightTable};
use crate::complex::{Chain, Simplex};
use crate::tol;

#[derive(Clone, Debug, Serialize)]
pub struct SnapEntry {
    pub simplex: Simplex,
    pub raw: f64,
    pub snapped: f64,
}

/// Optimal chain of the LP, its integral rounding and independent residual checks.
#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionResult {
    pub status: LpStatus,
    pub objective: f64,
    #[serde(skip)]
    pub chain: Chain,
    #[serde(skip)]
    pub rounded_chain: Chain,
    /// Entries moved by snapping to `{-1, 0, 1}`.
    pub snaps: Vec<SnapEntry>,
    /// Entries farther than the snap tolerance from every integer in `{-1, 0, 1}`.
    pub non_integral: Vec<(Simplex, f64)>,
    pub integral: bool,
    pub energy: f64,
    pub matches_delloc: Option<bool>,
    pub boundary_residual: f64,
    pub load_residual: f64,
    pub primal_residual: f64,
    pub iterations: usize,
}

impl ReconstructionResult {
    /// Support of the rounded chain, in sorted order.
    pub fn support(&self) -> Vec<Simplex> {
        self.rounded_chain.support()
    }
}

/// Recovers `gamma = x+ - x-`, snaps it and recomputes the constraint
/// residuals outside the solver. `delloc` is the encoded reference chain.
pub fn extract_solution(
    solution: &LpSolution,
    problem: &LpProblem,
    weights: &WeightTable,
    delloc: Option<&Chain>,
) -> ReconstructionResult {
    let optimal = solution.status == LpStatus::Optimal;
    let chain = if optimal { problem.chain_from_x(&solution.x) } else { Chain::zero(problem.d) };
    let mut snaps = Vec::new();
    let mut non_integral = Vec::new();
    let mut rounded = Chain::zero(problem.d);
    for (s, raw) in chain.sorted_entries() {
        let k = raw.round().clamp(-1.0, 1.0);
        if (raw - k).abs() <= tol::SNAP {
            if k != raw {
                snaps.push(SnapEntry { simplex: s.clone(), raw, snapped: k });
            }
            rounded.add(s, k);
        } else {
            non_integral.push((s.clone(), raw));
            rounded.add(s, raw);
        }
    }
    let integral = optimal && non_integral.is_empty();
    let matches_delloc = delloc.map(|reference| integral && same_up_to_sign(&rounded, reference));
    let (boundary_residual, load_residual, primal_residual) = if optimal {
        (
            chain.boundary().max_abs(),
            (problem.load_of(&chain) - 1.0).abs(),
            problem.lp.primal_residual(&solution.x),
        )
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    ReconstructionResult {
        status: solution.status,
        objective: solution.objective,
        energy: energy(&chain, weights).unwrap_or(f64::NAN),
        chain,
        rounded_chain: rounded,
        snaps,
        non_integral,
        integral,
        matches_delloc,
        boundary_residual,
        load_residual,
        primal_residual,
        iterations: solution.iterations,
    }
}

/// Equal supports and `a = s b` for one global sign `s`.
fn same_up_to_sign(a: &Chain, b: &Chain) -> bool {
    if a.support() != b.support() || a.is_empty() {
        return false;
    }
    let first = a.support()[0].clone();
    let s = a.get(&first) * b.get(&first);
    a.iter().all(|(sigma, c)| c == s * b.get(sigma))
}
