use super::lu::Factor;
use super::{LpLimits, LpSolution, LpStatus, StandardLp};
use crate::{ReconError, Result};

const PIVOT_TOL: f64 = 1e-9;
const NONBASIC: usize = usize::MAX;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Phase {
    One,
    Two,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

struct Solver<'a> {
    m: usize,
    n: usize,
    cols: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    basis: Vec<usize>,
    pos_of: Vec<usize>,
    factor: Factor,
    x_b: Vec<f64>,
    limits: &'a LpLimits,
    iterations: usize,
    since_refactor: usize,
    degenerate_run: usize,
    bland: bool,
    bland_engaged: bool,
}

/// Two-phase revised simplex with Dantzig pricing, a sparse LU basis
/// factorization refreshed every `refactor_every` pivots, and Bland's rule
/// after a long run of degenerate pivots.
pub fn solve_standard(lp: &StandardLp, limits: &LpLimits) -> Result<LpSolution> {
    let m = lp.n_rows();
    let n = lp.n_vars();
    if lp.cost.len() != n || lp.b.len() != m {
        return Err(ReconError::InvalidInput(format!(
            "LP shapes disagree: {} costs, {} rhs, matrix {}x{}",
            lp.cost.len(),
            lp.b.len(),
            m,
            n
        )));
    }
    if lp.cost.iter().chain(&lp.b).any(|v| !v.is_finite()) {
        return Err(ReconError::InvalidInput("non-finite LP data".into()));
    }
    let row_sign: Vec<f64> = lp.b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let b: Vec<f64> = lp.b.iter().map(|v| v.abs()).collect();
    let cols: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|j| {
            let (rows, vals) = lp.a.col(j);
            rows.iter().zip(vals).map(|(&i, &v)| (i, v * row_sign[i])).collect()
        })
        .collect();
    let cost_scale = lp.cost.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
    let cost_scale = if cost_scale > 0.0 { cost_scale } else { 1.0 };

    // crash: unit-like columns with positive entries take their row
    let mut basis = vec![NONBASIC; m];
    for (j, c) in cols.iter().enumerate() {
        if let [(i, v)] = c.as_slice() {
            if *v > 0.0 && basis[*i] == NONBASIC {
                basis[*i] = j;
            }
        }
    }
    for (i, slot) in basis.iter_mut().enumerate() {
        if *slot == NONBASIC {
            *slot = n + i;
        }
    }
    let mut pos_of = vec![NONBASIC; n + m];
    for (p, &v) in basis.iter().enumerate() {
        pos_of[v] = p;
    }
    let placeholder = Factor::new(0, &[], 0.1).expect("empty factorization");
    let mut s = Solver {
        m,
        n,
        cols,
        b,
        basis,
        pos_of,
        factor: placeholder,
        x_b: Vec::new(),
        limits,
        iterations: 0,
        since_refactor: 0,
        degenerate_run: 0,
        bland: false,
        bland_engaged: false,
    };
    s.refactor()?;

    let b_norm = s.b.iter().fold(0.0_f64, |a, v| a.max(*v));
    let mut phase_one_iterations = 0;
    if s.basis.iter().any(|&v| v >= n) {
        let mut c1 = vec![0.0; n + m];
        for v in c1.iter_mut().skip(n) {
            *v = 1.0;
        }
        let outcome = s.run(&c1, Phase::One)?;
        phase_one_iterations = s.iterations;
        if let Outcome::IterationLimit = outcome {
            return Ok(s.finish(lp, &row_sign, cost_scale, LpStatus::IterationLimit, phase_one_iterations));
        }
        let infeas: f64 = s.basis.iter().zip(&s.x_b).filter(|(&v, _)| v >= n).map(|(_, x)| x.max(0.0)).sum();
        if infeas > 1e-8 * (1.0 + b_norm) {
            return Ok(s.finish(lp, &row_sign, cost_scale, LpStatus::Infeasible, phase_one_iterations));
        }
        s.drive_out_artificials()?;
    }
    s.bland = false;
    s.degenerate_run = 0;
    let mut c2 = vec![0.0; n + m];
    for (j, c) in lp.cost.iter().enumerate() {
        c2[j] = c / cost_scale;
    }
    let status = match s.run(&c2, Phase::Two)? {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => LpStatus::Unbounded,
        Outcome::IterationLimit => LpStatus::IterationLimit,
    };
    Ok(s.finish(lp, &row_sign, cost_scale, status, phase_one_iterations))
}

impl Solver<'_> {
    fn column(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            self.cols[j].clone()
        } else {
            vec![(j - self.n, 1.0)]
        }
    }

    fn dense_column(&self, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.m];
        if j < self.n {
            for &(i, a) in &self.cols[j] {
                v[i] = a;
            }
        } else {
            v[j - self.n] = 1.0;
        }
        v
    }

    fn refactor(&mut self) -> Result<()> {
        let mut retried = false;
        loop {
            let threshold = if retried { 1.0 } else { 0.1 };
            let columns: Vec<Vec<(usize, f64)>> = self.basis.iter().map(|&v| self.column(v)).collect();
            match Factor::new(self.m, &columns, threshold) {
                Ok(f) => {
                    if f.condition_estimate() > self.limits.max_condition {
                        if retried {
                            return Err(ReconError::NumericalFailure(format!(
                                "basis condition estimate {:.3e} exceeds {:.1e}",
                                f.condition_estimate(),
                                self.limits.max_condition
                            )));
                        }
                        retried = true;
                        continue;
                    }
                    self.factor = f;
                    break;
                }
                Err(singular) => {
                    // swap the dependent basic columns for artificials of the uncovered rows
                    for (&pos, &row) in singular.cols.iter().zip(&singular.rows) {
                        let old = self.basis[pos];
                        self.pos_of[old] = NONBASIC;
                        let art = self.n + row;
                        if self.pos_of[art] != NONBASIC {
                            return Err(ReconError::NumericalFailure("basis repair failed".into()));
                        }
                        self.basis[pos] = art;
                        self.pos_of[art] = pos;
                    }
                }
            }
        }
        self.x_b = self.factor.ftran(&self.b);
        self.since_refactor = 0;
        Ok(())
    }

    fn run(&mut self, cost: &[f64], phase: Phase) -> Result<Outcome> {
        let opt_tol = self.limits.optimality_tol;
        let feas_tol = self.limits.feasibility_tol;
        loop {
            if self.iterations >= self.limits.max_iterations {
                return Ok(Outcome::IterationLimit);
            }
            let c_b: Vec<f64> = self.basis.iter().map(|&v| cost[v]).collect();
            let y = self.factor.btran(&c_b);
            // pricing over nonbasic structurals
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.n {
                if self.pos_of[j] != NONBASIC {
                    continue;
                }
                let d = cost[j] - self.cols[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>();
                if d < -opt_tol {
                    if self.bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| d < best) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((q, _)) = entering else {
                return Ok(Outcome::Optimal);
            };
            let alpha = self.factor.ftran(&self.dense_column(q));
            let Some(r) = self.ratio_test(&alpha, phase, feas_tol) else {
                if phase == Phase::One {
                    return Err(ReconError::NumericalFailure("unbounded phase-one direction".into()));
                }
                return Ok(Outcome::Unbounded);
            };
            let theta = if self.basis[r] >= self.n && phase == Phase::Two {
                0.0
            } else {
                (self.x_b[r] / alpha[r]).max(0.0)
            };
            self.pivot(q, r, &alpha, theta)?;
            if theta <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run >= self.limits.bland_after && !self.bland {
                    self.bland = true;
                    self.bland_engaged = true;
                }
            } else {
                self.degenerate_run = 0;
            }
        }
    }

    /// Harris-style two-pass ratio test; in phase two, basic artificials are
    /// held at zero and leave on any nonzero pivot entry.
    fn ratio_test(&self, alpha: &[f64], phase: Phase, feas_tol: f64) -> Option<usize> {
        let mut locked: Option<usize> = None;
        let mut theta_max = f64::INFINITY;
        for i in 0..self.m {
            let a = alpha[i];
            if phase == Phase::Two && self.basis[i] >= self.n {
                if a.abs() > PIVOT_TOL && locked.is_none_or(|l| a.abs() > alpha[l].abs()) {
                    locked = Some(i);
                }
                continue;
            }
            if a > PIVOT_TOL {
                theta_max = theta_max.min((self.x_b[i].max(0.0) + feas_tol) / a);
            }
        }
        if locked.is_some() {
            return locked;
        }
        if theta_max.is_infinite() {
            return None;
        }
        if self.bland {
            let min_ratio = (0..self.m)
                .filter(|&i| alpha[i] > PIVOT_TOL)
                .map(|i| self.x_b[i].max(0.0) / alpha[i])
                .fold(f64::INFINITY, f64::min);
            return (0..self.m)
                .filter(|&i| alpha[i] > PIVOT_TOL && self.x_b[i].max(0.0) / alpha[i] <= min_ratio + 1e-12 * (1.0 + min_ratio))
                .min_by_key(|&i| self.basis[i]);
        }
        (0..self.m)
            .filter(|&i| alpha[i] > PIVOT_TOL && self.x_b[i].max(0.0) / alpha[i] <= theta_max)
            .max_by(|&i, &k| alpha[i].total_cmp(&alpha[k]).then(k.cmp(&i)))
    }

    fn pivot(&mut self, q: usize, r: usize, alpha: &[f64], theta: f64) -> Result<()> {
        for i in 0..self.m {
            self.x_b[i] -= theta * alpha[i];
        }
        self.x_b[r] = theta;
        let leaving = self.basis[r];
        self.pos_of[leaving] = NONBASIC;
        self.basis[r] = q;
        self.pos_of[q] = r;
        self.factor.update(r, alpha);
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= self.limits.refactor_every {
            self.refactor()?;
        }
        Ok(())
    }

    /// Pivots zero-valued artificials out of the basis where some structural
    /// column has a usable entry in their row; the rest belong to redundant rows.
    fn drive_out_artificials(&mut self) -> Result<()> {
        for r in 0..self.m {
            if self.basis[r] < self.n {
                continue;
            }
            let mut e = vec![0.0; self.m];
            e[r] = 1.0;
            let rho = self.factor.btran(&e);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.n {
                if self.pos_of[j] != NONBASIC {
                    continue;
                }
                let a: f64 = self.cols[j].iter().map(|&(i, v)| rho[i] * v).sum();
                if a.abs() > 1e-7 && best.is_none_or(|(_, b)| a.abs() > b.abs()) {
                    best = Some((j, a));
                }
            }
            if let Some((q, _)) = best {
                let alpha = self.factor.ftran(&self.dense_column(q));
                self.pivot(q, r, &alpha, 0.0)?;
            }
        }
        self.refactor()
    }

    fn finish(
        &mut self,
        lp: &StandardLp,
        row_sign: &[f64],
        cost_scale: f64,
        status: LpStatus,
        phase_one_iterations: usize,
    ) -> LpSolution {
        if self.since_refactor > 0 && self.refactor().is_err() {
            self.x_b = self.factor.ftran(&self.b);
        }
        let mut x = vec![0.0; self.n];
        for (p, &v) in self.basis.iter().enumerate() {
            if v < self.n {
                x[v] = if self.x_b[p].abs() < 1e-13 { 0.0 } else { self.x_b[p] };
            }
        }
        let c_b: Vec<f64> = self.basis.iter().map(|&v| if v < self.n { lp.cost[v] / cost_scale } else { 0.0 }).collect();
        let y_scaled = self.factor.btran(&c_b);
        let duals: Vec<f64> = y_scaled.iter().zip(row_sign).map(|(y, s)| y * s * cost_scale).collect();
        let aty = lp.a.tr_mul_vec(&duals);
        let reduced_costs: Vec<f64> = lp.cost.iter().zip(&aty).map(|(c, a)| c - a).collect();
        let objective = lp.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
        let mut basis: Vec<usize> = self.basis.iter().copied().filter(|&v| v < self.n).collect();
        basis.sort_unstable();
        LpSolution {
            status,
            x,
            objective,
            duals,
            reduced_costs,
            basis,
            iterations: self.iterations,
            phase_one_iterations,
            bland_engaged: self.bland_engaged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::CscMatrix;

    fn lp(cost: Vec<f64>, rows: usize, triplets: &[(usize, usize, f64)], b: Vec<f64>) -> StandardLp {
        let n = cost.len();
        StandardLp { cost, a: CscMatrix::from_triplets(rows, n, triplets), b }
    }

    #[test]
    fn single_variable() {
        let p = lp(vec![1.0], 1, &[(0, 0, 1.0)], vec![1.0]);
        let s = solve_standard(&p, &LpLimits::default()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_textbook_problem() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let p = lp(
            vec![-1.0, -1.0, 0.0, 0.0],
            2,
            &[(0, 0, 1.0), (0, 1, 2.0), (0, 2, 1.0), (1, 0, 3.0), (1, 1, 1.0), (1, 3, 1.0)],
            vec![4.0, 6.0],
        );
        let s = solve_standard(&p, &LpLimits::default()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 2.8).abs() < 1e-12);
        assert!(s.reduced_costs.iter().all(|&d| d > -1e-12));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(vec![1.0, 1.0], 2, &[(0, 0, 1.0), (1, 0, 1.0)], vec![1.0, 2.0]);
        assert_eq!(solve_standard(&p, &LpLimits::default()).unwrap().status, LpStatus::Infeasible);
        let p = lp(vec![-1.0, 0.0], 1, &[(0, 0, 1.0), (0, 1, -1.0)], vec![1.0]);
        assert_eq!(solve_standard(&p, &LpLimits::default()).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_and_negative_rows() {
        // x + y = 2 twice, -x = -0.5
        let p = lp(
            vec![1.0, 2.0],
            3,
            &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0), (2, 0, -1.0)],
            vec![2.0, 2.0, -0.5],
        );
        let s = solve_standard(&p, &LpLimits::default()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 0.5).abs() < 1e-12 && (s.x[1] - 1.5).abs() < 1e-12);
        assert!(p.primal_residual(&s.x) < 1e-12);
        assert!(s.reduced_costs.iter().all(|&d| d > -1e-12));
    }
}
