//! Sparse LU factorization with Markowitz pivoting and product-form updates.

/// One elimination step: pivot `(row, col)` with value `pivot`, the
/// multipliers applied to the other rows, and the remaining row of `U`.
#[derive(Clone, Debug)]
struct Step {
    row: usize,
    col: usize,
    pivot: f64,
    lower: Vec<(usize, f64)>,
    upper: Vec<(usize, f64)>,
}

/// Product-form eta: the basis column at `pos` was replaced by a column whose
/// representation in the previous basis is `alpha`.
#[derive(Clone, Debug)]
struct Eta {
    pos: usize,
    alpha_pos: f64,
    alpha: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub(crate) struct Factor {
    m: usize,
    steps: Vec<Step>,
    etas: Vec<Eta>,
}

/// Columns that could not be pivoted, and rows left without a pivot.
#[derive(Clone, Debug)]
pub(crate) struct Singular {
    pub cols: Vec<usize>,
    pub rows: Vec<usize>,
}

const DROP: f64 = 1e-14;

impl Factor {
    /// Factors the `m x m` matrix whose column `j` has entries `columns[j]`.
    /// `threshold` in `(0, 1]` is the relative pivot size required within a column.
    pub fn new(m: usize, columns: &[Vec<(usize, f64)>], threshold: f64) -> Result<Self, Singular> {
        let mut cols: Vec<Vec<(usize, f64)>> = columns.to_vec();
        for c in &mut cols {
            c.retain(|&(_, v)| v.abs() > DROP);
        }
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (j, c) in cols.iter().enumerate() {
            for &(i, _) in c {
                rows[i].push(j);
            }
        }
        let mut col_done = vec![false; m];
        let mut row_done = vec![false; m];
        let mut steps = Vec::with_capacity(m);
        let scale = cols.iter().flatten().fold(0.0_f64, |a, &(_, v)| a.max(v.abs())).max(1.0);
        let tiny = 1e-11 * scale;

        for _ in 0..m {
            let Some((r, c)) = choose_pivot(&cols, &rows, &col_done, &row_done, threshold, tiny) else {
                break;
            };
            let pivot = cols[c].iter().find(|e| e.0 == r).map(|e| e.1).unwrap();
            let lower: Vec<(usize, f64)> =
                cols[c].iter().filter(|e| e.0 != r).map(|&(i, v)| (i, v / pivot)).collect();
            let upper: Vec<(usize, f64)> = rows[r]
                .iter()
                .filter(|&&j| j != c)
                .map(|&j| (j, cols[j].iter().find(|e| e.0 == r).map(|e| e.1).unwrap()))
                .collect();
            // retire row r and column c
            for &(j, _) in &upper {
                cols[j].retain(|e| e.0 != r);
            }
            for &(i, _) in &lower {
                rows[i].retain(|&j| j != c);
            }
            cols[c].clear();
            rows[r].clear();
            col_done[c] = true;
            row_done[r] = true;
            // Schur complement update
            for &(j, u) in &upper {
                for &(i, l) in &lower {
                    let delta = -l * u;
                    match cols[j].iter_mut().find(|e| e.0 == i) {
                        Some(e) => e.1 += delta,
                        None => {
                            cols[j].push((i, delta));
                            rows[i].push(j);
                        }
                    }
                }
                let before = cols[j].len();
                let dropped: Vec<usize> =
                    cols[j].iter().filter(|e| e.1.abs() <= DROP).map(|e| e.0).collect();
                if !dropped.is_empty() {
                    cols[j].retain(|e| e.1.abs() > DROP);
                    for i in dropped {
                        rows[i].retain(|&jj| jj != j);
                    }
                }
                debug_assert!(cols[j].len() <= before);
            }
            steps.push(Step { row: r, col: c, pivot, lower, upper });
        }
        if steps.len() < m {
            return Err(Singular {
                cols: (0..m).filter(|&j| !col_done[j]).collect(),
                rows: (0..m).filter(|&i| !row_done[i]).collect(),
            });
        }
        Ok(Self { m, steps, etas: Vec::new() })
    }

    /// Ratio of the largest to the smallest pivot magnitude.
    pub fn condition_estimate(&self) -> f64 {
        let (lo, hi) = self
            .steps
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), s| (lo.min(s.pivot.abs()), hi.max(s.pivot.abs())));
        if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// Solves `B x = b`; `b` is indexed by rows, the result by basis positions.
    pub fn ftran(&self, b: &[f64]) -> Vec<f64> {
        let mut w = b.to_vec();
        for s in &self.steps {
            let br = w[s.row];
            if br != 0.0 {
                for &(i, l) in &s.lower {
                    w[i] -= l * br;
                }
            }
        }
        let mut x = vec![0.0; self.m];
        for s in self.steps.iter().rev() {
            let mut v = w[s.row];
            for &(j, u) in &s.upper {
                v -= u * x[j];
            }
            x[s.col] = v / s.pivot;
        }
        for e in &self.etas {
            let xr = x[e.pos] / e.alpha_pos;
            if xr != 0.0 {
                for &(i, a) in &e.alpha {
                    x[i] -= a * xr;
                }
            }
            x[e.pos] = xr;
        }
        x
    }

    /// Solves `B^T y = d`; `d` is indexed by basis positions, the result by rows.
    pub fn btran(&self, d: &[f64]) -> Vec<f64> {
        let mut d = d.to_vec();
        for e in self.etas.iter().rev() {
            let mut v = d[e.pos];
            for &(i, a) in &e.alpha {
                v -= a * d[i];
            }
            d[e.pos] = v / e.alpha_pos;
        }
        let mut acc = vec![0.0; self.m];
        let mut w = vec![0.0; self.m];
        for s in &self.steps {
            let v = (d[s.col] - acc[s.col]) / s.pivot;
            w[s.row] = v;
            if v != 0.0 {
                for &(j, u) in &s.upper {
                    acc[j] += v * u;
                }
            }
        }
        for s in self.steps.iter().rev() {
            let mut v = w[s.row];
            for &(i, l) in &s.lower {
                v -= l * w[i];
            }
            w[s.row] = v;
        }
        w
    }

    /// Records that basis position `pos` now holds a column with FTRAN image `alpha`.
    pub fn update(&mut self, pos: usize, alpha: &[f64]) {
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != pos && a.abs() > DROP)
            .map(|(i, &a)| (i, a))
            .collect();
        self.etas.push(Eta { pos, alpha_pos: alpha[pos], alpha: entries });
    }
}

fn choose_pivot(
    cols: &[Vec<(usize, f64)>],
    rows: &[Vec<usize>],
    col_done: &[bool],
    row_done: &[bool],
    threshold: f64,
    tiny: f64,
) -> Option<(usize, usize)> {
    // column singletons first: no fill, no multipliers
    let mut best: Option<(usize, usize, usize, f64)> = None;
    for (c, col) in cols.iter().enumerate() {
        if col_done[c] || col.len() != 1 {
            continue;
        }
        let (r, v) = col[0];
        if v.abs() > tiny && best.as_ref().is_none_or(|b| v.abs() > b.3) {
            best = Some((r, c, 0, v.abs()));
            if v.abs() >= 1.0 {
                break;
            }
        }
    }
    if let Some((r, c, _, _)) = best {
        return Some((r, c));
    }
    // row singletons
    for (r, row) in rows.iter().enumerate() {
        if row_done[r] || row.len() != 1 {
            continue;
        }
        let c = row[0];
        let v = cols[c].iter().find(|e| e.0 == r).unwrap().1;
        let colmax = cols[c].iter().fold(0.0_f64, |a, e| a.max(e.1.abs()));
        if v.abs() > tiny && v.abs() >= 0.01 * colmax {
            return Some((r, c));
        }
    }
    // Markowitz search over the sparsest columns
    let min_count = cols
        .iter()
        .enumerate()
        .filter(|(c, col)| !col_done[*c] && !col.is_empty())
        .map(|(_, col)| col.len())
        .min()?;
    let mut examined = 0;
    let mut choice: Option<(usize, usize, usize, f64)> = None;
    for count in min_count..=min_count + 2 {
        for (c, col) in cols.iter().enumerate() {
            if col_done[c] || col.len() != count {
                continue;
            }
            let colmax = col.iter().fold(0.0_f64, |a, e| a.max(e.1.abs()));
            if colmax <= tiny {
                continue;
            }
            for &(r, v) in col {
                if v.abs() < threshold * colmax || v.abs() <= tiny {
                    continue;
                }
                let cost = (rows[r].len() - 1) * (count - 1);
                let better = match choice {
                    None => true,
                    Some((_, _, bc, bv)) => cost < bc || (cost == bc && v.abs() > bv),
                };
                if better {
                    choice = Some((r, c, cost, v.abs()));
                }
            }
            examined += 1;
            if examined >= 8 && choice.is_some() {
                return choice.map(|(r, c, _, _)| (r, c));
            }
        }
        if choice.is_some() {
            break;
        }
    }
    if choice.is_none() {
        // fall back to the largest remaining entry anywhere
        for (c, col) in cols.iter().enumerate() {
            if col_done[c] {
                continue;
            }
            for &(r, v) in col {
                if v.abs() > tiny && choice.as_ref().is_none_or(|b| v.abs() > b.3) {
                    choice = Some((r, c, 0, v.abs()));
                }
            }
        }
    }
    choice.map(|(r, c, _, _)| (r, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_mul(cols: &[Vec<(usize, f64)>], x: &[f64], m: usize) -> Vec<f64> {
        let mut y = vec![0.0; m];
        for (j, c) in cols.iter().enumerate() {
            for &(i, v) in c {
                y[i] += v * x[j];
            }
        }
        y
    }

    fn dense_tr_mul(cols: &[Vec<(usize, f64)>], y: &[f64]) -> Vec<f64> {
        cols.iter().map(|c| c.iter().map(|&(i, v)| v * y[i]).sum()).collect()
    }

    fn random_sparse(m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<(usize, f64)>> {
        (0..m)
            .map(|j| {
                let mut c = vec![(j, 2.0 + rng.gen::<f64>())];
                for _ in 0..3 {
                    let i = rng.gen_range(0..m);
                    if i != j && !c.iter().any(|e| e.0 == i) {
                        c.push((i, rng.gen_range(-1.0..1.0)));
                    }
                }
                c
            })
            .collect()
    }

    #[test]
    fn solves_and_transposed_solves() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in [1, 2, 5, 30, 80] {
            let cols = random_sparse(m, &mut rng);
            let f = Factor::new(m, &cols, 0.1).unwrap();
            let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = f.ftran(&b);
            let bx = dense_mul(&cols, &x, m);
            for i in 0..m {
                assert!((bx[i] - b[i]).abs() < 1e-10, "ftran residual");
            }
            let y = f.btran(&b);
            let bty = dense_tr_mul(&cols, &y);
            for i in 0..m {
                assert!((bty[i] - b[i]).abs() < 1e-10, "btran residual");
            }
        }
    }

    #[test]
    fn eta_updates_match_refactorization() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = 25;
        let mut cols = random_sparse(m, &mut rng);
        let mut f = Factor::new(m, &cols, 0.1).unwrap();
        for step in 0..6 {
            let pos = (step * 7) % m;
            let newcol = vec![(pos, 3.0), ((pos + 1) % m, 0.5)];
            let mut dense = vec![0.0; m];
            for &(i, v) in &newcol {
                dense[i] = v;
            }
            let alpha = f.ftran(&dense);
            f.update(pos, &alpha);
            cols[pos] = newcol;
        }
        let b: Vec<f64> = (0..m).map(|i| (i as f64).sin()).collect();
        let x = f.ftran(&b);
        let bx = dense_mul(&cols, &x, m);
        let y = f.btran(&b);
        let bty = dense_tr_mul(&cols, &y);
        for i in 0..m {
            assert!((bx[i] - b[i]).abs() < 1e-9);
            assert!((bty[i] - b[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn singular_columns_are_reported() {
        let cols = vec![vec![(0, 1.0), (1, 1.0)], vec![(0, 2.0), (1, 2.0)], vec![(2, 1.0)]];
        let err = Factor::new(3, &cols, 0.1).unwrap_err();
        assert_eq!(err.cols.len(), 1);
        assert_eq!(err.rows.len(), 1);
    }
}
