//! Plain-text LP exchange format.
//!
//! ```text
//! <n_vars> <n_rows> <nnz>
//! c_0 c_1 ... c_{n-1}
//! <row> <col> <value>        (nnz lines)
//! b_0 b_1 ... b_{m-1}
//! ```

use std::fmt::Write as _;

use super::StandardLp;
use crate::fmt::g17;
use crate::sparse::CscMatrix;
use crate::{ReconError, Result};

pub fn write_lp_text(lp: &StandardLp) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", lp.n_vars(), lp.n_rows(), lp.a.nnz());
    out.push_str(&join(&lp.cost));
    out.push('\n');
    for (i, j, v) in lp.a.triplets() {
        let _ = writeln!(out, "{i} {j} {}", g17(v));
    }
    out.push_str(&join(&lp.b));
    out.push('\n');
    out
}

fn join(values: &[f64]) -> String {
    values.iter().map(|&v| g17(v)).collect::<Vec<_>>().join(" ")
}

pub fn read_lp_text(text: &str) -> Result<StandardLp> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| ReconError::Parse { line: 0, message: format!("missing {what}") })
    };
    let (hl, header) = next("header")?;
    let dims = parse_numbers::<usize>(header, hl + 1)?;
    let [n, m, nnz] = dims[..] else {
        return Err(ReconError::Parse { line: hl + 1, message: "header needs n_vars n_rows nnz".into() });
    };
    let (cl, cost_line) = next("cost line")?;
    let cost = parse_numbers::<f64>(cost_line, cl + 1)?;
    if cost.len() != n {
        return Err(ReconError::Parse { line: cl + 1, message: format!("expected {n} costs") });
    }
    let mut triplets = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let (tl, t) = next("triplet")?;
        let parts: Vec<&str> = t.split_whitespace().collect();
        let bad = || ReconError::Parse { line: tl + 1, message: format!("bad triplet {t:?}") };
        if parts.len() != 3 {
            return Err(bad());
        }
        let i: usize = parts[0].parse().map_err(|_| bad())?;
        let j: usize = parts[1].parse().map_err(|_| bad())?;
        let v: f64 = parts[2].parse().map_err(|_| bad())?;
        if i >= m || j >= n {
            return Err(bad());
        }
        triplets.push((i, j, v));
    }
    let (bl, rhs_line) = next("rhs line")?;
    let b = parse_numbers::<f64>(rhs_line, bl + 1)?;
    if b.len() != m {
        return Err(ReconError::Parse { line: bl + 1, message: format!("expected {m} rhs values") });
    }
    Ok(StandardLp { cost, a: CscMatrix::from_triplets(m, n, &triplets), b })
}

fn parse_numbers<T: std::str::FromStr>(line: &str, lineno: usize) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|w| w.parse::<T>().map_err(|_| ReconError::Parse { line: lineno, message: format!("cannot parse {w:?}") }))
        .collect()
}
