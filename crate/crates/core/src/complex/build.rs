use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{add_closure, has_empty_circumsphere, Simplex, SimplicialComplex};
use crate::geom::{miniball, KdTree, PointCloud};
use crate::{tol, Result};

/// Cliques of the graph joining points at distance at most `edge_len`, with
/// at most `max_dim + 1` vertices. `keep` is consulted for every clique of two
/// or more vertices and must be closed under taking subsets; rejected cliques
/// are not extended.
pub fn neighbor_cliques<F>(cloud: &PointCloud, edge_len: f64, max_dim: usize, keep: F) -> Vec<Vec<usize>>
where
    F: Fn(&[usize]) -> bool + Sync,
{
    let n = cloud.len();
    let tree = KdTree::new(cloud);
    let adjacency: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| tree.within(cloud.point(i), edge_len).into_iter().filter(|&j| j > i).collect())
        .collect();
    (0..n)
        .into_par_iter()
        .map(|v| {
            let mut out = vec![vec![v]];
            if max_dim > 0 {
                let mut clique = vec![v];
                expand(&mut clique, &adjacency[v], &adjacency, max_dim, &keep, &mut out);
            }
            out
        })
        .flatten()
        .collect()
}

fn expand<F: Fn(&[usize]) -> bool>(
    clique: &mut Vec<usize>,
    candidates: &[usize],
    adjacency: &[Vec<usize>],
    max_dim: usize,
    keep: &F,
    out: &mut Vec<Vec<usize>>,
) {
    for (idx, &v) in candidates.iter().enumerate() {
        clique.push(v);
        if keep(clique) {
            out.push(clique.clone());
            if clique.len() <= max_dim {
                let next = intersect_sorted(&candidates[idx + 1..], &adjacency[v]);
                if !next.is_empty() {
                    expand(clique, &next, adjacency, max_dim, keep, out);
                }
            }
        }
        clique.pop();
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn into_complex(n: usize, cliques: Vec<Vec<usize>>) -> SimplicialComplex {
    let mut sets: Vec<BTreeSet<Simplex>> = Vec::new();
    let mut sorted = cliques;
    sorted.sort_by_key(|c| std::cmp::Reverse(c.len()));
    for c in sorted {
        add_closure(&mut sets, Simplex::from_sorted(c));
    }
    SimplicialComplex::from_closed_sets(n, sets)
}

/// Vietoris-Rips complex: simplices of diameter at most `2r`, up to `max_dim`.
pub fn rips_complex(cloud: &PointCloud, r: f64, max_dim: usize) -> SimplicialComplex {
    into_complex(cloud.len(), neighbor_cliques(cloud, 2.0 * r, max_dim, |_| true))
}

/// Čech complex: simplices whose smallest enclosing ball has radius at most `r`.
pub fn cech_complex(cloud: &PointCloud, r: f64, max_dim: usize) -> SimplicialComplex {
    let limit = r + tol::BALL_SLACK;
    let cliques = neighbor_cliques(cloud, 2.0 * limit, max_dim, |c| {
        let pts = cloud.gather(c);
        miniball(&pts).map(|b| b.radius <= limit).unwrap_or(false)
    });
    into_complex(cloud.len(), cliques)
}

/// Čech complex at scale `r` whose `d`-simplices are kept only if some sphere
/// circumscribing them has no sample point strictly inside. Competitors are
/// the points within `3r` of the simplex's enclosing-ball center.
pub fn delaunay_cech_complex(cloud: &PointCloud, r: f64, d: usize) -> Result<SimplicialComplex> {
    let cech = cech_complex(cloud, r, d);
    let tree = KdTree::new(cloud);
    let top = cech.simplices(d);
    let verdicts: Vec<Result<bool>> = top
        .par_iter()
        .map(|s| {
            let pts = cloud.gather(s.vertices());
            if crate::geom::is_degenerate(&pts) {
                return Ok(false);
            }
            let ball = miniball(&pts)?;
            let competitors = tree.within(&ball.center, 3.0 * r);
            has_empty_circumsphere(cloud, s, &competitors)
        })
        .collect();
    let mut sets: Vec<BTreeSet<Simplex>> =
        (0..d).map(|k| cech.simplices(k).iter().cloned().collect()).collect();
    for (s, keep) in top.iter().zip(verdicts) {
        if keep? {
            add_closure(&mut sets, s.clone());
        }
    }
    Ok(SimplicialComplex::from_closed_sets(cloud.len(), sets))
}
