use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{check_same_dim, dist, dist2, dot, sub, Flat};
use crate::{tol, ReconError, Result};

/// Affine weights of a point with respect to the vertices of a simplex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarycentricCoords {
    pub weights: Vec<f64>,
}

impl BarycentricCoords {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ReconError::InvalidInput(format!(
                "barycentric weights sum to {sum}, not 1"
            )));
        }
        Ok(Self { weights })
    }

    pub fn min(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `sum_i w_i v_i`.
    pub fn point(&self, vertices: &[&[f64]]) -> Vec<f64> {
        let mut x = vec![0.0; vertices[0].len()];
        for (v, &w) in vertices.iter().zip(&self.weights) {
            for (xi, vi) in x.iter_mut().zip(v.iter()) {
                *xi += w * vi;
            }
        }
        x
    }
}

/// Largest pairwise distance.
pub fn diameter(points: &[&[f64]]) -> f64 {
    let mut d2 = 0.0_f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d2 = d2.max(dist2(points[i], points[j]));
        }
    }
    d2.sqrt()
}

/// Minimum over vertices of the distance to the affine hull of the opposite facet.
pub fn simplex_height(points: &[&[f64]]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let mut others: Vec<&[f64]> = Vec::with_capacity(points.len() - 1);
    for (i, v) in points.iter().enumerate() {
        others.clear();
        others.extend(points.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| *p));
        best = best.min(Flat::through(&others).distance(v));
    }
    best
}

/// `(height, tolerance)`; degenerate when `height <= tolerance`.
pub(crate) fn degeneracy(points: &[&[f64]]) -> (f64, f64) {
    let height = simplex_height(points);
    (height, tol::DEGENERATE * diameter(points))
}

pub fn is_degenerate(points: &[&[f64]]) -> bool {
    if points.len() < 2 {
        return false;
    }
    let (h, t) = degeneracy(points);
    h <= t
}

/// d-volume `sqrt(det G)/d!` from the Gram matrix of edge vectors; 0 when degenerate.
pub fn simplex_volume(points: &[&[f64]]) -> f64 {
    let d = points.len().saturating_sub(1);
    if d == 0 {
        return 1.0;
    }
    if is_degenerate(points) {
        return 0.0;
    }
    let edges: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, points[0])).collect();
    let gram = DMatrix::from_fn(d, d, |i, j| dot(&edges[i], &edges[j]));
    let det = gram.determinant().max(0.0);
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    det.sqrt() / fact
}

/// Barycentric coordinates of `x`, which must lie in the affine hull of the simplex.
pub fn barycentric(points: &[&[f64]], x: &[f64]) -> Result<BarycentricCoords> {
    check_same_dim(points)?;
    if x.len() != points[0].len() {
        return Err(ReconError::InvalidInput("query point dimension mismatch".into()));
    }
    let (height, tolerance) = degeneracy(points);
    if points.len() > 1 && height <= tolerance {
        return Err(ReconError::DegenerateSimplex { height, tolerance });
    }
    let (weights, residual) = affine_solve(points, x).expect("non-degenerate simplex");
    let diam = diameter(points);
    if residual > 1e-8 * diam.max(f64::MIN_POSITIVE) {
        return Err(ReconError::NotInAffineHull { residual });
    }
    Ok(BarycentricCoords { weights })
}

/// Least-squares affine weights of `x` and the distance to the affine hull.
/// `None` if the vertices are affinely dependent.
pub(crate) fn affine_solve(points: &[&[f64]], x: &[f64]) -> Option<(Vec<f64>, f64)> {
    let v0 = points[0];
    let k = points.len() - 1;
    if k == 0 {
        return Some((vec![1.0], dist(x, v0)));
    }
    let edges: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, v0)).collect();
    let gram = DMatrix::from_fn(k, k, |i, j| dot(&edges[i], &edges[j]));
    let rel = sub(x, v0);
    let rhs = DVector::from_fn(k, |i, _| dot(&edges[i], &rel));
    let chol = gram.cholesky()?;
    let mu = chol.solve(&rhs);
    if mu.iter().any(|m| !m.is_finite()) {
        return None;
    }
    let mut recon = v0.to_vec();
    for (e, &m) in edges.iter().zip(mu.iter()) {
        for (r, ei) in recon.iter_mut().zip(e) {
            *r += m * ei;
        }
    }
    let mut weights = Vec::with_capacity(k + 1);
    weights.push(1.0 - mu.sum());
    weights.extend(mu.iter());
    Some((weights, dist(&recon, x)))
}

/// `|x - z|^2 - sum_a lambda_a |a - z|^2` with `x = sum_a lambda_a a`.
pub fn power_via_affine_combination(
    points: &[&[f64]],
    lambda: &BarycentricCoords,
    z: &[f64],
) -> Result<f64> {
    check_same_dim(points)?;
    let (height, tolerance) = degeneracy(points);
    if points.len() > 1 && height <= tolerance {
        return Err(ReconError::DegenerateSimplex { height, tolerance });
    }
    if lambda.weights.len() != points.len() {
        return Err(ReconError::InvalidInput("one barycentric weight per vertex expected".into()));
    }
    let x = lambda.point(points);
    let spread: f64 = points.iter().zip(&lambda.weights).map(|(a, w)| w * dist2(a, z)).sum();
    Ok(dist2(&x, z) - spread)
}

/// Closest point of the convex hull of `points` to `x`.
///
/// Enumerates affinely independent vertex subsets and keeps the best projection
/// that lands inside its face.
pub fn closest_point_in_hull(points: &[&[f64]], x: &[f64]) -> Vec<f64> {
    let n = points.len();
    assert!(n > 0 && n < 20, "hull distance expects a small vertex set");
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut subset: Vec<&[f64]> = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        subset.clear();
        subset.extend((0..n).filter(|i| mask & (1 << i) != 0).map(|i| points[i]));
        let Some((w, _)) = affine_solve(&subset, x) else { continue };
        if w.iter().any(|&wi| wi < -1e-12) {
            continue;
        }
        let y = BarycentricCoords { weights: w }.point(&subset);
        let d2 = dist2(&y, x);
        if best.as_ref().is_none_or(|(b, _)| d2 < *b) {
            best = Some((d2, y));
        }
    }
    best.map(|(_, y)| y).unwrap_or_else(|| points[0].to_vec())
}

pub fn distance_to_hull(points: &[&[f64]], x: &[f64]) -> f64 {
    dist(&closest_point_in_hull(points, x), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const TRI: [&[f64]; 3] = [&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]];
    const LINE: [&[f64]; 3] = [&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]];

    #[test]
    fn volume_examples() {
        assert_abs_diff_eq!(simplex_volume(&[&[0.0], &[1.0]]), 1.0);
        assert_abs_diff_eq!(simplex_volume(&TRI), 0.5, epsilon = 1e-15);
        assert_eq!(simplex_volume(&LINE), 0.0);
    }

    #[test]
    fn height_examples() {
        assert_abs_diff_eq!(simplex_height(&TRI), 0.5_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(simplex_height(&[&[0.0], &[1.0]]), 1.0);
        assert!(simplex_height(&LINE) < 1e-15);
        assert!(is_degenerate(&LINE));
        assert!(!is_degenerate(&TRI));
    }

    #[test]
    fn barycentric_examples() {
        let b = barycentric(&[&[0.0], &[1.0]], &[0.25]).unwrap();
        assert_abs_diff_eq!(b.weights[0], 0.75);
        assert_abs_diff_eq!(b.weights[1], 0.25);
        let b = barycentric(&TRI, &[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        for w in b.weights {
            assert_abs_diff_eq!(w, 1.0 / 3.0, epsilon = 1e-15);
        }
        let b = barycentric(&TRI, &[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(b.weights[1], 1.0, epsilon = 1e-15);
        let off = barycentric(&[&[0.0, 0.0], &[1.0, 0.0]], &[0.5, 0.1]);
        assert!(matches!(off, Err(ReconError::NotInAffineHull { .. })));
        assert!(matches!(barycentric(&LINE, &[0.5, 0.5]), Err(ReconError::DegenerateSimplex { .. })));
    }

    #[test]
    fn affine_power_examples() {
        let seg: [&[f64]; 2] = [&[0.0], &[1.0]];
        let half = BarycentricCoords::new(vec![0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(power_via_affine_combination(&seg, &half, &[0.0]).unwrap(), -0.25);
        let third = BarycentricCoords::new(vec![1.0 / 3.0; 3]).unwrap();
        let p = power_via_affine_combination(&TRI, &third, &[0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(p, -4.0 / 9.0, epsilon = 1e-15);
        let vertex = BarycentricCoords::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(power_via_affine_combination(&TRI, &vertex, &[7.0, -3.0]).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn hull_distance() {
        let seg: [&[f64]; 2] = [&[0.0, 0.0], &[2.0, 0.0]];
        assert_abs_diff_eq!(distance_to_hull(&seg, &[1.0, 1.0]), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(distance_to_hull(&seg, &[3.0, 0.0]), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(distance_to_hull(&TRI, &[0.2, 0.2]), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(distance_to_hull(&TRI, &[1.0, 1.0]), 0.5_f64.sqrt(), epsilon = 1e-15);
    }
}
