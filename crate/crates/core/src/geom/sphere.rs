use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{check_same_dim, dist2, simplex::degeneracy, sub, Flat};
use crate::{ReconError, Result};

/// A sphere `S(center, radius)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sphere {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Sphere {
    /// Closed-ball membership with a small relative slack.
    pub fn contains(&self, x: &[f64]) -> bool {
        let r2 = self.radius * self.radius;
        dist2(x, &self.center) <= r2 + 1e-12 * (1.0 + r2)
    }
}

/// `|x - Z|^2 - R^2`.
pub fn power_distance(sphere: &Sphere, x: &[f64]) -> f64 {
    dist2(x, &sphere.center) - sphere.radius * sphere.radius
}

/// Smallest sphere through all `vertices` with its center in their affine hull.
pub fn circumsphere(vertices: &[&[f64]]) -> Result<Sphere> {
    check_same_dim(vertices)?;
    let (height, tolerance) = degeneracy(vertices);
    if vertices.len() > 1 && height <= tolerance {
        return Err(ReconError::DegenerateSimplex { height, tolerance });
    }
    Ok(affine_circumsphere(vertices).expect("non-degenerate Gram system"))
}

/// Circumsphere of vertices given in the coordinates of `flat`, lifted back to R^N.
pub fn circumsphere_in_flat(local_vertices: &[&[f64]], flat: &Flat) -> Result<Sphere> {
    let s = circumsphere(local_vertices)?;
    Ok(Sphere { center: flat.lift(&s.center), radius: s.radius })
}

/// Solves the Gram system for the center in `v0 + span(v_i - v0)`.
/// Returns `None` when the system is singular.
fn affine_circumsphere(vertices: &[&[f64]]) -> Option<Sphere> {
    let v0 = vertices[0];
    if vertices.len() == 1 {
        return Some(Sphere { center: v0.to_vec(), radius: 0.0 });
    }
    let edges: Vec<Vec<f64>> = vertices[1..].iter().map(|v| sub(v, v0)).collect();
    let k = edges.len();
    let gram = DMatrix::from_fn(k, k, |i, j| super::dot(&edges[i], &edges[j]));
    let rhs = DVector::from_fn(k, |i, _| 0.5 * gram[(i, i)]);
    let mu = gram.lu().solve(&rhs)?;
    if mu.iter().any(|x| !x.is_finite()) {
        return None;
    }
    Some(from_coefficients(v0, &edges, mu.as_slice()))
}

fn from_coefficients(v0: &[f64], edges: &[Vec<f64>], mu: &[f64]) -> Sphere {
    let mut center = v0.to_vec();
    for (e, &m) in edges.iter().zip(mu) {
        for (c, x) in center.iter_mut().zip(e) {
            *c += m * x;
        }
    }
    let radius = dist2(&center, v0).sqrt();
    Sphere { center, radius }
}

/// Least-squares variant for affinely dependent support sets.
fn pseudo_circumsphere(vertices: &[&[f64]]) -> Sphere {
    let v0 = vertices[0];
    let edges: Vec<Vec<f64>> = vertices[1..].iter().map(|v| sub(v, v0)).collect();
    let k = edges.len();
    let gram = DMatrix::from_fn(k, k, |i, j| super::dot(&edges[i], &edges[j]));
    let rhs = DVector::from_fn(k, |i, _| 0.5 * gram[(i, i)]);
    let scale = gram.diagonal().amax().max(f64::MIN_POSITIVE);
    let mu = gram
        .pseudo_inverse(1e-13 * scale)
        .map(|p| p * rhs)
        .unwrap_or_else(|_| DVector::zeros(k));
    let mut s = from_coefficients(v0, &edges, mu.as_slice());
    s.radius = vertices.iter().map(|v| dist2(v, &s.center)).fold(0.0, f64::max).sqrt();
    s
}

fn support_ball(points: &[&[f64]], support: &[usize]) -> Option<Sphere> {
    if support.is_empty() {
        return None;
    }
    let verts: Vec<&[f64]> = support.iter().map(|&i| points[i]).collect();
    Some(affine_circumsphere(&verts).unwrap_or_else(|| pseudo_circumsphere(&verts)))
}

/// Smallest enclosing ball using a fixed shuffle seed.
pub fn miniball(points: &[&[f64]]) -> Result<Sphere> {
    miniball_seeded(points, 0x5eed)
}

/// Smallest enclosing ball by move-to-front Welzl recursion after a seeded shuffle.
pub fn miniball_seeded(points: &[&[f64]], seed: u64) -> Result<Sphere> {
    let dim = check_same_dim(points)?;
    let mut order: Vec<usize> = (0..points.len()).collect();
    if points.len() > 8 {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut support = Vec::with_capacity(dim + 1);
    let ball = mtf(points, &mut order, points.len(), &mut support, dim);
    Ok(ball.expect("at least one point"))
}

fn mtf(
    points: &[&[f64]],
    order: &mut [usize],
    end: usize,
    support: &mut Vec<usize>,
    dim: usize,
) -> Option<Sphere> {
    let mut ball = support_ball(points, support);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..end {
        let p = order[i];
        let inside = ball.as_ref().is_some_and(|b| b.contains(points[p]));
        if !inside {
            support.push(p);
            ball = mtf(points, order, i, support, dim);
            support.pop();
            order[..=i].rotate_right(1);
        }
    }
    ball
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn miniball_examples() {
        let b = miniball(&[&[0.0, 0.0], &[4.0, 0.0], &[1.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(b.center[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.center[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.radius, 2.0, epsilon = 1e-12);
        let b = miniball(&[&[0.0, 0.0]]).unwrap();
        assert_eq!(b.radius, 0.0);
        let b = miniball(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(b.center[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(b.radius, 0.5, epsilon = 1e-15);
        assert!(miniball(&[&[0.0, 0.0], &[1.0]]).is_err());
    }

    #[test]
    fn circumsphere_examples() {
        let s = circumsphere(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(s.center[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.center[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.radius, 0.5_f64.sqrt(), epsilon = 1e-15);
        let s = circumsphere(&[&[0.0], &[1.0]]).unwrap();
        assert_abs_diff_eq!(s.center[0], 0.5);
        let h = 3.0_f64.sqrt() / 2.0;
        let s = circumsphere(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, h]]).unwrap();
        assert_abs_diff_eq!(s.radius, 1.0 / 3.0_f64.sqrt(), epsilon = 1e-14);
        assert!(matches!(
            circumsphere(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0]]),
            Err(ReconError::DegenerateSimplex { .. })
        ));
    }

    #[test]
    fn circumsphere_center_lies_in_affine_hull() {
        let s = circumsphere(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 1.0], &[0.0, 2.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(s.center[2], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn power_examples() {
        let seg = circumsphere(&[&[0.0], &[1.0]]).unwrap();
        assert_abs_diff_eq!(power_distance(&seg, &[0.5]), -0.25, epsilon = 1e-15);
        let tri = circumsphere(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(power_distance(&tri, &[0.0, 0.0]), 0.0, epsilon = 1e-15);
    }
}
