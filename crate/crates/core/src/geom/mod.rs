//! Geometric primitives on points, simplices, flats and spheres in R^N.

mod angle;
mod cloud;
mod flat;
mod kdtree;
mod simplex;
mod sphere;

pub use angle::{principal_angle, principal_angle_between_bases};
pub use cloud::PointCloud;
pub use flat::{project_onto_flat, Flat};
pub use kdtree::KdTree;
pub use simplex::{
    barycentric, closest_point_in_hull, diameter, distance_to_hull, is_degenerate,
    power_via_affine_combination, simplex_height, simplex_volume, BarycentricCoords,
};
pub(crate) use simplex::degeneracy;
pub use sphere::{circumsphere, circumsphere_in_flat, miniball, miniball_seeded, power_distance, Sphere};

/// An owned point in R^N.
pub type Point = Vec<f64>;

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

pub(crate) fn check_same_dim(points: &[&[f64]]) -> crate::Result<usize> {
    let dim = points
        .first()
        .map(|p| p.len())
        .ok_or_else(|| crate::ReconError::InvalidInput("empty point set".into()))?;
    if dim == 0 {
        return Err(crate::ReconError::InvalidInput("zero-dimensional points".into()));
    }
    if points.iter().any(|p| p.len() != dim) {
        return Err(crate::ReconError::InvalidInput(
            "points have mismatched ambient dimension".into(),
        ));
    }
    Ok(dim)
}
