use super::{Simplex, SimplicialComplex};
use crate::geom::{diameter, dist, distance_to_hull, PointCloud};

/// `K[x, r]`: simplices of `k` whose convex hull meets the closed ball `B(x, r)`.
pub fn restrict_near(k: &SimplicialComplex, cloud: &PointCloud, x: &[f64], r: f64) -> Vec<Simplex> {
    (0..=k.max_dim().unwrap_or(0))
        .flat_map(|d| restrict_near_dim(k, cloud, d, x, r))
        .collect()
}

/// `K[x, r]` restricted to the `d`-simplices.
pub fn restrict_near_dim(k: &SimplicialComplex, cloud: &PointCloud, d: usize, x: &[f64], r: f64) -> Vec<Simplex> {
    let limit = r + 1e-12 * (1.0 + r);
    k.simplices(d)
        .iter()
        .filter(|s| {
            let pts = cloud.gather(s.vertices());
            let nearest_vertex = pts.iter().map(|p| dist(p, x)).fold(f64::INFINITY, f64::min);
            if nearest_vertex <= limit {
                return true;
            }
            if nearest_vertex - diameter(&pts) > limit {
                return false;
            }
            distance_to_hull(&pts, x) <= limit
        })
        .cloned()
        .collect()
}
