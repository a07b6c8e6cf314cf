use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::complex::{neighbor_cliques, Simplex};
use crate::geom::{
    circumsphere, dist, miniball, principal_angle, simplex_height, Flat, KdTree, PointCloud, Sphere,
};
use crate::manifold::{angular_deviation, pca_tangent, AnalyticManifold};
use crate::{tol, ReconError, Result};

/// Minimum pairwise distance.
pub fn separation(cloud: &PointCloud) -> Result<f64> {
    if cloud.len() < 2 {
        return Err(ReconError::InvalidInput("separation needs at least two points".into()));
    }
    let tree = KdTree::new(cloud);
    let mut best = dist(cloud.point(0), cloud.point(1));
    for i in 0..cloud.len() {
        let p = cloud.point(i);
        for j in tree.within(p, best) {
            if j != i {
                best = best.min(dist(p, cloud.point(j)));
            }
        }
    }
    Ok(best)
}

/// Upper bound on the number of `d`-simplices among cliques of the graph
/// joining points at distance at most `2 rho`.
pub fn candidate_bound(cloud: &PointCloud, rho: f64, d: usize) -> f64 {
    let tree = KdTree::new(cloud);
    (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            let deg = tree.within(cloud.point(i), 2.0 * rho).into_iter().filter(|&j| j > i).count();
            binomial(deg, d)
        })
        .sum()
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `d`-simplices of the cloud enclosed in a ball of radius `rho`.
pub fn rho_small_simplices(cloud: &PointCloud, rho: f64, d: usize) -> Vec<Simplex> {
    let limit = rho + tol::BALL_SLACK;
    let mut out: Vec<Simplex> = neighbor_cliques(cloud, 2.0 * limit, d, |c| {
        miniball(&cloud.gather(c)).is_ok_and(|b| b.radius <= limit)
    })
    .into_iter()
    .filter(|c| c.len() == d + 1)
    .map(Simplex::from_sorted)
    .collect();
    out.sort();
    out
}

/// `min height(sigma)` over the `rho`-small `d`-simplices.
pub fn height_at_scale(cloud: &PointCloud, rho: f64, d: usize) -> Result<f64> {
    height_over(cloud, &rho_small_simplices(cloud, rho, d))
}

pub(crate) fn height_over(cloud: &PointCloud, simplices: &[Simplex]) -> Result<f64> {
    if simplices.is_empty() {
        return Err(ReconError::NoCandidates);
    }
    Ok(simplices
        .par_iter()
        .map(|s| simplex_height(&cloud.gather(s.vertices())))
        .reduce(|| f64::INFINITY, f64::min))
}

/// Protection of one simplex against a set of point indices: the distance
/// from each projected competitor `q'` on `Aff sigma` to the circumsphere,
/// unsigned and signed (`|q' - Z| - R`). `None` when there are no competitors.
pub fn simplex_protection(cloud: &PointCloud, sigma: &Simplex, competitors: &[usize]) -> Result<Option<Protection>> {
    let verts = cloud.gather(sigma.vertices());
    let sphere = circumsphere(&verts)?;
    let aff = Flat::through(&verts);
    Ok(competitors
        .iter()
        .filter(|q| !sigma.contains_vertex(**q))
        .map(|&q| {
            let g = projected_power_gap(&aff, &sphere, cloud.point(q));
            Protection { unsigned: g.abs(), signed: g }
        })
        .reduce(Protection::min))
}

/// `|pi(q) - Z| - R`; the center lies on `aff`, so only the in-flat
/// coordinates of `q - Z` matter.
pub(crate) fn projected_power_gap(aff: &Flat, sphere: &Sphere, q: &[f64]) -> f64 {
    let in_flat: f64 = aff
        .basis()
        .iter()
        .map(|u| {
            let c: f64 = u.iter().zip(q).zip(&sphere.center).map(|((ui, qi), zi)| ui * (qi - zi)).sum();
            c * c
        })
        .sum();
    in_flat.sqrt() - sphere.radius
}

/// Points of the cloud in the closed ball `B(c_sigma, r)` around the center of
/// the smallest enclosing ball.
pub fn ball_neighbors(cloud: &PointCloud, tree: &KdTree, sigma: &Simplex, r: f64) -> Result<Vec<usize>> {
    let ball = miniball(&cloud.gather(sigma.vertices()))?;
    Ok(tree.within(&ball.center, r + tol::BALL_SLACK * (1.0 + r)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Protection {
    pub unsigned: f64,
    pub signed: f64,
}

impl Protection {
    const NONE: Protection = Protection { unsigned: f64::INFINITY, signed: f64::INFINITY };
    const ZERO: Protection = Protection { unsigned: 0.0, signed: 0.0 };

    fn min(self, other: Protection) -> Protection {
        Protection { unsigned: self.unsigned.min(other.unsigned), signed: self.signed.min(other.signed) }
    }
}

/// `min_sigma prot(sigma, P cap B(c_sigma, rho3))` over the `rho3`-small
/// `d`-simplices. Degenerate simplices have zero protection.
pub fn protection_at_scale(cloud: &PointCloud, rho3: f64, d: usize) -> Protection {
    protection_over(cloud, &rho_small_simplices(cloud, rho3, d), rho3)
}

pub(crate) fn protection_over(cloud: &PointCloud, simplices: &[Simplex], rho3: f64) -> Protection {
    let tree = KdTree::new(cloud);
    simplices
        .par_iter()
        .map(|s| {
            ball_neighbors(cloud, &tree, s, rho3)
                .and_then(|near| simplex_protection(cloud, s, &near))
                .map_or(Protection::ZERO, |p| p.unwrap_or(Protection::NONE))
        })
        .reduce(|| Protection::NONE, Protection::min)
}

/// Source of tangent spaces for the angular deviation.
#[derive(Clone, Copy, Debug)]
pub enum TangentSource<'a> {
    Manifold(&'a AnalyticManifold),
    /// Local PCA at the sample nearest to each probe, at the given scale.
    Pca { rho: f64 },
}

/// `max_sigma angle_M(sigma)` over the `rho`-small `d`-simplices, each sup
/// estimated with `probes` interior samples.
pub fn max_angular_deviation(
    cloud: &PointCloud,
    rho: f64,
    d: usize,
    source: TangentSource<'_>,
    probes: usize,
) -> Result<f64> {
    deviation_over(cloud, &rho_small_simplices(cloud, rho, d), source, probes)
}

pub(crate) fn deviation_over(
    cloud: &PointCloud,
    simplices: &[Simplex],
    source: TangentSource<'_>,
    probes: usize,
) -> Result<f64> {
    if simplices.is_empty() {
        return Err(ReconError::NoCandidates);
    }
    match source {
        TangentSource::Manifold(m) => {
            let angles: Result<Vec<f64>> = simplices
                .par_iter()
                .map(|s| match angular_deviation(s, m, cloud, probes) {
                    Ok(a) => Ok(a.angle),
                    Err(ReconError::DegenerateSimplex { .. }) => Ok(std::f64::consts::FRAC_PI_2),
                    Err(e) => Err(e),
                })
                .collect();
            Ok(angles?.into_iter().fold(0.0, f64::max))
        }
        TangentSource::Pca { rho } => {
            let d = simplices[0].dim();
            let tree = KdTree::new(cloud);
            let cache: Mutex<HashMap<usize, Flat>> = Mutex::new(HashMap::new());
            let tangent = |p: usize| -> Result<Flat> {
                if let Some(f) = cache.lock().expect("cache lock").get(&p) {
                    return Ok(f.clone());
                }
                let f = pca_tangent(cloud, p, rho, d)?;
                cache.lock().expect("cache lock").insert(p, f.clone());
                Ok(f)
            };
            let angles: Result<Vec<f64>> = simplices
                .par_iter()
                .map(|s| {
                    let verts = cloud.gather(s.vertices());
                    if crate::geom::is_degenerate(&verts) {
                        return Ok(std::f64::consts::FRAC_PI_2);
                    }
                    let aff = Flat::through(&verts);
                    let mut worst: f64 = 0.0;
                    for x in crate::manifold::probe_points(&verts, probes, s) {
                        let (p, _) = tree.nearest(&x).expect("non-empty cloud");
                        worst = worst.max(principal_angle(&aff, &tangent(p)?));
                    }
                    Ok(worst)
                })
                .collect();
            Ok(angles?.into_iter().fold(0.0, f64::max))
        }
    }
}
