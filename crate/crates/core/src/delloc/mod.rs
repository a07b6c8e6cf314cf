//! The Delloc complex: `d`-simplices that are Delaunay in the projection of
//! their local neighborhood onto their own affine hull.

mod encode;
mod faithful;

use rayon::prelude::*;
use serde::Serialize;

pub use encode::{encode_chain, encode_chain_coherent};
pub use faithful::{check_faithfulness, FaithfulnessReport};

use crate::complex::{is_locally_delaunay, Simplex, SimplicialComplex};
use crate::geom::{circumsphere, dist2, miniball, Flat, KdTree, PointCloud};
use crate::{tol, ReconError, Result};

/// Per-simplex data of the Delloc test.
#[derive(Clone, Debug, Serialize)]
pub struct DellocRecord {
    pub simplex: Simplex,
    /// Center and radius of the smallest enclosing ball.
    pub ball_center: Vec<f64>,
    pub ball_radius: f64,
    /// Circumcenter `Z(sigma)` in `Aff sigma` and circumradius `R(sigma)`.
    pub circumcenter: Vec<f64>,
    pub circumradius: f64,
    /// Points of `B(c_sigma, rho)` outside the simplex.
    pub neighbors: usize,
    /// Whether no sample lies strictly inside the circumscribing ball; only
    /// evaluated when `2 R(sigma) <= rho`.
    pub gabriel: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct DellocComplex {
    pub complex: SimplicialComplex,
    pub rho: f64,
    pub d: usize,
    pub records: Vec<DellocRecord>,
}

impl DellocComplex {
    pub fn simplices(&self) -> &[Simplex] {
        self.complex.simplices(self.d)
    }

    pub fn max_circumradius(&self) -> f64 {
        self.records.iter().map(|r| r.circumradius).fold(0.0, f64::max)
    }
}

/// Whether `sigma` is Delaunay among the projections onto `Aff sigma` of the
/// samples in the closed ball `B(c_sigma, rho)`.
pub fn is_delloc(sigma: &Simplex, cloud: &PointCloud, rho: f64) -> Result<bool> {
    Ok(delloc_record(sigma, cloud, &KdTree::new(cloud), rho)?.is_some())
}

fn delloc_record(sigma: &Simplex, cloud: &PointCloud, tree: &KdTree, rho: f64) -> Result<Option<DellocRecord>> {
    let verts = cloud.gather(sigma.vertices());
    let sphere = circumsphere(&verts)?;
    let ball = miniball(&verts)?;
    let near: Vec<usize> = tree
        .within(&ball.center, rho + tol::BALL_SLACK * (1.0 + rho))
        .into_iter()
        .filter(|q| !sigma.contains_vertex(*q))
        .collect();
    let aff = Flat::through(&verts);
    if aff.dim() != sigma.dim() {
        return Err(ReconError::InvalidInput(format!("simplex {sigma:?} is not affinely independent")));
    }
    let local: Vec<Vec<f64>> = verts.iter().map(|v| aff.coordinates(v)).collect();
    let others: Vec<Vec<f64>> = near.iter().map(|&q| aff.coordinates(cloud.point(q))).collect();
    let lrefs: Vec<&[f64]> = local.iter().map(|v| v.as_slice()).collect();
    let orefs: Vec<&[f64]> = others.iter().map(|v| v.as_slice()).collect();
    if !is_locally_delaunay(&lrefs, &orefs)? {
        return Ok(None);
    }
    let gabriel = (2.0 * sphere.radius <= rho).then(|| {
        let r2 = sphere.radius * sphere.radius;
        tree.within(&sphere.center, sphere.radius)
            .into_iter()
            .filter(|q| !sigma.contains_vertex(*q))
            .all(|q| dist2(cloud.point(q), &sphere.center) >= r2 - tol::POWER * r2)
    });
    Ok(Some(DellocRecord {
        simplex: sigma.clone(),
        ball_center: ball.center,
        ball_radius: ball.radius,
        circumcenter: sphere.center,
        circumradius: sphere.radius,
        neighbors: near.len(),
        gabriel,
    }))
}

/// The `d`-simplices of `candidates` that are delloc at scale `rho`, with all
/// their faces. Degenerate candidates are dropped.
pub fn delloc_complex(cloud: &PointCloud, rho: f64, d: usize, candidates: &SimplicialComplex) -> Result<DellocComplex> {
    let tree = KdTree::new(cloud);
    let tested: Vec<Result<Option<DellocRecord>>> = candidates
        .simplices(d)
        .par_iter()
        .map(|s| match delloc_record(s, cloud, &tree, rho) {
            Err(ReconError::DegenerateSimplex { .. }) => Ok(None),
            other => other,
        })
        .collect();
    let mut records = Vec::new();
    for r in tested {
        if let Some(rec) = r? {
            records.push(rec);
        }
    }
    let complex = SimplicialComplex::from_simplices(cloud.len(), records.iter().map(|r| r.simplex.clone()));
    Ok(DellocComplex { complex, rho, d, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::cech_complex;
    use std::f64::consts::PI;

    fn circle(n: usize) -> PointCloud {
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        PointCloud::from_points(&pts).unwrap()
    }

    #[test]
    fn consecutive_and_skipping_edges() {
        let cloud = circle(24);
        let gap = 2.0 * (PI / 24.0).sin();
        assert!(is_delloc(&Simplex::edge(0, 1), &cloud, 4.0 * gap).unwrap());
        assert!(!is_delloc(&Simplex::edge(0, 2), &cloud, 4.0 * gap).unwrap());
        assert!(is_delloc(&Simplex::edge(0, 2), &cloud, 0.1 * gap).unwrap());
    }

    #[test]
    fn circle_delloc_is_the_polygon() {
        let n = 32;
        let cloud = circle(n);
        let eps = 2.0 * (PI / (2.0 * n as f64)).sin();
        let k = cech_complex(&cloud, 4.0 * eps, 1);
        let dc = delloc_complex(&cloud, 16.0 * eps, 1, &k).unwrap();
        let expect: Vec<Simplex> = (0..n).map(|i| Simplex::edge(i, (i + 1) % n)).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        assert_eq!(dc.simplices(), expect.as_slice());
        assert!(dc.records.iter().all(|r| r.gabriel == Some(true)));
    }

    #[test]
    fn empty_candidates() {
        let cloud = circle(5);
        let k = SimplicialComplex::from_simplices(5, []);
        let dc = delloc_complex(&cloud, 1.0, 1, &k).unwrap();
        assert!(dc.simplices().is_empty());
    }
}
