use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::AnalyticManifold;
use crate::complex::{OrientedSimplex, Simplex};
use crate::geom::{degeneracy, principal_angle, Flat, PointCloud};
use crate::{tol, ReconError, Result};

/// Orientation of `sigma` relative to `reference`: the sign of the determinant
/// of its projected edge vectors in reference coordinates.
pub fn simplex_sign(sigma: &OrientedSimplex, cloud: &PointCloud, reference: &Flat) -> Result<i8> {
    let verts = cloud.gather(sigma.simplex.vertices());
    Ok(oriented_sign(&verts, reference)? * sigma.sign)
}

/// [`simplex_sign`] for vertices given in order.
pub fn oriented_sign(vertices: &[&[f64]], reference: &Flat) -> Result<i8> {
    let d = reference.dim();
    if vertices.len() != d + 1 {
        return Err(ReconError::InvalidInput(format!(
            "a {}-simplex cannot be oriented against a {d}-flat",
            vertices.len().saturating_sub(1)
        )));
    }
    let (height, tolerance) = degeneracy(vertices);
    if height <= tolerance {
        return Err(ReconError::DegenerateSimplex { height, tolerance });
    }
    let aff = Flat::through(vertices);
    let angle = principal_angle(&aff, reference);
    if angle >= FRAC_PI_2 - tol::REL {
        return Err(ReconError::OrientationUndefined { angle });
    }
    let origin = reference.coordinates(vertices[0]);
    let m = DMatrix::from_fn(d, d, |i, j| reference.coordinates(vertices[j + 1])[i] - origin[i]);
    Ok(if m.determinant() > 0.0 { 1 } else { -1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleEstimate {
    pub angle: f64,
    pub probes: usize,
}

/// Lower estimate of `max_m angle(Aff sigma, T_m M)` over `m` in the projection
/// of the hull: probes the vertices, the barycenter, the edge midpoints and
/// `interior` random interior points.
pub fn angular_deviation(
    sigma: &Simplex,
    manifold: &AnalyticManifold,
    cloud: &PointCloud,
    interior: usize,
) -> Result<AngleEstimate> {
    let verts = cloud.gather(sigma.vertices());
    let (height, tolerance) = degeneracy(&verts);
    if verts.len() > 1 && height <= tolerance {
        return Err(ReconError::DegenerateSimplex { height, tolerance });
    }
    let aff = Flat::through(&verts);
    let probes = probe_points(&verts, interior, sigma);
    let angle = probes
        .iter()
        .map(|x| principal_angle(&aff, &manifold.tangent_at(x)))
        .fold(0.0, f64::max);
    Ok(AngleEstimate { angle, probes: probes.len() })
}

pub(crate) fn probe_points(verts: &[&[f64]], interior: usize, sigma: &Simplex) -> Vec<Vec<f64>> {
    let k = verts.len();
    let combine = |w: &[f64]| -> Vec<f64> {
        let mut p = vec![0.0; verts[0].len()];
        for (v, &wi) in verts.iter().zip(w) {
            for (pi, vi) in p.iter_mut().zip(v.iter()) {
                *pi += wi * vi;
            }
        }
        p
    };
    let mut out: Vec<Vec<f64>> = verts.iter().map(|v| v.to_vec()).collect();
    if k > 1 {
        out.push(combine(&vec![1.0 / k as f64; k]));
        for i in 0..k {
            for j in i + 1..k {
                let mut w = vec![0.0; k];
                w[i] = 0.5;
                w[j] = 0.5;
                out.push(combine(&w));
            }
        }
        let seed = sigma.vertices().iter().fold(0xcbf2_9ce4_8422_2325_u64, |h, &v| {
            (h ^ v as u64).wrapping_mul(0x0100_0000_01b3)
        });
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..interior {
            let mut w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            out.push(combine(&w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_signs() {
        let cloud = PointCloud::from_points(&[vec![0.0], vec![1.0]]).unwrap();
        let axis = Flat::new(vec![0.0], vec![vec![1.0]]).unwrap();
        let fwd = OrientedSimplex::from_ordering(&[0, 1]).unwrap();
        assert_eq!(simplex_sign(&fwd, &cloud, &axis).unwrap(), 1);
        assert_eq!(simplex_sign(&fwd.reversed(), &cloud, &axis).unwrap(), -1);
        assert_eq!(simplex_sign(&OrientedSimplex::from_ordering(&[1, 0]).unwrap(), &cloud, &axis).unwrap(), -1);
    }

    #[test]
    fn triangle_signs_and_permutations() {
        let cloud =
            PointCloud::from_points(&[vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let plane = Flat::new(vec![0.0; 3], vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let sign = |o: &[usize]| simplex_sign(&OrientedSimplex::from_ordering(o).unwrap(), &cloud, &plane).unwrap();
        assert_eq!(sign(&[0, 1, 2]), 1);
        assert_eq!(sign(&[1, 2, 0]), 1);
        assert_eq!(sign(&[0, 2, 1]), -1);
        assert_eq!(sign(&[2, 1, 0]), -1);
    }

    #[test]
    fn perpendicular_is_undefined() {
        let cloud = PointCloud::from_points(&[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let axis = Flat::new(vec![0.0, 0.0], vec![vec![1.0, 0.0]]).unwrap();
        let s = OrientedSimplex::from_ordering(&[0, 1]).unwrap();
        assert!(matches!(simplex_sign(&s, &cloud, &axis), Err(ReconError::OrientationUndefined { .. })));
    }

    #[test]
    fn chord_deviation_matches_closed_form() {
        let r = 2.0;
        let (a, b) = (0.1_f64, 0.5_f64);
        let cloud = PointCloud::from_points(&[vec![r * a.cos(), r * a.sin()], vec![r * b.cos(), r * b.sin()]]).unwrap();
        let m = AnalyticManifold::circle(r);
        let est = angular_deviation(&Simplex::edge(0, 1), &m, &cloud, 20).unwrap();
        let len = crate::geom::dist(cloud.point(0), cloud.point(1));
        assert!((est.angle - (len / (2.0 * r)).asin()).abs() < 1e-12);
        assert_eq!(est.probes, 2 + 1 + 1 + 20);
    }

    #[test]
    fn flat_disk_has_zero_deviation() {
        let cloud =
            PointCloud::from_points(&[vec![0.0, 0.0, 0.0], vec![0.3, 0.1, 0.0], vec![0.1, 0.4, 0.0]]).unwrap();
        let m = AnalyticManifold::flat_disk(2, 3, 1.0);
        let est = angular_deviation(&Simplex::new(vec![0, 1, 2]).unwrap(), &m, &cloud, 5).unwrap();
        assert!(est.angle < 1e-12);
    }
}
