use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};

use crate::complex::{Chain, Simplex};
use crate::geom::{diameter, dist, distance_to_hull, Flat, PointCloud};
use crate::manifold::{oriented_sign, AnalyticManifold};
use crate::{tol, ReconError, Result};

/// Where the load of a chain is measured: a point `a` of a flat, or a point of
/// an analytic manifold.
#[derive(Clone, Copy, Debug)]
pub enum LoadTarget<'a> {
    Flat { a: &'a [f64], flat: &'a Flat },
    Manifold { a: &'a [f64], manifold: &'a AnalyticManifold },
}

/// Contribution of a positively oriented `sigma` to the load: its orientation
/// sign if the projection of its hull covers the target point, else 0.
pub fn load_sign(sigma: &Simplex, cloud: &PointCloud, target: LoadTarget<'_>) -> Result<i8> {
    let verts = cloud.gather(sigma.vertices());
    match target {
        LoadTarget::Flat { a, flat } => Ok(flat_hit(sigma, &verts, a, flat)?.map_or(0, |h| h.0)),
        LoadTarget::Manifold { a, manifold } => {
            let tangent = manifold.tangent_at(a);
            let m = tangent.base().to_vec();
            let Some((sign, bary)) = flat_hit(sigma, &verts, &m, &tangent)? else {
                return Ok(0);
            };
            // the hit point lies on the normal fiber through m; it projects to m
            // only inside the reach tube
            let mut x = vec![0.0; m.len()];
            for (v, w) in verts.iter().zip(&bary) {
                for (xi, vi) in x.iter_mut().zip(v.iter()) {
                    *xi += w * vi;
                }
            }
            let norm_m = m.iter().map(|v| v * v).sum::<f64>().sqrt();
            if dist(&manifold.project(&x), &m) <= 1e-7 * (1.0 + norm_m) {
                Ok(sign)
            } else {
                Ok(0)
            }
        }
    }
}

/// `sum gamma(sigma) sign(sigma) 1[a in pi(Conv sigma)]` over the chain,
/// optionally restricted to a set of simplices.
pub fn load(
    chain: &Chain,
    cloud: &PointCloud,
    target: LoadTarget<'_>,
    restricted_to: Option<&HashSet<Simplex>>,
) -> Result<f64> {
    let mut total = 0.0;
    for (s, c) in chain.iter() {
        if restricted_to.is_some_and(|r| !r.contains(s)) {
            continue;
        }
        total += c * f64::from(load_sign(s, cloud, target)?);
    }
    Ok(total)
}

/// Barycentric test of `a` against the projection of the simplex onto `flat`.
/// Returns the orientation sign and the barycentric coordinates on a hit.
fn flat_hit(sigma: &Simplex, verts: &[&[f64]], a: &[f64], flat: &Flat) -> Result<Option<(i8, Vec<f64>)>> {
    let d = flat.dim();
    if verts.len() != d + 1 {
        return Err(ReconError::InvalidInput(format!(
            "load of a {}-simplex on a {d}-flat",
            verts.len() - 1
        )));
    }
    let local: Vec<Vec<f64>> = verts.iter().map(|v| flat.coordinates(v)).collect();
    let target = flat.coordinates(a);
    let lrefs: Vec<&[f64]> = local.iter().map(|v| v.as_slice()).collect();
    let scale = diameter(&lrefs);
    let bary = solve_barycentric(&local, &target);
    let min = match &bary {
        Some(w) => w.iter().copied().fold(f64::INFINITY, f64::min),
        None => {
            // flattened projection: only its boundary can contain `a`
            if distance_to_hull(&lrefs, &target) > tol::GENERIC_MARGIN * scale {
                return Ok(None);
            }
            0.0
        }
    };
    if min < -tol::GENERIC_MARGIN {
        return Ok(None);
    }
    if min <= tol::GENERIC_MARGIN {
        return Err(ReconError::GenericityViolation { simplex: sigma.vertices().to_vec(), min_bary: min });
    }
    let sign = oriented_sign(verts, flat)?;
    Ok(Some((sign, bary.expect("non-degenerate projection"))))
}

/// Affine weights of `x` in a full-dimensional simplex of `R^d`; `None` when
/// the simplex is degenerate.
fn solve_barycentric(local: &[Vec<f64>], x: &[f64]) -> Option<Vec<f64>> {
    let d = x.len();
    let refs: Vec<&[f64]> = local.iter().map(|v| v.as_slice()).collect();
    if d > 0 && crate::geom::is_degenerate(&refs) {
        return None;
    }
    let m = DMatrix::from_fn(d + 1, d + 1, |i, j| if i == 0 { 1.0 } else { local[j][i - 1] });
    let rhs = DVector::from_fn(d + 1, |i, _| if i == 0 { 1.0 } else { x[i - 1] });
    m.lu().solve(&rhs).map(|w| w.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> Flat {
        Flat::new(vec![0.0; 3], vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap()
    }

    #[test]
    fn inside_outside_and_cancellation() {
        let cloud = PointCloud::from_points(&[
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.1],
            vec![0.0, 1.0, -0.1],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let f = plane();
        let t = Simplex::new(vec![0, 1, 2]).unwrap();
        let inside = LoadTarget::Flat { a: &[0.2, 0.2, 5.0], flat: &f };
        let chain = Chain::from_entries(2, [(t.clone(), 1.0)]);
        assert_eq!(load(&chain, &cloud, inside, None).unwrap(), 1.0);
        let outside = LoadTarget::Flat { a: &[0.9, 0.9, 0.0], flat: &f };
        assert_eq!(load(&chain, &cloud, outside, None).unwrap(), 0.0);
        // both triangles are counterclockwise and cover the point
        let u = Simplex::new(vec![0, 1, 3]).unwrap();
        let both = Chain::from_entries(2, [(t, 1.0), (u, 1.0)]);
        let a = LoadTarget::Flat { a: &[0.6, 0.3, 0.0], flat: &f };
        assert_eq!(load(&both, &cloud, a, None).unwrap(), 2.0);
    }

    #[test]
    fn opposite_orientations_cancel() {
        let cloud = PointCloud::from_points(&[
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let f = plane();
        // [0,1,2] is positive, [1,2,3] is negative; both cover the point
        let a = LoadTarget::Flat { a: &[0.5, 0.45, 0.0], flat: &f };
        let s = Simplex::new(vec![0, 1, 2]).unwrap();
        let t = Simplex::new(vec![1, 2, 3]).unwrap();
        assert_eq!(load_sign(&s, &cloud, a).unwrap(), 1);
        assert_eq!(load_sign(&t, &cloud, a).unwrap(), 0);
        let b = LoadTarget::Flat { a: &[0.6, 0.55, 0.0], flat: &f };
        assert_eq!(load_sign(&t, &cloud, b).unwrap(), -1);
        let chain = Chain::from_entries(2, [(Simplex::new(vec![0, 1, 3]).unwrap(), 1.0), (t, 1.0)]);
        assert_eq!(load(&chain, &cloud, b, None).unwrap(), 0.0);
    }

    #[test]
    fn borderline_point_is_rejected() {
        let cloud = PointCloud::from_points(&[vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let f = plane();
        let s = Simplex::new(vec![0, 1, 2]).unwrap();
        let edge = LoadTarget::Flat { a: &[0.5, 0.0, 0.0], flat: &f };
        assert!(matches!(load_sign(&s, &cloud, edge), Err(ReconError::GenericityViolation { .. })));
    }

    #[test]
    fn manifold_load_respects_fiber() {
        let m = AnalyticManifold::circle(1.0);
        let a = 0.3_f64;
        let b = 0.5_f64;
        let cloud = PointCloud::from_points(&[vec![a.cos(), a.sin()], vec![b.cos(), b.sin()]]).unwrap();
        let e = Simplex::edge(0, 1);
        let mid = [0.4_f64.cos(), 0.4_f64.sin()];
        assert_eq!(load_sign(&e, &cloud, LoadTarget::Manifold { a: &mid, manifold: &m }).unwrap(), 1);
        let far = [(0.4_f64 + 3.0).cos(), (0.4_f64 + 3.0).sin()];
        assert_eq!(load_sign(&e, &cloud, LoadTarget::Manifold { a: &far, manifold: &m }).unwrap(), 0);
        let opposite = [-mid[0], -mid[1]];
        assert_eq!(load_sign(&e, &cloud, LoadTarget::Manifold { a: &opposite, manifold: &m }).unwrap(), 0);
    }
}
