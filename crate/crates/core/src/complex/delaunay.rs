use super::Simplex;
use crate::geom::{circumsphere, dist2, dot, sub, Flat, PointCloud};
use crate::optimize::lp::{solve_standard, LpLimits, LpStatus, StandardLp};
use crate::sparse::CscMatrix;
use crate::{tol, ReconError, Result};

/// True if no point of `points` lies strictly inside the circumsphere of the
/// full-dimensional simplex `vertices` (both given in the same coordinates).
/// Points closer than `1e-9 R^2` in power to the sphere count as on it.
pub fn is_locally_delaunay(vertices: &[&[f64]], points: &[&[f64]]) -> Result<bool> {
    let dim = vertices[0].len();
    if vertices.len() != dim + 1 {
        return Err(ReconError::InvalidInput(format!(
            "{} vertices do not span a full-dimensional simplex in R^{dim}",
            vertices.len()
        )));
    }
    let s = circumsphere(vertices)?;
    let r2 = s.radius * s.radius;
    let slack = tol::POWER * r2;
    Ok(points.iter().all(|q| dist2(q, &s.center) >= r2 - slack))
}

/// Delaunay test of `sigma` among all other points of `cloud`, after
/// orthogonal projection onto `within`.
pub fn delaunay_membership(sigma: &Simplex, cloud: &PointCloud, within: &Flat) -> Result<bool> {
    if sigma.vertices().len() != within.dim() + 1 {
        return Err(ReconError::InvalidInput(format!(
            "a {}-simplex is not full-dimensional in a {}-flat",
            sigma.dim(),
            within.dim()
        )));
    }
    let local_vertices: Vec<Vec<f64>> =
        sigma.vertices().iter().map(|&v| within.coordinates(cloud.point(v))).collect();
    let local_points: Vec<Vec<f64>> = (0..cloud.len())
        .filter(|i| !sigma.contains_vertex(*i))
        .map(|i| within.coordinates(cloud.point(i)))
        .collect();
    let vrefs: Vec<&[f64]> = local_vertices.iter().map(|v| v.as_slice()).collect();
    let prefs: Vec<&[f64]> = local_points.iter().map(|v| v.as_slice()).collect();
    is_locally_delaunay(&vrefs, &prefs)
}

/// Whether some (N-1)-sphere through the vertices of `sigma` has none of the
/// `competitors` strictly inside.
///
/// Centers of circumscribing spheres form the flat `Z + normal space`; each
/// competitor cuts it with one half-space, so the test is a feasibility LP
/// in the normal coordinates (solved in closed form for codimension <= 1).
pub fn has_empty_circumsphere(cloud: &PointCloud, sigma: &Simplex, competitors: &[usize]) -> Result<bool> {
    let verts = cloud.gather(sigma.vertices());
    let sphere = circumsphere(&verts)?;
    let r2 = sphere.radius * sphere.radius;
    let slack = tol::POWER * r2;
    let normals = normal_basis(&verts);
    // each row: (a, p) meaning 2 a.t <= p
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for &q in competitors {
        if sigma.contains_vertex(q) {
            continue;
        }
        let rel = sub(cloud.point(q), &sphere.center);
        let power = dot(&rel, &rel) - r2 + slack;
        let a: Vec<f64> = normals.iter().map(|n| dot(n, &rel)).collect();
        rows.push((a, power));
    }
    if rows.iter().all(|(_, p)| *p >= 0.0) {
        return Ok(true);
    }
    match normals.len() {
        0 => Ok(false),
        1 => {
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for (a, p) in &rows {
                let a = a[0];
                if a > 0.0 {
                    hi = hi.min(p / (2.0 * a));
                } else if a < 0.0 {
                    lo = lo.max(p / (2.0 * a));
                } else if *p < 0.0 {
                    return Ok(false);
                }
            }
            Ok(lo <= hi)
        }
        m => Ok(halfspaces_feasible(&rows, m)),
    }
}

/// Orthonormal basis of the orthogonal complement of the simplex's direction space.
fn normal_basis(verts: &[&[f64]]) -> Vec<Vec<f64>> {
    let aff = Flat::through(verts);
    let n = aff.ambient_dim();
    let mut basis: Vec<Vec<f64>> = aff.basis().to_vec();
    let k = basis.len();
    for i in 0..n {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        for _ in 0..2 {
            for u in &basis {
                let c = dot(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        let len = dot(&w, &w).sqrt();
        if len > 1e-6 {
            basis.push(w.into_iter().map(|x| x / len).collect());
        }
        if basis.len() == n {
            break;
        }
    }
    basis.split_off(k)
}

/// Feasibility of `{t : 2 a_i . t <= p_i}` through a phase-one LP with split
/// free variables and one slack per row.
fn halfspaces_feasible(rows: &[(Vec<f64>, f64)], m: usize) -> bool {
    let nrows = rows.len();
    let ncols = 2 * m + nrows;
    let mut triplets = Vec::new();
    let mut b = Vec::with_capacity(nrows);
    for (i, (a, p)) in rows.iter().enumerate() {
        let sign = if *p < 0.0 { -1.0 } else { 1.0 };
        for (k, &ak) in a.iter().enumerate() {
            triplets.push((i, k, sign * 2.0 * ak));
            triplets.push((i, m + k, -sign * 2.0 * ak));
        }
        triplets.push((i, 2 * m + i, sign));
        b.push(sign * p);
    }
    let lp = StandardLp { cost: vec![0.0; ncols], a: CscMatrix::from_triplets(nrows, ncols, &triplets), b };
    solve_standard(&lp, &LpLimits::default()).is_ok_and(|s| s.status == LpStatus::Optimal)
}
