use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::Simplex;
use crate::geom::{miniball, KdTree, PointCloud, Sphere};
use crate::manifold::{manifold_probes, probe_points, AnalyticManifold};
use crate::optimize::lp::{solve_standard, LpLimits, LpStatus, StandardLp};
use crate::optimize::{load_sign, LoadTarget};
use crate::sparse::CscMatrix;
use crate::{ReconError, Result};

const OVERLAP_TOL: f64 = 1e-7;

/// Checks that a set of `d`-simplices triangulates `manifold`: the simplices
/// meet properly, stay in a tube around the manifold, close up (every
/// `(d-1)`-face has two cofaces) and cover every probe of the manifold once
/// under the nearest-point projection.
#[derive(Clone, Debug, Serialize)]
pub struct FaithfulnessReport {
    pub simplices: usize,
    pub pairs_checked: usize,
    /// Pairs whose hulls meet outside the hull of their shared vertices.
    pub improper_pairs: Vec<(Simplex, Simplex)>,
    pub undecided_pairs: usize,
    pub embedded: bool,
    pub max_distance: f64,
    pub tube_radius: f64,
    pub close: bool,
    /// `(d-1)`-faces with a number of cofaces other than two.
    pub open_faces: usize,
    pub closed: bool,
    pub probes: usize,
    pub uncovered: usize,
    pub multiply_covered: usize,
    /// Probes on the projection of a lower-dimensional face.
    pub skipped_probes: usize,
    pub covered_once: bool,
    pub faithful: bool,
}

pub fn check_faithfulness(
    simplices: &[Simplex],
    cloud: &PointCloud,
    manifold: &AnalyticManifold,
    tube_radius: f64,
    probes: usize,
) -> Result<FaithfulnessReport> {
    let balls: Vec<Sphere> =
        simplices.iter().map(|s| miniball(&cloud.gather(s.vertices()))).collect::<Result<_>>()?;
    let centers: Vec<Vec<f64>> = balls.iter().map(|b| b.center.clone()).collect();
    let max_r = balls.iter().map(|b| b.radius).fold(0.0, f64::max);
    let tree = KdTree::from_points(cloud.dim(), &centers);

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..simplices.len() {
        for j in tree.within(&centers[i], balls[i].radius + max_r) {
            if j > i && crate::geom::dist(&centers[i], &centers[j]) <= balls[i].radius + balls[j].radius {
                pairs.push((i, j));
            }
        }
    }
    let outcomes: Vec<Option<bool>> =
        pairs.par_iter().map(|&(i, j)| meets_properly(cloud, &simplices[i], &simplices[j])).collect();
    let improper_pairs: Vec<(Simplex, Simplex)> = pairs
        .iter()
        .zip(&outcomes)
        .filter(|(_, o)| **o == Some(false))
        .map(|(&(i, j), _)| (simplices[i].clone(), simplices[j].clone()))
        .collect();
    let undecided_pairs = outcomes.iter().filter(|o| o.is_none()).count();

    let max_distance = simplices
        .par_iter()
        .map(|s| {
            probe_points(&cloud.gather(s.vertices()), 8, s)
                .iter()
                .map(|p| manifold.distance(p))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);

    let mut cofaces: HashMap<Simplex, usize> = HashMap::new();
    for s in simplices {
        for f in s.faces_of_dim(s.dim().saturating_sub(1)) {
            *cofaces.entry(f).or_default() += 1;
        }
    }
    let open_faces = cofaces.values().filter(|&&c| c != 2).count();

    let points = manifold_probes(manifold, probes);
    let degrees: Vec<Result<Option<usize>>> = points
        .par_iter()
        .map(|m| {
            let target = LoadTarget::Manifold { a: m, manifold };
            let mut count = 0;
            for i in tree.within(m, max_r + tube_radius) {
                match load_sign(&simplices[i], cloud, target) {
                    Ok(0) => {}
                    Ok(_) => count += 1,
                    Err(ReconError::GenericityViolation { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
            Ok(Some(count))
        })
        .collect();
    let (mut uncovered, mut multiply_covered, mut skipped_probes) = (0, 0, 0);
    for d in degrees {
        match d? {
            None => skipped_probes += 1,
            Some(0) => uncovered += 1,
            Some(1) => {}
            Some(_) => multiply_covered += 1,
        }
    }

    let embedded = improper_pairs.is_empty() && undecided_pairs == 0;
    let close = max_distance <= tube_radius && tube_radius < manifold.reach();
    let closed = open_faces == 0;
    let covered_once = uncovered == 0 && multiply_covered == 0 && skipped_probes < points.len();
    Ok(FaithfulnessReport {
        simplices: simplices.len(),
        pairs_checked: pairs.len(),
        improper_pairs,
        undecided_pairs,
        embedded,
        max_distance,
        tube_radius,
        close,
        open_faces,
        closed,
        probes: points.len(),
        uncovered,
        multiply_covered,
        skipped_probes,
        covered_once,
        faithful: embedded && close && closed && covered_once && !simplices.is_empty(),
    })
}

/// Whether `Conv a` and `Conv b` meet only in the hull of their shared
/// vertices: maximizes the barycentric mass on non-shared vertices over
/// common points. `None` when the LP fails numerically.
fn meets_properly(cloud: &PointCloud, a: &Simplex, b: &Simplex) -> Option<bool> {
    let shared: BTreeSet<usize> = a.vertices().iter().filter(|v| b.contains_vertex(**v)).copied().collect();
    let n = cloud.dim();
    let (ka, kb) = (a.vertices().len(), b.vertices().len());
    let mut triplets = Vec::new();
    let mut cost = Vec::with_capacity(ka + kb);
    for (col, (&v, sign)) in a.vertices().iter().map(|v| (v, 1.0)).chain(b.vertices().iter().map(|v| (v, -1.0))).enumerate()
    {
        for (row, &x) in cloud.point(v).iter().enumerate() {
            if x != 0.0 {
                triplets.push((row, col, sign * x));
            }
        }
        triplets.push((if col < ka { n } else { n + 1 }, col, 1.0));
        cost.push(if shared.contains(&v) { 0.0 } else { -1.0 });
    }
    let mut rhs = vec![0.0; n + 2];
    rhs[n] = 1.0;
    rhs[n + 1] = 1.0;
    let lp = StandardLp { cost, a: CscMatrix::from_triplets(n + 2, ka + kb, &triplets), b: rhs };
    match solve_standard(&lp, &LpLimits::default()) {
        Ok(s) if s.status == LpStatus::Optimal => Some(-s.objective <= OVERLAP_TOL),
        Ok(s) if s.status == LpStatus::Infeasible => Some(true),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polygon(n: usize) -> (PointCloud, Vec<Simplex>) {
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        (PointCloud::from_points(&pts).unwrap(), (0..n).map(|i| Simplex::edge(i, (i + 1) % n)).collect())
    }

    #[test]
    fn polygon_is_faithful() {
        let (cloud, edges) = polygon(40);
        let r = check_faithfulness(&edges, &cloud, &AnalyticManifold::circle(1.0), 0.1, 2000).unwrap();
        assert!(r.faithful, "{r:?}");
        assert_eq!(r.pairs_checked, 40);
    }

    #[test]
    fn missing_edge_is_detected() {
        let (cloud, mut edges) = polygon(40);
        edges.remove(7);
        let r = check_faithfulness(&edges, &cloud, &AnalyticManifold::circle(1.0), 0.1, 2000).unwrap();
        assert_eq!(r.open_faces, 2);
        assert!(r.uncovered > 0);
        assert!(!r.faithful);
    }

    #[test]
    fn crossing_edges_are_improper() {
        let cloud = PointCloud::from_points(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(meets_properly(&cloud, &Simplex::edge(0, 1), &Simplex::edge(2, 3)), Some(false));
        assert_eq!(meets_properly(&cloud, &Simplex::edge(0, 2), &Simplex::edge(1, 3)), Some(true));
        assert_eq!(meets_properly(&cloud, &Simplex::edge(0, 2), &Simplex::edge(0, 3)), Some(true));
        let collinear = PointCloud::from_points(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(meets_properly(&collinear, &Simplex::edge(0, 1), &Simplex::edge(0, 2)), Some(false));
    }
}
