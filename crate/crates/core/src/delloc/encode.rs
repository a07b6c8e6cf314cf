use std::collections::{HashMap, VecDeque};

use crate::complex::{Chain, OrientedSimplex, Simplex};
use crate::geom::PointCloud;
use crate::manifold::{simplex_sign, AnalyticManifold};
use crate::Result;

/// The chain with coefficient `+1` or `-1` on each simplex, chosen so that
/// each simplex agrees with the tangent orientation of `manifold` at the
/// projection of its barycenter.
pub fn encode_chain(simplices: &[Simplex], cloud: &PointCloud, manifold: &AnalyticManifold) -> Result<Chain> {
    let d = simplices.first().map_or(0, Simplex::dim);
    let mut chain = Chain::zero(d);
    for s in simplices {
        let verts = cloud.gather(s.vertices());
        let k = verts.len() as f64;
        let bary: Vec<f64> = (0..cloud.dim()).map(|i| verts.iter().map(|v| v[i]).sum::<f64>() / k).collect();
        let sign = simplex_sign(&OrientedSimplex::new(s.clone(), 1), cloud, &manifold.tangent_at(&bary))?;
        chain.add(s.clone(), f64::from(sign));
    }
    Ok(chain)
}

/// Orients `simplices` by propagating across faces shared by exactly two of
/// them, starting with `+1` on the first simplex of each component. The flag
/// is false when some shared face receives the same induced orientation from
/// both sides.
pub fn encode_chain_coherent(simplices: &[Simplex]) -> (Chain, bool) {
    let d = simplices.first().map_or(0, Simplex::dim);
    let mut by_face: HashMap<Simplex, Vec<(usize, f64)>> = HashMap::new();
    for (i, s) in simplices.iter().enumerate() {
        for (f, c) in s.boundary_faces() {
            by_face.entry(f).or_default().push((i, c));
        }
    }
    let mut sign = vec![0.0; simplices.len()];
    let mut coherent = true;
    let mut queue = VecDeque::new();
    for start in 0..simplices.len() {
        if sign[start] != 0.0 {
            continue;
        }
        sign[start] = 1.0;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            for (f, c) in simplices[i].boundary_faces() {
                let incident = &by_face[&f];
                if incident.len() != 2 {
                    continue;
                }
                let &(j, cj) = incident.iter().find(|(j, _)| *j != i).expect("two incident simplices");
                let want = -sign[i] * c / cj;
                if sign[j] == 0.0 {
                    sign[j] = want;
                    queue.push_back(j);
                } else if sign[j] != want {
                    coherent = false;
                }
            }
        }
    }
    (Chain::from_entries(d, simplices.iter().cloned().zip(sign)), coherent)
}
