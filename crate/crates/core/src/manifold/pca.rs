use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::geom::{dist2, Flat, PointCloud};
use crate::{ReconError, Result};

/// Tangent estimate with its spectrum.
#[derive(Clone, Debug)]
pub struct PcaEstimate {
    pub flat: Flat,
    /// Eigenvalues of the inertia tensor, largest first.
    pub eigenvalues: Vec<f64>,
    pub neighbors: usize,
    /// `lambda_d - lambda_{d+1} < 1e-12`: the estimated plane is not well defined.
    pub degenerate_spectrum: bool,
}

#[derive(Serialize)]
struct Summary<'a> {
    eigenvalues: &'a [f64],
    neighbors: usize,
    degenerate_spectrum: bool,
}

impl PcaEstimate {
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::to_value(Summary {
            eigenvalues: &self.eigenvalues,
            neighbors: self.neighbors,
            degenerate_spectrum: self.degenerate_spectrum,
        })
        .expect("serializable")
    }
}

/// Flat through sample `p0` spanned by the top `d` eigenvectors of the
/// centered inertia tensor of the samples in the closed ball `B(p0, rho)`.
pub fn pca_tangent(cloud: &PointCloud, p0: usize, rho: f64, d: usize) -> Result<Flat> {
    Ok(pca_tangent_detailed(cloud, p0, rho, d)?.flat)
}

pub fn pca_tangent_detailed(cloud: &PointCloud, p0: usize, rho: f64, d: usize) -> Result<PcaEstimate> {
    if p0 >= cloud.len() {
        return Err(ReconError::NotFound(vec![p0]));
    }
    let n = cloud.dim();
    if d == 0 || d > n {
        return Err(ReconError::InvalidInput(format!("tangent dimension {d} must lie in 1..={n}")));
    }
    let center = cloud.point(p0);
    let ball: Vec<&[f64]> = cloud.points().filter(|p| dist2(p, center) <= rho * rho).collect();
    if ball.len() < d + 1 {
        return Err(ReconError::InsufficientNeighbors { found: ball.len(), needed: d + 1 });
    }
    let k = ball.len() as f64;
    let mean: Vec<f64> = (0..n).map(|i| ball.iter().map(|p| p[i]).sum::<f64>() / k).collect();
    let mut inertia = DMatrix::<f64>::zeros(n, n);
    for p in &ball {
        for i in 0..n {
            let di = p[i] - mean[i];
            for j in 0..=i {
                inertia[(i, j)] += di * (p[j] - mean[j]);
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            inertia[(j, i)] = inertia[(i, j)];
        }
    }
    let eig = SymmetricEigen::new(inertia);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let basis: Vec<Vec<f64>> = order[..d]
        .iter()
        .map(|&c| {
            let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            v
        })
        .collect();
    let degenerate_spectrum = d < n && eigenvalues[d - 1] - eigenvalues[d] < 1e-12;
    Ok(PcaEstimate {
        flat: Flat::from_parts(center.to_vec(), basis),
        eigenvalues,
        neighbors: ball.len(),
        degenerate_spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::principal_angle;
    use crate::manifold::AnalyticManifold;

    #[test]
    fn collinear_points_give_their_line() {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let cloud = PointCloud::from_points(&pts).unwrap();
        let f = pca_tangent(&cloud, 2, 10.0, 1).unwrap();
        let truth = Flat::through(&[&[0.0, 0.0], &[1.0, 2.0]]);
        assert!(principal_angle(&f, &truth) < 1e-12);
        assert!(f.basis()[0][0] > 0.0);
        assert_eq!(f.base(), cloud.point(2));
    }

    #[test]
    fn insufficient_neighbors() {
        let cloud = PointCloud::from_points(&[vec![0.0, 0.0], vec![5.0, 0.0]]).unwrap();
        assert!(matches!(
            pca_tangent(&cloud, 0, 1.0, 1),
            Err(ReconError::InsufficientNeighbors { found: 1, needed: 2 })
        ));
    }

    #[test]
    fn circle_tangent_within_pi_over_8() {
        let n = 200;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let cloud = PointCloud::from_points(&pts).unwrap();
        let m = AnalyticManifold::circle(1.0);
        for p0 in [0, 17, 150] {
            let f = pca_tangent(&cloud, p0, 0.3, 1).unwrap();
            let a = principal_angle(&f, &m.tangent_at(cloud.point(p0)));
            assert!(a < std::f64::consts::PI / 8.0);
        }
    }

    #[test]
    fn tiny_noise_plane() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec<f64>> = (0..100)
            .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1e-6..1e-6)])
            .collect();
        let cloud = PointCloud::from_points(&pts).unwrap();
        let est = pca_tangent_detailed(&cloud, 0, 3.0, 2).unwrap();
        let plane = Flat::new(vec![0.0; 3], vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert!(principal_angle(&est.flat, &plane) < 1e-3);
        assert!(!est.degenerate_spectrum);
    }
}
