use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Chain, Simplex, SimplicialComplex};
use crate::geom::{circumsphere, dist2, simplex_volume, PointCloud};
use crate::{ReconError, Result};

/// `omega = Vol / ((d+1)(d+2)) * sum_{i<j} |a_i - a_j|^2`; zero for degenerate simplices.
pub fn delaunay_weight(sigma: &Simplex, cloud: &PointCloud) -> f64 {
    weight_of_points(&cloud.gather(sigma.vertices()))
}

pub fn weight_of_points(points: &[&[f64]]) -> f64 {
    let d = points.len() - 1;
    if d == 0 {
        return 0.0;
    }
    let vol = simplex_volume(points);
    if vol == 0.0 {
        return 0.0;
    }
    let mut edges = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            edges += dist2(points[i], points[j]);
        }
    }
    vol * edges / ((d + 1) * (d + 2)) as f64
}

/// Delaunay weights of the `d`-simplices of a complex.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightTable {
    weights: HashMap<Simplex, f64>,
}

impl WeightTable {
    pub fn compute(k: &SimplicialComplex, cloud: &PointCloud, d: usize) -> Self {
        let weights = k.simplices(d).par_iter().map(|s| (s.clone(), delaunay_weight(s, cloud))).collect();
        Self { weights }
    }

    pub fn from_map(weights: HashMap<Simplex, f64>) -> Self {
        Self { weights }
    }

    pub fn get(&self, s: &Simplex) -> Option<f64> {
        self.weights.get(s).copied()
    }

    pub fn insert(&mut self, s: Simplex, w: f64) {
        self.weights.insert(s, w);
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, f64)> {
        self.weights.iter().map(|(s, &w)| (s, w))
    }
}

/// Weighted l1 norm `sum omega(sigma) |gamma(sigma)|`.
pub fn energy(chain: &Chain, weights: &WeightTable) -> Result<f64> {
    chain.iter().try_fold(0.0, |acc, (s, c)| {
        let w = weights.get(s).ok_or_else(|| ReconError::MissingWeight(s.vertices().to_vec()))?;
        Ok(acc + w * c.abs())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of `-int_{Conv sigma} Pow(x) dx` with uniform samples
/// of the simplex, the power taken with respect to the circumsphere in `Aff sigma`.
pub fn weight_integral_oracle(sigma: &Simplex, cloud: &PointCloud, samples: usize, seed: u64) -> Result<WeightEstimate> {
    let pts = cloud.gather(sigma.vertices());
    if pts.len() < 2 {
        return Err(ReconError::InvalidInput("weight integral needs at least an edge".into()));
    }
    let sphere = circumsphere(&pts)?;
    let vol = simplex_volume(&pts);
    let offsets: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().zip(&sphere.center).map(|(a, z)| a - z).collect()).collect();
    let r2 = sphere.radius * sphere.radius;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum2) = (0.0, 0.0);
    let mut w = vec![0.0; pts.len()];
    let mut x = vec![0.0; cloud.dim()];
    for _ in 0..samples {
        let mut total = 0.0;
        for wi in w.iter_mut() {
            *wi = -(1.0 - rng.gen::<f64>()).ln();
            total += *wi;
        }
        x.iter_mut().for_each(|v| *v = 0.0);
        for (o, wi) in offsets.iter().zip(&w) {
            let t = wi / total;
            for (xi, oi) in x.iter_mut().zip(o) {
                *xi += t * oi;
            }
        }
        let f = r2 - x.iter().map(|v| v * v).sum::<f64>();
        sum += f;
        sum2 += f * f;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    Ok(WeightEstimate { value: vol * mean, std_error: vol * (var / n).sqrt(), samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let seg = PointCloud::from_points(&[vec![0.0], vec![1.0]]).unwrap();
        assert!((delaunay_weight(&Simplex::edge(0, 1), &seg) - 1.0 / 6.0).abs() < 1e-15);
        let tri = PointCloud::from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let t = Simplex::new(vec![0, 1, 2]).unwrap();
        assert!((delaunay_weight(&t, &tri) - 1.0 / 6.0).abs() < 1e-15);
        let line = PointCloud::from_points(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(delaunay_weight(&t, &line), 0.0);
    }

    #[test]
    fn oracle_agrees_on_segment() {
        let seg = PointCloud::from_points(&[vec![0.0], vec![1.0]]).unwrap();
        let est = weight_integral_oracle(&Simplex::edge(0, 1), &seg, 200_000, 5).unwrap();
        assert!((est.value - 1.0 / 6.0).abs() < 3.0 * est.std_error);
    }

    #[test]
    fn energy_is_weighted_l1() {
        let tri = PointCloud::from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let k = SimplicialComplex::from_simplices(3, [Simplex::new(vec![0, 1, 2]).unwrap()]);
        let w = WeightTable::compute(&k, &tri, 2);
        let s = Simplex::new(vec![0, 1, 2]).unwrap();
        let c = Chain::from_entries(2, [(s.clone(), -1.0)]);
        assert!((energy(&c, &w).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(energy(&Chain::zero(2), &w).unwrap(), 0.0);
        let missing = Chain::from_entries(1, [(Simplex::edge(0, 1), 1.0)]);
        assert!(matches!(energy(&missing, &w), Err(ReconError::MissingWeight(_))));
    }
}
