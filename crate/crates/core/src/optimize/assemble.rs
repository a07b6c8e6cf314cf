use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::load::{load_sign, LoadTarget};
use super::lp::{solve_standard, LpLimits, LpSolution, StandardLp};
use super::weight::WeightTable;
use crate::complex::{restrict_near_dim, Chain, Simplex, SimplicialComplex};
use crate::geom::{Flat, PointCloud};
use crate::manifold::{uniform_in_ball, AnalyticManifold};
use crate::sparse::CscMatrix;
use crate::{ReconError, Result};

/// The point and reference at which the load constraint `load = 1` is imposed.
#[derive(Clone, Debug)]
pub enum Normalization {
    /// Load on the manifold at `m0`, over all of `K`.
    Manifold { manifold: AnalyticManifold, m0: Vec<f64> },
    /// Load on `flat` at `x`, over the `d`-simplices whose hull meets `B(x, radius)`.
    Flat { x: Vec<f64>, flat: Flat, radius: f64 },
}

#[derive(Clone, Debug)]
pub struct AssembleOptions {
    /// Radius of the uniform jitter applied to the load point on a re-draw.
    pub jitter: f64,
    pub max_attempts: usize,
    pub seed: u64,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self { jitter: 0.0, max_attempts: 50, seed: 0 }
    }
}

/// Standard-form LP for the chain problem. Variable `j` is `x+` of the `j`-th
/// `d`-simplex and `n + j` its `x-`; rows are the `(d-1)`-faces followed by
/// the load row.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub lp: StandardLp,
    pub d: usize,
    pub simplices: Vec<Simplex>,
    pub faces: Vec<Simplex>,
    /// Load coefficient of each positively oriented `d`-simplex.
    pub load_signs: Vec<i8>,
    /// Load point actually used, after any genericity re-draws.
    pub load_point: Vec<f64>,
    pub attempts: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProblemSummary {
    pub variables: usize,
    pub rows: usize,
    pub nonzeros: usize,
    pub simplices: usize,
    pub load_hits: usize,
    pub normalization_attempts: usize,
}

impl LpProblem {
    pub fn plus_index(&self, j: usize) -> usize {
        j
    }

    pub fn minus_index(&self, j: usize) -> usize {
        self.simplices.len() + j
    }

    pub fn load_row(&self) -> usize {
        self.faces.len()
    }

    /// `gamma = x+ - x-` as a chain.
    pub fn chain_from_x(&self, x: &[f64]) -> Chain {
        let n = self.simplices.len();
        Chain::from_entries(self.d, self.simplices.iter().enumerate().map(|(j, s)| (s.clone(), x[j] - x[n + j])))
    }

    /// `sum gamma(sigma) load_sign(sigma)` using the stored load coefficients.
    pub fn load_of(&self, chain: &Chain) -> f64 {
        self.simplices
            .iter()
            .zip(&self.load_signs)
            .filter(|(_, &s)| s != 0)
            .map(|(sigma, &s)| chain.get(sigma) * f64::from(s))
            .sum()
    }

    pub fn summary(&self) -> ProblemSummary {
        ProblemSummary {
            variables: self.lp.n_vars(),
            rows: self.lp.n_rows(),
            nonzeros: self.lp.a.nnz(),
            simplices: self.simplices.len(),
            load_hits: self.load_signs.iter().filter(|&&s| s != 0).count(),
            normalization_attempts: self.attempts,
        }
    }
}

/// Builds `min sum w |gamma|` subject to `boundary gamma = 0`, `load gamma = 1`
/// over the `d`-simplices of `k`. A load point that falls within the genericity
/// margin of a projected face, or covers nothing, is re-drawn with jitter.
pub fn assemble_problem(
    k: &SimplicialComplex,
    cloud: &PointCloud,
    d: usize,
    weights: &WeightTable,
    normalization: &Normalization,
    options: &AssembleOptions,
) -> Result<LpProblem> {
    if d == 0 {
        return Err(ReconError::InvalidInput("chains of vertices are not supported".into()));
    }
    let simplices: Vec<Simplex> = k.simplices(d).to_vec();
    if simplices.is_empty() {
        return Err(ReconError::NoCandidates);
    }
    let cost_half: Vec<f64> = simplices
        .iter()
        .map(|s| weights.get(s).ok_or_else(|| ReconError::MissingWeight(s.vertices().to_vec())))
        .collect::<Result<_>>()?;

    let eligible: Vec<bool> = match normalization {
        Normalization::Manifold { .. } => vec![true; simplices.len()],
        Normalization::Flat { x, radius, .. } => {
            let near: std::collections::HashSet<Simplex> =
                restrict_near_dim(k, cloud, d, x, *radius).into_iter().collect();
            simplices.iter().map(|s| near.contains(s)).collect()
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut attempts = 0;
    let (load_signs, load_point) = loop {
        if attempts >= options.max_attempts.max(1) {
            return Err(ReconError::DegenerateNormalization { attempts });
        }
        let point = load_point(normalization, attempts, options.jitter, &mut rng);
        attempts += 1;
        let signs: Result<Vec<i8>> = simplices
            .par_iter()
            .zip(&eligible)
            .map(|(s, &ok)| {
                if !ok {
                    return Ok(0);
                }
                let target = match normalization {
                    Normalization::Manifold { manifold, .. } => LoadTarget::Manifold { a: &point, manifold },
                    Normalization::Flat { flat, .. } => LoadTarget::Flat { a: &point, flat },
                };
                load_sign(s, cloud, target)
            })
            .collect();
        match signs {
            Ok(signs) if signs.iter().any(|&s| s != 0) => break (signs, point),
            Ok(_) | Err(ReconError::GenericityViolation { .. }) => continue,
            Err(e) => return Err(e),
        }
    };

    let mut face_index: HashMap<&Simplex, usize> = HashMap::new();
    let mut faces: Vec<Simplex> = Vec::new();
    for (i, f) in k.simplices(d - 1).iter().enumerate() {
        if !k.cofacet_indices(d - 1, i).is_empty() {
            face_index.insert(f, faces.len());
            faces.push(f.clone());
        }
    }
    let n = simplices.len();
    let load_row = faces.len();
    let mut triplets = Vec::with_capacity(2 * n * (d + 2));
    for (j, s) in simplices.iter().enumerate() {
        for (face, sign) in s.boundary_faces() {
            let r = face_index[&face];
            triplets.push((r, j, sign));
            triplets.push((r, n + j, -sign));
        }
        if load_signs[j] != 0 {
            let l = f64::from(load_signs[j]);
            triplets.push((load_row, j, l));
            triplets.push((load_row, n + j, -l));
        }
    }
    let mut b = vec![0.0; load_row + 1];
    b[load_row] = 1.0;
    let cost = cost_half.iter().chain(&cost_half).copied().collect();
    let lp = StandardLp { cost, a: CscMatrix::from_triplets(load_row + 1, 2 * n, &triplets), b };
    Ok(LpProblem { lp, d, simplices, faces, load_signs, load_point, attempts })
}

fn load_point(normalization: &Normalization, attempt: usize, jitter: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match normalization {
        Normalization::Flat { x, flat, .. } => {
            let base = flat.project(x);
            if attempt == 0 || jitter == 0.0 {
                return base;
            }
            let u = uniform_in_ball(rng, flat.dim(), jitter);
            let c: Vec<f64> = flat.coordinates(&base).iter().zip(&u).map(|(a, b)| a + b).collect();
            flat.lift(&c)
        }
        Normalization::Manifold { manifold, m0 } => {
            let base = manifold.project(m0);
            if attempt == 0 || jitter == 0.0 {
                return base;
            }
            let t = manifold.tangent_at(&base);
            let u = uniform_in_ball(rng, t.dim(), jitter);
            manifold.project(&t.lift(&u))
        }
    }
}

pub fn solve_lp(problem: &LpProblem, limits: &LpLimits) -> Result<LpSolution> {
    solve_standard(&problem.lp, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::rips_complex;
    use crate::optimize::lp::LpStatus;

    fn octagon() -> PointCloud {
        let pts: Vec<Vec<f64>> = (0..8)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / 4.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        PointCloud::from_points(&pts).unwrap()
    }

    #[test]
    fn octagon_problem_shape_and_solution() {
        let cloud = octagon();
        let k = rips_complex(&cloud, 0.4, 1);
        assert_eq!(k.count(1), 8);
        let w = WeightTable::compute(&k, &cloud, 1);
        let norm = Normalization::Manifold { manifold: AnalyticManifold::circle(1.0), m0: vec![0.3_f64.cos(), 0.3_f64.sin()] };
        let p = assemble_problem(&k, &cloud, 1, &w, &norm, &AssembleOptions::default()).unwrap();
        assert_eq!((p.lp.n_vars(), p.lp.n_rows()), (16, 9));
        let sol = solve_lp(&p, &LpLimits::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        let total: f64 = w.iter().map(|(_, x)| x).sum();
        assert!((sol.objective - total).abs() < 1e-12 * total.max(1.0) + 1e-12);
    }

    #[test]
    fn single_simplex_problem() {
        let cloud = PointCloud::from_points(&[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let k = SimplicialComplex::from_simplices(2, [Simplex::edge(0, 1)]);
        let w = WeightTable::compute(&k, &cloud, 1);
        let flat = Flat::new(vec![0.0, 0.0], vec![vec![-1.0, 0.0]]).unwrap();
        let norm = Normalization::Flat { x: vec![0.7, 0.0], flat, radius: 1.0 };
        let p = assemble_problem(&k, &cloud, 1, &w, &norm, &AssembleOptions::default()).unwrap();
        assert_eq!(p.load_signs, vec![-1]);
        // a lone simplex is never a cycle
        let sol = solve_lp(&p, &LpLimits::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn open_arc_is_infeasible() {
        let cloud = octagon();
        let edges = (0..5).map(|i| Simplex::edge(i, i + 1));
        let k = SimplicialComplex::from_simplices(8, edges);
        let w = WeightTable::compute(&k, &cloud, 1);
        let norm = Normalization::Manifold { manifold: AnalyticManifold::circle(1.0), m0: vec![0.3_f64.cos(), 0.3_f64.sin()] };
        let p = assemble_problem(&k, &cloud, 1, &w, &norm, &AssembleOptions::default()).unwrap();
        assert_eq!(solve_lp(&p, &LpLimits::default()).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn uncovered_point_exhausts_attempts() {
        let cloud = octagon();
        let k = SimplicialComplex::from_simplices(8, [Simplex::edge(0, 1)]);
        let w = WeightTable::compute(&k, &cloud, 1);
        let norm = Normalization::Manifold { manifold: AnalyticManifold::circle(1.0), m0: vec![-1.0, 0.0] };
        let opts = AssembleOptions { jitter: 0.01, max_attempts: 5, seed: 1 };
        assert!(matches!(
            assemble_problem(&k, &cloud, 1, &w, &norm, &opts),
            Err(ReconError::DegenerateNormalization { attempts: 5 })
        ));
    }
}
