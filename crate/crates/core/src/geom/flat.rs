use nalgebra::DMatrix;

use super::{dot, norm2, sub};
use crate::{tol, ReconError, Result};

/// An affine subspace given by a base point and an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Flat {
    base: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl Flat {
    /// Validates that `basis` is orthonormal and matches the dimension of `base`.
    pub fn new(base: Vec<f64>, basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = base.len();
        if n == 0 {
            return Err(ReconError::InvalidInput("flat base point is empty".into()));
        }
        if basis.len() > n {
            return Err(ReconError::InvalidInput(format!(
                "{} basis vectors in R^{n}",
                basis.len()
            )));
        }
        for (i, u) in basis.iter().enumerate() {
            if u.len() != n {
                return Err(ReconError::InvalidInput("basis vector has wrong dimension".into()));
            }
            for (j, v) in basis.iter().enumerate().take(i + 1) {
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot(u, v) - target).abs() > tol::ORTHONORMAL {
                    return Err(ReconError::InvalidInput(format!(
                        "basis is not orthonormal (entry ({i},{j}) = {})",
                        dot(u, v)
                    )));
                }
            }
        }
        Ok(Self { base, basis })
    }

    pub(crate) fn from_parts(base: Vec<f64>, basis: Vec<Vec<f64>>) -> Self {
        Self { base, basis }
    }

    /// Affine hull of a set of points. The basis spans the edge vectors from
    /// the first point; directions below `1e-12` of the largest edge are dropped.
    pub fn through(points: &[&[f64]]) -> Self {
        let base = points[0].to_vec();
        let edges: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, &base)).collect();
        let scale = edges.iter().map(|e| norm2(e).sqrt()).fold(0.0, f64::max);
        let basis = orthonormalize(&edges, 1e-12 * scale);
        Self { base, basis }
    }

    /// Flat through `base` spanned by the given (not necessarily orthonormal) directions.
    pub fn spanned(base: &[f64], directions: &[Vec<f64>]) -> Self {
        let scale = directions.iter().map(|e| norm2(e).sqrt()).fold(0.0, f64::max);
        Self { base: base.to_vec(), basis: orthonormalize(directions, 1e-12 * scale) }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Same directions, different base point.
    pub fn translated_to(&self, base: &[f64]) -> Self {
        Self { base: base.to_vec(), basis: self.basis.clone() }
    }

    /// Coordinates of the projection of `x` in the flat's basis.
    pub fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        let v = sub(x, &self.base);
        self.basis.iter().map(|u| dot(u, &v)).collect()
    }

    /// Ambient point with the given flat coordinates.
    pub fn lift(&self, local: &[f64]) -> Vec<f64> {
        let mut p = self.base.clone();
        for (u, &t) in self.basis.iter().zip(local) {
            for (pi, ui) in p.iter_mut().zip(u) {
                *pi += t * ui;
            }
        }
        p
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.lift(&self.coordinates(x))
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        super::dist(x, &self.project(x))
    }

    /// Basis as an `N x k` matrix.
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        let n = self.ambient_dim();
        DMatrix::from_fn(n, self.dim(), |i, j| self.basis[j][i])
    }
}

/// Orthogonal projection of `x` onto `flat`.
pub fn project_onto_flat(flat: &Flat, x: &[f64]) -> Vec<f64> {
    flat.project(x)
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
fn orthonormalize(vectors: &[Vec<f64>], drop_below: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &basis {
                let c = dot(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        let len = norm2(&w).sqrt();
        if len > drop_below && len > 0.0 {
            basis.push(w.into_iter().map(|x| x / len).collect());
        }
    }
    basis
}
