use serde::{Deserialize, Serialize};

use crate::{ReconError, Result};

/// Indexed points in R^N stored contiguously.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CloudJson {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(ReconError::InvalidInput("ambient dimension must be >= 1".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(ReconError::InvalidInput(format!(
                "{} coordinates cannot be split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|x| !x.is_finite()) {
            return Err(ReconError::InvalidInput(format!(
                "non-finite coordinate in point {}",
                pos / dim
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.len())
            .ok_or_else(|| ReconError::InvalidInput("empty point list".into()))?;
        if let Some(i) = points.iter().position(|p| p.len() != dim) {
            return Err(ReconError::InvalidInput(format!(
                "point {i} has dimension {} but expected {dim}",
                points[i].len()
            )));
        }
        Self::new(dim, points.concat())
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, coords: Vec::new() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn set_point(&mut self, i: usize, p: &[f64]) {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        self.coords[i * self.dim..(i + 1) * self.dim].copy_from_slice(p);
    }

    pub fn push(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        self.coords.extend_from_slice(p);
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn gather(&self, indices: &[usize]) -> Vec<&[f64]> {
        indices.iter().map(|&i| self.point(i)).collect()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.points().map(|p| p.to_vec()).collect()
    }

    /// Serialize as `{"dim": N, "points": [[...], ...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&CloudJson { dim: self.dim, points: self.to_vecs() })
            .expect("cloud serialization cannot fail")
    }
}
