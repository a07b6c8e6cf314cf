use indexmap::IndexMap;

use super::{OrientedSimplex, Simplex};
use crate::tol;

/// A sparse real d-chain. Coefficients refer to the sorted-vertex orientation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Chain {
    dim: usize,
    entries: IndexMap<Simplex, f64>,
}

impl Chain {
    pub fn zero(dim: usize) -> Self {
        Self { dim, entries: IndexMap::new() }
    }

    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (Simplex, f64)>) -> Self {
        let mut c = Self::zero(dim);
        for (s, v) in entries {
            c.add(s, v);
        }
        c
    }

    /// The elementary chain of an oriented simplex.
    pub fn elementary(s: &OrientedSimplex) -> Self {
        Self::from_entries(s.simplex.dim(), [(s.simplex.clone(), f64::from(s.sign))])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, s: &Simplex) -> f64 {
        self.entries.get(s).copied().unwrap_or(0.0)
    }

    /// Adds `value` to the coefficient of `s`, pruning near-zero results.
    pub fn add(&mut self, s: Simplex, value: f64) {
        assert_eq!(s.dim(), self.dim, "simplex {s:?} has the wrong dimension for this chain");
        if let Some(e) = self.entries.get_mut(&s) {
            *e += value;
            if e.abs() < tol::CHAIN_ZERO {
                self.entries.shift_remove(&s);
            }
        } else if value.abs() >= tol::CHAIN_ZERO {
            self.entries.insert(s, value);
        }
    }

    /// Coefficient for an oriented simplex, applying its sign.
    pub fn add_oriented(&mut self, s: &OrientedSimplex, value: f64) {
        self.add(s.simplex.clone(), value * f64::from(s.sign));
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, f64)> {
        self.entries.iter().map(|(s, &v)| (s, v))
    }

    pub fn support(&self) -> Vec<Simplex> {
        let mut v: Vec<Simplex> = self.entries.keys().cloned().collect();
        v.sort();
        v
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self::from_entries(self.dim, self.iter().map(|(s, v)| (s.clone(), t * v)))
    }

    pub fn plus(&self, other: &Chain) -> Self {
        assert_eq!(self.dim, other.dim, "adding chains of different dimension");
        let mut out = self.clone();
        for (s, v) in other.iter() {
            out.add(s.clone(), v);
        }
        out
    }

    /// Boundary operator; the boundary of a 0-chain is the zero 0-chain.
    pub fn boundary(&self) -> Chain {
        if self.dim == 0 {
            return Chain::zero(0);
        }
        let mut out = Chain::zero(self.dim - 1);
        for (s, v) in self.iter() {
            for (face, sign) in s.boundary_faces() {
                out.add(face, sign * v);
            }
        }
        out
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Entries in sorted simplex order.
    pub fn sorted_entries(&self) -> Vec<(Simplex, f64)> {
        let mut v: Vec<(Simplex, f64)> = self.iter().map(|(s, c)| (s.clone(), c)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}
