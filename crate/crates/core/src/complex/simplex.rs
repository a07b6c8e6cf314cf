use std::fmt;

use serde::{Serialize, Serializer};

use crate::{ReconError, Result};

/// An abstract simplex: a strictly increasing list of vertex indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts the vertices; duplicates are rejected.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(ReconError::InvalidInput("a simplex needs at least one vertex".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(ReconError::InvalidInput(format!("repeated vertex in {vertices:?}")));
        }
        Ok(Self(vertices))
    }

    /// Caller guarantees `vertices` is strictly increasing.
    pub fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]), "unsorted simplex {vertices:?}");
        Self(vertices)
    }

    pub fn vertex(v: usize) -> Self {
        Self(vec![v])
    }

    pub fn edge(a: usize, b: usize) -> Self {
        Self(if a < b { vec![a, b] } else { vec![b, a] })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    #[inline]
    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// True if every vertex of `face` is a vertex of `self`.
    pub fn has_face(&self, face: &Simplex) -> bool {
        let mut it = self.0.iter();
        face.0.iter().all(|v| it.by_ref().any(|w| w == v))
    }

    /// The facet with the `i`-th vertex removed.
    pub fn facet(&self, i: usize) -> Simplex {
        let mut v = self.0.clone();
        v.remove(i);
        Simplex(v)
    }

    /// Facets with their boundary signs `(-1)^i`.
    pub fn boundary_faces(&self) -> impl Iterator<Item = (Simplex, f64)> + '_ {
        (0..self.0.len()).map(move |i| (self.facet(i), if i % 2 == 0 { 1.0 } else { -1.0 }))
    }

    /// All non-empty faces, including `self`.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        assert!(n < 32, "simplex too large to enumerate faces");
        (1u32..(1u32 << n))
            .map(|mask| Simplex((0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.0[i]).collect()))
            .collect()
    }

    /// Faces of exactly dimension `k`.
    pub fn faces_of_dim(&self, k: usize) -> Vec<Simplex> {
        self.faces().into_iter().filter(|f| f.dim() == k).collect()
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Serialize for Simplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl From<Simplex> for Vec<usize> {
    fn from(s: Simplex) -> Self {
        s.0
    }
}

/// A simplex together with an orientation relative to its sorted vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrientedSimplex {
    pub simplex: Simplex,
    pub sign: i8,
}

impl OrientedSimplex {
    pub fn new(simplex: Simplex, sign: i8) -> Self {
        assert!(sign == 1 || sign == -1, "orientation sign must be +-1");
        Self { simplex, sign }
    }

    /// Orientation given by an explicit vertex ordering; the sign is the
    /// parity of the permutation that sorts it.
    pub fn from_ordering(order: &[usize]) -> Result<Self> {
        let simplex = Simplex::new(order.to_vec())?;
        Ok(Self { simplex, sign: permutation_sign(order) })
    }

    /// A vertex ordering realizing this orientation: sorted, with the last two
    /// vertices swapped when the sign is negative.
    pub fn ordering(&self) -> Vec<usize> {
        let mut v = self.simplex.vertices().to_vec();
        if self.sign < 0 {
            let n = v.len();
            assert!(n >= 2, "a vertex has no negative orientation");
            v.swap(n - 2, n - 1);
        }
        v
    }

    pub fn reversed(&self) -> Self {
        Self { simplex: self.simplex.clone(), sign: -self.sign }
    }
}

/// Parity of the permutation sorting `order` (+1 even, -1 odd).
pub fn permutation_sign(order: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorting_and_parity() {
        let s = OrientedSimplex::from_ordering(&[2, 0, 1]).unwrap();
        assert_eq!(s.simplex.vertices(), &[0, 1, 2]);
        assert_eq!(s.sign, 1);
        let t = OrientedSimplex::from_ordering(&[1, 0, 2]).unwrap();
        assert_eq!(t.sign, -1);
        assert_eq!(OrientedSimplex::from_ordering(&t.ordering()).unwrap(), t);
        assert!(Simplex::new(vec![1, 1]).is_err());
    }

    #[test]
    fn faces() {
        let s = Simplex::new(vec![0, 1, 2]).unwrap();
        assert_eq!(s.faces().len(), 7);
        assert_eq!(s.faces_of_dim(1).len(), 3);
        assert!(s.has_face(&Simplex::edge(0, 2)));
        assert!(!s.has_face(&Simplex::edge(0, 3)));
        let b: Vec<_> = s.boundary_faces().collect();
        assert_eq!(b[0], (Simplex::edge(1, 2), 1.0));
        assert_eq!(b[1], (Simplex::edge(0, 2), -1.0));
        assert_eq!(b[2], (Simplex::edge(0, 1), 1.0));
    }
}
