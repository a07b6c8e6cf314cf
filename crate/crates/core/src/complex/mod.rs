//! Abstract simplicial complexes, oriented simplices, sparse chains and the
//! boundary operator.

mod build;
mod chain;
mod delaunay;
mod matrix;
mod restrict;
mod simplex;

use std::collections::{BTreeSet, HashMap};

pub use build::{cech_complex, delaunay_cech_complex, neighbor_cliques, rips_complex};
pub use chain::Chain;
pub use delaunay::{delaunay_membership, has_empty_circumsphere, is_locally_delaunay};
pub use matrix::{boundary_matrix, chain_to_vector, vector_to_chain};
pub use restrict::{restrict_near, restrict_near_dim};
pub use simplex::{permutation_sign, OrientedSimplex, Simplex};

use crate::{ReconError, Result};

/// A simplicial complex over vertices `0..n_vertices`, bucketed by dimension
/// and closed under taking faces.
#[derive(Clone, Debug, Default)]
pub struct SimplicialComplex {
    n_vertices: usize,
    buckets: Vec<Vec<Simplex>>,
    lookup: Vec<HashMap<Simplex, usize>>,
    /// `cofacets[k][i]` lists indices in bucket `k + 1` of the cofacets of
    /// simplex `i` in bucket `k`.
    cofacets: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    /// The closure of the given simplices. Buckets are sorted lexicographically.
    pub fn from_simplices(n_vertices: usize, simplices: impl IntoIterator<Item = Simplex>) -> Self {
        let mut sets: Vec<BTreeSet<Simplex>> = Vec::new();
        for s in simplices {
            if let Some(&v) = s.vertices().last() {
                assert!(v < n_vertices, "vertex {v} out of range");
            }
            add_closure(&mut sets, s);
        }
        Self::from_sets(n_vertices, sets)
    }

    /// Builds from per-dimension sets that are already closed under faces.
    pub(crate) fn from_closed_sets(n_vertices: usize, sets: Vec<BTreeSet<Simplex>>) -> Self {
        debug_assert!(sets.iter().skip(1).all(|set| set.iter().all(|s| {
            s.boundary_faces().all(|(f, _)| sets[f.dim()].contains(&f))
        })));
        Self::from_sets(n_vertices, sets)
    }

    fn from_sets(n_vertices: usize, mut sets: Vec<BTreeSet<Simplex>>) -> Self {
        while sets.last().is_some_and(|s| s.is_empty()) {
            sets.pop();
        }
        let buckets: Vec<Vec<Simplex>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let lookup: Vec<HashMap<Simplex, usize>> = buckets
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let mut cofacets: Vec<Vec<Vec<usize>>> = buckets.iter().map(|b| vec![Vec::new(); b.len()]).collect();
        for k in 1..buckets.len() {
            for (j, s) in buckets[k].iter().enumerate() {
                for (f, _) in s.boundary_faces() {
                    let i = lookup[k - 1][&f];
                    cofacets[k - 1][i].push(j);
                }
            }
        }
        Self { n_vertices, buckets, lookup, cofacets }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Highest dimension with at least one simplex, `None` if empty.
    pub fn max_dim(&self) -> Option<usize> {
        self.buckets.len().checked_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    /// Simplices of dimension `k` in index order.
    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.buckets.get(k).map_or(&[], |b| b.as_slice())
    }

    pub fn count(&self, k: usize) -> usize {
        self.buckets.get(k).map_or(0, |b| b.len())
    }

    pub fn total_count(&self) -> usize {
        self.buckets.iter().map(|b| b.len()).sum()
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.lookup.get(s.dim())?.get(s).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    pub fn get(&self, k: usize, i: usize) -> &Simplex {
        &self.buckets[k][i]
    }

    /// Cofacets (cofaces one dimension up) of `s`.
    pub fn cofacets(&self, s: &Simplex) -> Result<Vec<&Simplex>> {
        let i = self.index_of(s).ok_or_else(|| ReconError::NotFound(s.vertices().to_vec()))?;
        let k = s.dim();
        Ok(self.cofacets[k][i].iter().map(|&j| &self.buckets[k + 1][j]).collect())
    }

    /// Indices in bucket `dim + 1` of the cofacets of simplex `i` of dimension `dim`.
    pub fn cofacet_indices(&self, dim: usize, i: usize) -> &[usize] {
        self.cofacets.get(dim).and_then(|c| c.get(i)).map_or(&[], |v| v.as_slice())
    }

    /// All simplices strictly containing `s`, sorted by dimension then vertices.
    pub fn cofaces(&self, s: &Simplex) -> Result<Vec<Simplex>> {
        let i = self.index_of(s).ok_or_else(|| ReconError::NotFound(s.vertices().to_vec()))?;
        let mut out = Vec::new();
        let mut frontier: BTreeSet<usize> = BTreeSet::from([i]);
        let mut k = s.dim();
        while k + 1 < self.buckets.len() && !frontier.is_empty() {
            let next: BTreeSet<usize> =
                frontier.iter().flat_map(|&j| self.cofacets[k][j].iter().copied()).collect();
            out.extend(next.iter().map(|&j| self.buckets[k + 1][j].clone()));
            frontier = next;
            k += 1;
        }
        Ok(out)
    }

    /// Faces of every stored simplex are stored.
    pub fn is_closed(&self) -> bool {
        self.buckets.iter().skip(1).all(|b| {
            b.iter().all(|s| s.boundary_faces().all(|(f, _)| self.contains(&f)))
        })
    }

    /// Euler characteristic `sum_k (-1)^k #K^[k]`.
    pub fn euler_characteristic(&self) -> i64 {
        self.buckets
            .iter()
            .enumerate()
            .map(|(k, b)| if k % 2 == 0 { b.len() as i64 } else { -(b.len() as i64) })
            .sum()
    }

    /// Vertex-to-incident-top-simplex lookup for dimension `k`.
    pub fn vertex_star(&self, k: usize) -> HashMap<usize, Vec<usize>> {
        let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, s) in self.simplices(k).iter().enumerate() {
            for &v in s.vertices() {
                map.entry(v).or_default().push(i);
            }
        }
        map
    }

    /// The subcomplex generated by the given simplices of this complex.
    pub fn closure_of<'a>(&self, simplices: impl IntoIterator<Item = &'a Simplex>) -> Self {
        Self::from_simplices(self.n_vertices, simplices.into_iter().cloned())
    }
}

pub(crate) fn add_closure(sets: &mut Vec<BTreeSet<Simplex>>, s: Simplex) {
    let d = s.dim();
    if sets.len() <= d {
        sets.resize_with(d + 1, BTreeSet::new);
    }
    if sets[d].contains(&s) {
        return;
    }
    for f in s.faces() {
        let k = f.dim();
        sets[k].insert(f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    /// Boundary of a tetrahedron: a closed surface.
    fn tetra_surface() -> SimplicialComplex {
        SimplicialComplex::from_simplices(4, [s(&[0, 1, 2]), s(&[0, 1, 3]), s(&[0, 2, 3]), s(&[1, 2, 3])])
    }

    #[test]
    fn closure_and_counts() {
        let k = tetra_surface();
        assert_eq!((k.count(0), k.count(1), k.count(2)), (4, 6, 4));
        assert!(k.is_closed());
        assert_eq!(k.euler_characteristic(), 2);
    }

    #[test]
    fn cofaces_examples() {
        let k = tetra_surface();
        assert_eq!(k.cofaces(&s(&[0, 1])).unwrap().len(), 2);
        assert_eq!(k.cofaces(&s(&[0])).unwrap().len(), 6);
        assert!(matches!(k.cofaces(&s(&[0, 9])), Err(ReconError::NotFound(_))));
        let iso = SimplicialComplex::from_simplices(3, [s(&[0, 1]), s(&[2])]);
        assert!(iso.cofaces(&s(&[2])).unwrap().is_empty());
        // cone over a square: apex 4 over the cycle 0-1-2-3
        let cone = SimplicialComplex::from_simplices(
            5,
            [s(&[0, 1, 4]), s(&[1, 2, 4]), s(&[2, 3, 4]), s(&[0, 3, 4])],
        );
        assert_eq!(cone.cofaces(&s(&[0, 4])).unwrap(), vec![s(&[0, 1, 4]), s(&[0, 3, 4])]);
    }
}
