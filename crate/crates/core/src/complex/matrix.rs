use super::{Chain, SimplicialComplex};
use crate::sparse::CscMatrix;

/// Matrix of the boundary map from `d`-chains to `(d-1)`-chains in the
/// index bases of `k`. Column `j` holds the signs `(-1)^i` of the facets of the
/// `j`-th `d`-simplex.
pub fn boundary_matrix(k: &SimplicialComplex, d: usize) -> CscMatrix {
    assert!(d >= 1, "boundary of vertices is not represented");
    let rows = k.count(d - 1);
    let cols = k.count(d);
    let mut triplets = Vec::with_capacity(cols * (d + 1));
    for (j, s) in k.simplices(d).iter().enumerate() {
        for (face, sign) in s.boundary_faces() {
            let i = k.index_of(&face).expect("complex is closed under faces");
            triplets.push((i, j, sign));
        }
    }
    CscMatrix::from_triplets(rows, cols, &triplets)
}

/// Coefficients of `chain` in the index basis of `k`'s simplices of the chain's dimension.
/// Simplices outside `k` are ignored.
pub fn chain_to_vector(chain: &Chain, k: &SimplicialComplex) -> Vec<f64> {
    let mut v = vec![0.0; k.count(chain.dim())];
    for (s, c) in chain.iter() {
        if let Some(i) = k.index_of(s) {
            v[i] = c;
        }
    }
    v
}

pub fn vector_to_chain(values: &[f64], k: &SimplicialComplex, d: usize) -> Chain {
    Chain::from_entries(d, k.simplices(d).iter().cloned().zip(values.iter().copied()))
}

#[cfg(test)]
mod tests {
    use super::super::Simplex;
    use super::*;

    #[test]
    fn single_triangle_column() {
        let k = SimplicialComplex::from_simplices(3, [Simplex::new(vec![0, 1, 2]).unwrap()]);
        let m = boundary_matrix(&k, 2);
        assert_eq!(m.to_dense(), vec![vec![1.0], vec![-1.0], vec![1.0]]);
    }

    #[test]
    fn circle_graph_columns_sum_to_zero() {
        let n = 7;
        let k = SimplicialComplex::from_simplices(n, (0..n).map(|i| Simplex::edge(i, (i + 1) % n)));
        let m = boundary_matrix(&k, 1);
        assert_eq!((m.nrows(), m.ncols()), (n, n));
        for j in 0..n {
            let (_, vals) = m.col(j);
            assert_eq!(vals.iter().sum::<f64>(), 0.0);
        }
    }
}
