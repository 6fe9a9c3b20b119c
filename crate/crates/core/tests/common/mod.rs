//! Reference computations for tests, written without the library's face
//! indexing or operator builders.
#![allow(dead_code)]

use std::collections::BTreeSet;

use lapbounds::SimplicialComplex;
use nalgebra::{DMatrix, SymmetricEigen};

/// All faces of dimension `dim` as sorted position tuples, in lexicographic order.
pub fn faces_of(x: &SimplicialComplex, dim: usize) -> Vec<Vec<u32>> {
    let mut out = BTreeSet::new();
    for facet in x.facets_labeled() {
        let pos: Vec<u32> = facet.iter().map(|l| x.position_of(*l).unwrap()).collect();
        let m = pos.len();
        if m < dim + 1 {
            continue;
        }
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize == dim + 1 {
                let mut f: Vec<u32> = (0..m)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| pos[i])
                    .collect();
                f.sort_unstable();
                out.insert(f);
            }
        }
    }
    out.into_iter().collect()
}

/// Boundary map `B_r` from `r`-faces to `(r-1)`-faces.
pub fn boundary(x: &SimplicialComplex, r: usize, signed: bool) -> DMatrix<f64> {
    let rows = faces_of(x, r - 1);
    let cols = faces_of(x, r);
    let mut b = DMatrix::zeros(rows.len(), cols.len());
    for (j, sigma) in cols.iter().enumerate() {
        for i in 0..sigma.len() {
            let mut tau = sigma.clone();
            tau.remove(i);
            let row = rows.binary_search(&tau).unwrap();
            b[(row, j)] = if signed && i % 2 == 1 { -1.0 } else { 1.0 };
        }
    }
    b
}

/// `B_r B_r^T`.
pub fn upper(x: &SimplicialComplex, r: usize, signed: bool) -> DMatrix<f64> {
    let b = boundary(x, r, signed);
    &b * b.transpose()
}

/// `B_r^T B_r`.
pub fn lower(x: &SimplicialComplex, r: usize, signed: bool) -> DMatrix<f64> {
    let b = boundary(x, r, signed);
    b.transpose() * &b
}

pub fn eig_desc(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub fn nonzero(v: &[f64]) -> Vec<f64> {
    v.iter().copied().filter(|x| x.abs() > 1e-8).collect()
}

pub fn top_sum(v: &[f64], k: usize) -> f64 {
    v.iter().take(k).sum()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Graph Laplacian from an edge list on positions `0..n`.
pub fn graph_laplacian(n: usize, edges: &[(usize, usize)]) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n, n);
    for &(a, b) in edges {
        l[(a, a)] += 1.0;
        l[(b, b)] += 1.0;
        l[(a, b)] -= 1.0;
        l[(b, a)] -= 1.0;
    }
    l
}

pub fn graph_edges(g: &SimplicialComplex) -> Vec<(usize, usize)> {
    faces_of(g, 1)
        .into_iter()
        .map(|e| (e[0] as usize, e[1] as usize))
        .collect()
}

pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
