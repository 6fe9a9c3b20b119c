//! Symmetric spectra, eigenvalue partial sums, degree profiles and the
//! classical complement identities.

use nalgebra::DMatrix;

use crate::complex::{PartiteStructure, SimplicialComplex};
use crate::error::{Error, Result};
use crate::operator::{laplacian, LaplacianKind, OperatorMatrix};

/// Relative zero threshold: `|λ| <= ZERO_REL * max(1, λ₁)` counts as zero.
pub const ZERO_REL: f64 = 1e-9;

/// Largest tolerated asymmetry `|M_ij - M_ji|`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Descending eigenvalues with cumulative sums.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSummary {
    eigenvalues: Vec<f64>,
    /// `prefix_sums[k]` is the sum of the `k` largest eigenvalues; `prefix_sums[0] = 0`.
    prefix_sums: Vec<f64>,
    tolerance: f64,
}

impl SpectrumSummary {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, tolerance: Option<f64>) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let mut prefix_sums = Vec::with_capacity(eigenvalues.len() + 1);
        let mut acc = 0.0;
        prefix_sums.push(0.0);
        for v in &eigenvalues {
            acc += v;
            prefix_sums.push(acc);
        }
        let top = eigenvalues.first().copied().unwrap_or(0.0);
        let tolerance = tolerance.unwrap_or(ZERO_REL * top.max(1.0));
        SpectrumSummary {
            eigenvalues,
            prefix_sums,
            tolerance,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn prefix_sums(&self) -> &[f64] {
        &self.prefix_sums
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `λ_i`, 1-based.
    pub fn lambda(&self, i: usize) -> f64 {
        self.eigenvalues[i - 1]
    }

    pub fn top_k_sum(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.len() {
            return Err(Error::contract(format!(
                "k = {k} outside 1..={}",
                self.len()
            )));
        }
        Ok(self.prefix_sums[k])
    }

    /// Eigenvalues with `|λ| > tolerance`, descending.
    pub fn nonzero(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .copied()
            .filter(|v| v.abs() > self.tolerance)
            .collect()
    }

    pub fn min(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }
}

/// Descending eigenvalues of a symmetric matrix.
pub fn eigenvalues_desc(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::contract(format!(
            "matrix is {}x{}, not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::contract(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// Full spectrum with an explicit absolute zero tolerance.
pub fn sym_spectrum(m: &OperatorMatrix, tolerance: f64) -> Result<SpectrumSummary> {
    Ok(SpectrumSummary::from_eigenvalues(
        eigenvalues_desc(&m.entries)?,
        Some(tolerance),
    ))
}

/// Full spectrum with the default relative zero tolerance.
pub fn spectrum(m: &OperatorMatrix) -> Result<SpectrumSummary> {
    matrix_spectrum(&m.entries)
}

pub fn matrix_spectrum(m: &DMatrix<f64>) -> Result<SpectrumSummary> {
    Ok(SpectrumSummary::from_eigenvalues(
        eigenvalues_desc(m)?,
        None,
    ))
}

pub fn top_k_sum(s: &SpectrumSummary, k: usize) -> Result<f64> {
    s.top_k_sum(k)
}

pub fn nonzero_spectrum(s: &SpectrumSummary) -> Vec<f64> {
    s.nonzero()
}

/// Largest absolute difference between two multisets given as descending
/// lists; infinite when the sizes differ.
pub fn multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn require_graph(g: &SimplicialComplex) -> Result<()> {
    if !g.is_graph() {
        return Err(Error::contract(format!(
            "expected a graph, got a complex of dimension {}",
            g.dim()
        )));
    }
    Ok(())
}

/// Spectrum of the graph Laplacian `L(G) = L⁺_0(G)`.
pub fn graph_spectrum(g: &SimplicialComplex) -> Result<SpectrumSummary> {
    require_graph(g)?;
    spectrum(&laplacian(g, LaplacianKind::Upper, 1)?)
}

/// `ε_k(G)`: sum of the `k` largest Laplacian eigenvalues minus `|E|`.
pub fn eps_k(g: &SimplicialComplex, k: usize) -> Result<f64> {
    let s = graph_spectrum(g)?;
    Ok(s.top_k_sum(k)? - g.edge_count() as f64)
}

/// Sorted `r`-degrees of the `(r-1)`-faces together with derived sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub r: usize,
    /// `d_1 >= d_2 >= ...` over `X(r-1)`.
    pub sorted_degrees: Vec<usize>,
    /// Face indices into `X(r-1)` in ranked order: descending degree, then lexicographic.
    pub ranked: Vec<usize>,
    /// `deg^{(r)}` aligned with `X(r-1)`.
    pub degree_of: Vec<usize>,
    /// Conjugate sequence `d'_i = |{j : d_j >= i}|` for `i = 1..=n`; only for `r = 1`.
    pub conjugate: Option<Vec<usize>>,
    /// Per partite class `j`, descending degrees over `X(r-1; j)`.
    pub partite_profiles: Option<Vec<Vec<usize>>>,
}

impl DegreeProfile {
    /// `d_i`, 1-based, with `d_i = 0` past the end.
    pub fn d(&self, i: usize) -> usize {
        self.sorted_degrees
            .get(i.wrapping_sub(1))
            .copied()
            .unwrap_or(0)
    }

    /// `d_1 + ... + d_m`, clamped.
    pub fn top_sum(&self, m: usize) -> usize {
        self.sorted_degrees.iter().take(m).sum()
    }

    pub fn max_degree(&self) -> usize {
        self.sorted_degrees.first().copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.sorted_degrees.iter().sum()
    }
}

/// Transpose of a partition: `d'_i = |{j : d_j >= i}|` for `i = 1..=len`.
pub fn conjugate_sequence(degrees: &[usize], len: usize) -> Vec<usize> {
    (1..=len)
        .map(|i| degrees.iter().filter(|d| **d >= i).count())
        .collect()
}

pub fn degree_profile(
    x: &SimplicialComplex,
    r: usize,
    partition: Option<&PartiteStructure>,
) -> Result<DegreeProfile> {
    if r == 0 || r as isize - 1 > x.dim() {
        return Err(Error::contract(format!(
            "degree profile needs 1 <= r <= dim + 1, got r = {r}"
        )));
    }
    let degree_of = x.r_degrees(r);
    let mut ranked: Vec<usize> = (0..degree_of.len()).collect();
    ranked.sort_by(|a, b| degree_of[*b].cmp(&degree_of[*a]).then(a.cmp(b)));
    let sorted_degrees: Vec<usize> = ranked.iter().map(|i| degree_of[*i]).collect();
    let conjugate = (r == 1).then(|| conjugate_sequence(&sorted_degrees, sorted_degrees.len()));
    let partite_profiles = partition.map(|p| {
        (0..p.n_classes())
            .map(|j| {
                let mut d: Vec<usize> = p
                    .faces_avoiding(x, r, j)
                    .into_iter()
                    .map(|i| degree_of[i])
                    .collect();
                d.sort_unstable_by(|a, b| b.cmp(a));
                d
            })
            .collect()
    });
    Ok(DegreeProfile {
        r,
        sorted_degrees,
        ranked,
        degree_of,
        conjugate,
        partite_profiles,
    })
}

/// Maximum absolute row sum.
pub fn gershgorin_bound(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Residuals of the two complement identities over every valid index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplementCheck {
    /// `max_i |λ_i(G) - (n - λ_{n-i}(Ḡ))|` over `1 <= i <= n-1`.
    pub eigen_residual: f64,
    /// `max_k |ε_k(G) - (ε_{n-k-1}(Ḡ) + nk - C(n,2))|` over `1 <= k <= n-1`.
    pub eps_residual: f64,
}

impl ComplementCheck {
    pub fn max_residual(&self) -> f64 {
        self.eigen_residual.max(self.eps_residual)
    }
}

pub fn complement_eigen_check(g: &SimplicialComplex) -> Result<ComplementCheck> {
    require_graph(g)?;
    let n = g.n_vertices();
    if n < 2 {
        return Err(Error::contract(
            "complement identities need at least 2 vertices",
        ));
    }
    let gc = g.complement_graph()?;
    let s = graph_spectrum(g)?;
    let sc = graph_spectrum(&gc)?;
    let (e, ec) = (g.edge_count() as f64, gc.edge_count() as f64);
    let nf = n as f64;
    let mut eigen_residual: f64 = 0.0;
    for i in 1..n {
        eigen_residual = eigen_residual.max((s.lambda(i) - (nf - sc.lambda(n - i))).abs());
    }
    // ε_0 is -|E|; the identity reaches it at k = n - 1.
    let eps = |sp: &SpectrumSummary, edges: f64, k: usize| sp.prefix_sums()[k] - edges;
    let binom_n2 = (n * (n - 1) / 2) as f64;
    let mut eps_residual: f64 = 0.0;
    for k in 1..n {
        let lhs = eps(&s, e, k);
        let rhs = eps(&sc, ec, n - k - 1) + nf * k as f64 - binom_n2;
        eps_residual = eps_residual.max((lhs - rhs).abs());
    }
    Ok(ComplementCheck {
        eigen_residual,
        eps_residual,
    })
}
