//! Boundary matrices and the four Laplacian-type operators.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::complex::{sign_unchecked, Face, SimplicialComplex};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Boundary,
    SignlessBoundary,
    UpperLaplacian,
    LowerLaplacian,
    SignlessUpper,
    SignlessLower,
    GadgetLA,
    GadgetLi,
    GadgetLprime,
}

impl OperatorKind {
    pub fn is_square(self) -> bool {
        !matches!(
            self,
            OperatorKind::Boundary | OperatorKind::SignlessBoundary
        )
    }
}

/// The Laplacian flavours accepted by [`laplacian`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaplacianKind {
    /// `L⁺_{r-1} = B_r B_rᵀ` on the `(r-1)`-faces.
    Upper,
    /// `L⁻_r = B_rᵀ B_r` on the `r`-faces.
    Lower,
    /// `Q⁺_{r-1} = N_r N_rᵀ`.
    SignlessUpper,
    /// `Q⁻_r = N_rᵀ N_r`.
    SignlessLower,
}

impl LaplacianKind {
    pub fn signed(self) -> bool {
        matches!(self, LaplacianKind::Upper | LaplacianKind::Lower)
    }

    pub fn upper(self) -> bool {
        matches!(self, LaplacianKind::Upper | LaplacianKind::SignlessUpper)
    }

    fn operator_kind(self) -> OperatorKind {
        match self {
            LaplacianKind::Upper => OperatorKind::UpperLaplacian,
            LaplacianKind::Lower => OperatorKind::LowerLaplacian,
            LaplacianKind::SignlessUpper => OperatorKind::SignlessUpper,
            LaplacianKind::SignlessLower => OperatorKind::SignlessLower,
        }
    }
}

impl std::str::FromStr for LaplacianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "upper" => LaplacianKind::Upper,
            "lower" => LaplacianKind::Lower,
            "signless-upper" => LaplacianKind::SignlessUpper,
            "signless-lower" => LaplacianKind::SignlessLower,
            other => {
                return Err(Error::malformed(format!(
                    "unknown Laplacian kind `{other}`"
                )))
            }
        })
    }
}

/// Dense real matrix tagged with its kind and the faces indexing its rows and columns.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub r: usize,
    rows: Arc<[Face]>,
    cols: Arc<[Face]>,
    pub entries: DMatrix<f64>,
}

impl OperatorMatrix {
    pub(crate) fn new(
        kind: OperatorKind,
        r: usize,
        rows: Arc<[Face]>,
        cols: Arc<[Face]>,
        entries: DMatrix<f64>,
    ) -> Self {
        debug_assert_eq!(entries.nrows(), rows.len());
        debug_assert_eq!(entries.ncols(), cols.len());
        OperatorMatrix {
            kind,
            r,
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> &[Face] {
        &self.rows
    }

    pub fn cols(&self) -> &[Face] {
        &self.cols
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn row_of(&self, face: &Face) -> Option<usize> {
        self.rows.binary_search(face).ok()
    }

    pub fn col_of(&self, face: &Face) -> Option<usize> {
        self.cols.binary_search(face).ok()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }
}

/// `B_r` (signed) or `N_r` (unsigned): rows `X(r-1)`, columns `X(r)`.
pub fn boundary_matrix(x: &SimplicialComplex, r: usize, signed: bool) -> Result<OperatorMatrix> {
    if r as isize > x.dim() {
        return Err(Error::contract(format!(
            "r = {r} exceeds dim = {}",
            x.dim()
        )));
    }
    Ok(boundary_unchecked(x, r, signed))
}

/// Boundary matrix allowing `r = dim + 1` (zero columns).
fn boundary_unchecked(x: &SimplicialComplex, r: usize, signed: bool) -> OperatorMatrix {
    let r_i = r as isize;
    let rows = x.faces_shared(r_i - 1);
    let cols = x.faces_shared(r_i);
    let mut m = DMatrix::zeros(rows.len(), cols.len());
    for (j, tau) in cols.iter().enumerate() {
        for (_, sigma) in tau.boundary() {
            let i = rows
                .binary_search(&sigma)
                .expect("complex is downward closed");
            m[(i, j)] = if signed {
                sign_unchecked(tau, &sigma)
            } else {
                1.0
            };
        }
    }
    let kind = if signed {
        OperatorKind::Boundary
    } else {
        OperatorKind::SignlessBoundary
    };
    OperatorMatrix::new(kind, r, rows, cols, m)
}

/// Builds a Laplacian as a product of boundary matrices and checks it against
/// the entrywise combinatorial formula.
///
/// Upper kinds act on `X(r-1)` and need `r >= 1` with `X(r-1)` present; when
/// `r = dim + 1` there are no `r`-faces and the result is the zero matrix.
/// Lower kinds act on `X(r)` and need `r <= dim`.
pub fn laplacian(x: &SimplicialComplex, kind: LaplacianKind, r: usize) -> Result<OperatorMatrix> {
    let r_i = r as isize;
    if kind.upper() {
        if r == 0 || r_i - 1 > x.dim() {
            return Err(Error::contract(format!(
                "upper Laplacian needs 1 <= r <= dim + 1, got r = {r}, dim = {}",
                x.dim()
            )));
        }
    } else if r_i > x.dim() {
        return Err(Error::contract(format!(
            "lower Laplacian needs r <= dim, got r = {r}, dim = {}",
            x.dim()
        )));
    }
    let b = boundary_unchecked(x, r, kind.signed());
    let (entries, faces) = if kind.upper() {
        (&b.entries * b.entries.transpose(), b.rows.clone())
    } else {
        (b.entries.transpose() * &b.entries, b.cols.clone())
    };
    let op = OperatorMatrix::new(kind.operator_kind(), r, faces.clone(), faces, entries);
    let direct = combinatorial_laplacian(x, kind, r);
    if let Some((i, j)) = first_mismatch(&op.entries, &direct) {
        return Err(Error::Internal(format!(
            "{kind:?} Laplacian (r = {r}) entry ({i}, {j}) is {} but the face formula gives {}",
            op.entries[(i, j)],
            direct[(i, j)]
        )));
    }
    Ok(op)
}

fn first_mismatch(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<(usize, usize)> {
    (0..a.ncols())
        .flat_map(|j| (0..a.nrows()).map(move |i| (i, j)))
        .find(|&(i, j)| a[(i, j)] != b[(i, j)])
}

/// Entrywise Laplacian from face incidences, independent of any matrix product.
pub fn combinatorial_laplacian(
    x: &SimplicialComplex,
    kind: LaplacianKind,
    r: usize,
) -> DMatrix<f64> {
    let r_i = r as isize;
    if kind.upper() {
        let faces = x.faces(r_i - 1);
        let deg = x.r_degrees(r);
        let mut m = DMatrix::zeros(faces.len(), faces.len());
        for (a, tau) in faces.iter().enumerate() {
            m[(a, a)] = deg[a] as f64;
            for (b, eta) in faces.iter().enumerate().skip(a + 1) {
                let cap = tau.intersection(eta);
                if cap.len() as isize != r_i - 1 {
                    continue;
                }
                let cup = tau.union(eta);
                if !x.contains(&cup) {
                    continue;
                }
                let v = if kind.signed() {
                    -sign_unchecked(tau, &cap) * sign_unchecked(eta, &cap)
                } else {
                    1.0
                };
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
        m
    } else {
        let faces = x.faces(r_i);
        let mut m = DMatrix::zeros(faces.len(), faces.len());
        for (a, tau) in faces.iter().enumerate() {
            m[(a, a)] = (r + 1) as f64;
            for (b, eta) in faces.iter().enumerate().skip(a + 1) {
                let cap = tau.intersection(eta);
                if cap.len() != r {
                    continue;
                }
                let v = if kind.signed() {
                    sign_unchecked(tau, &cap) * sign_unchecked(eta, &cap)
                } else {
                    1.0
                };
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
        m
    }
}
