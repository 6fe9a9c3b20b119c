//! The matrices `L_A`, `L_i` and `L'` used to prove the degree-sum bound.
//!
//! `L_A` has integer entries and `L'` has rational ones; both are built
//! exactly and only converted to `f64` for the eigensolver.

use nalgebra::DMatrix;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::complex::{sign_unchecked, Face, SimplicialComplex};
use crate::error::{Error, Result};
use crate::operator::{combinatorial_laplacian, LaplacianKind, OperatorKind, OperatorMatrix};
use crate::spectra::{degree_profile, matrix_spectrum};

/// For every `(r-1)`-face, the `r`-faces containing it with the incidence sign.
pub fn cofaces(x: &SimplicialComplex, r: usize) -> Vec<Vec<(usize, i64)>> {
    let lower = x.faces(r as isize - 1);
    let mut out = vec![Vec::new(); lower.len()];
    for (t, tau) in x.faces(r as isize).iter().enumerate() {
        for (_, sigma) in tau.boundary() {
            let s = lower
                .binary_search(&sigma)
                .expect("complex is downward closed");
            out[s].push((t, sign_unchecked(tau, &sigma) as i64));
        }
    }
    out
}

fn check_r(x: &SimplicialComplex, r: usize) -> Result<()> {
    if r == 0 || r as isize > x.dim() {
        return Err(Error::contract(format!(
            "gadget needs 1 <= r <= dim = {}, got {r}",
            x.dim()
        )));
    }
    Ok(())
}

/// Exact `L_A` for `A` given as indices into `X(r-1)`.
pub fn gadget_la_exact(x: &SimplicialComplex, r: usize, a: &[usize]) -> Result<DMatrix<i64>> {
    check_r(x, r)?;
    let fr = x.f(r as isize);
    let lower = x.f(r as isize - 1);
    let co = cofaces(x, r);
    let mut hits = vec![0u32; fr];
    let mut seen = vec![false; lower];
    for &s in a {
        if s >= lower || std::mem::replace(&mut seen[s], true) {
            return Err(Error::contract(format!(
                "A must list distinct faces of X(r-1); bad index {s}"
            )));
        }
        for (t, _) in &co[s] {
            hits[*t] += 1;
            if hits[*t] > 1 {
                let tau = x.label_face(&x.faces(r as isize)[*t]);
                return Err(Error::contract(format!(
                    "face {tau:?} contains two elements of A"
                )));
            }
        }
    }
    let mut m = DMatrix::<i64>::zeros(fr, fr);
    for &s in a {
        for (t, st) in &co[s] {
            for (e, se) in &co[s] {
                m[(*t, *e)] = st * se;
            }
        }
    }
    Ok(m)
}

fn to_f64_int(m: &DMatrix<i64>) -> DMatrix<f64> {
    m.map(|v| v as f64)
}

fn face_indices(x: &SimplicialComplex, r: usize, faces: &[Face]) -> Result<Vec<usize>> {
    let lower = x.faces(r as isize - 1);
    faces
        .iter()
        .map(|f| {
            if f.len() != r {
                return Err(Error::contract(format!("{f:?} is not an (r-1)-face")));
            }
            lower
                .binary_search(f)
                .map_err(|_| Error::contract(format!("face {:?} not in complex", x.label_face(f))))
        })
        .collect()
}

/// `L_A` on `X(r)`: requires every `r`-face to contain at most one element of `A`.
pub fn gadget_la(x: &SimplicialComplex, r: usize, a: &[Face]) -> Result<OperatorMatrix> {
    let idx = face_indices(x, r, a)?;
    let m = gadget_la_exact(x, r, &idx)?;
    let cols = x.faces_shared(r as isize);
    Ok(OperatorMatrix::new(
        OperatorKind::GadgetLA,
        r,
        cols.clone(),
        cols,
        to_f64_int(&m),
    ))
}

/// `L_i`: the single-face case of `L_A`. Its one nonzero eigenvalue is
/// `deg^{(r)}(σ_i)`, which is checked.
pub fn gadget_li(x: &SimplicialComplex, r: usize, sigma: &Face) -> Result<OperatorMatrix> {
    let mut m = gadget_la(x, r, std::slice::from_ref(sigma))?;
    m.kind = OperatorKind::GadgetLi;
    let s = face_indices(x, r, std::slice::from_ref(sigma))?[0];
    let deg = x.r_degrees(r)[s] as f64;
    let spec = matrix_spectrum(&m.entries)?;
    let top = spec.eigenvalues().first().copied().unwrap_or(0.0);
    let rest = spec.prefix_sums().last().copied().unwrap_or(0.0) - top;
    if (top - deg).abs() > 1e-9 * deg.max(1.0) || rest.abs() > 1e-9 * deg.max(1.0) {
        return Err(Error::Internal(format!(
            "L_i spectrum {:?} is not {{{deg}, 0, ...}}",
            spec.eigenvalues()
        )));
    }
    Ok(m)
}

/// Greedily picks faces from `order` (indices into `X(r-1)`) so that no
/// `r`-face contains two of them.
pub fn admissible_subset(x: &SimplicialComplex, r: usize, order: &[usize]) -> Vec<usize> {
    let co = cofaces(x, r);
    let mut used = vec![false; x.f(r as isize)];
    let mut out = Vec::new();
    for &s in order {
        if co[s].iter().all(|(t, _)| !used[*t]) {
            for (t, _) in &co[s] {
                used[*t] = true;
            }
            out.push(s);
        }
    }
    out
}

/// `L'` together with the data it was built from.
#[derive(Clone, Debug)]
pub struct LPrime {
    pub matrix: OperatorMatrix,
    pub exact: DMatrix<Rational64>,
    /// `d = d^{(r)}_{(r+1)k}`.
    pub d: usize,
    /// `σ_1, ..., σ_{(r+1)k}` as indices into `X(r-1)`, in ranked order.
    pub top: Vec<usize>,
    /// `1 - d / d_i` for each `σ_i` in `top`.
    pub coefficients: Vec<Rational64>,
    pub lambda1: f64,
}

/// Exact `L^-_r` as rationals.
pub fn lower_laplacian_exact(x: &SimplicialComplex, r: usize) -> DMatrix<Rational64> {
    combinatorial_laplacian(x, LaplacianKind::Lower, r).map(|v| Rational64::from_integer(v as i64))
}

/// Builds `L' = L^-_r - Σ_i (1 - d/d_i) L_i` and checks it against the
/// weighted form (diagonal `Σ_{σ⊂τ} w(σ)`, off-diagonal `w(τ∩η)` times the
/// sign product) and against `λ_1(L') <= (r+1) d + tol`.
pub fn gadget_lprime(x: &SimplicialComplex, r: usize, k: usize, tol: f64) -> Result<LPrime> {
    check_r(x, r)?;
    let m = (r + 1) * k;
    let lower = x.f(r as isize - 1);
    if k == 0 || m > lower {
        return Err(Error::contract(format!(
            "L' needs 1 <= (r+1)k <= f_(r-1) = {lower}, got k = {k}"
        )));
    }
    let prof = degree_profile(x, r, None)?;
    let d = prof.d(m);
    if d == 0 {
        return Err(Error::Degenerate(format!("d^({r})_{m} = 0")));
    }
    let top: Vec<usize> = prof.ranked[..m].to_vec();
    let dr = Rational64::from_integer(d as i64);
    let coefficients: Vec<Rational64> = top
        .iter()
        .map(|s| Rational64::one() - dr / Rational64::from_integer(prof.degree_of[*s] as i64))
        .collect();

    let mut lp = lower_laplacian_exact(x, r);
    for (s, c) in top.iter().zip(&coefficients) {
        if c.is_zero() {
            continue;
        }
        let li = gadget_la_exact(x, r, &[*s])?;
        for (e, v) in lp.iter_mut().zip(li.iter()) {
            if *v != 0 {
                *e -= *c * Rational64::from_integer(*v);
            }
        }
    }

    // Weighted form.
    let mut w = vec![Rational64::one(); lower];
    for (s, c) in top.iter().zip(&coefficients) {
        w[*s] = Rational64::one() - c;
    }
    let upper = x.faces(r as isize);
    let low_faces = x.faces(r as isize - 1);
    let fr = upper.len();
    let mut expect = DMatrix::<Rational64>::zeros(fr, fr);
    for (t, tau) in upper.iter().enumerate() {
        for (_, sigma) in tau.boundary() {
            expect[(t, t)] += w[low_faces.binary_search(&sigma).unwrap()];
        }
    }
    for (s, list) in cofaces(x, r).iter().enumerate() {
        for (t, st) in list {
            for (e, se) in list {
                if t != e {
                    expect[(*t, *e)] = w[s] * Rational64::from_integer(st * se);
                }
            }
        }
    }
    if expect != lp {
        return Err(Error::Internal("L' differs from its weighted form".into()));
    }

    let entries = lp.map(|v| *v.numer() as f64 / *v.denom() as f64);
    let lambda1 = matrix_spectrum(&entries)?
        .eigenvalues()
        .first()
        .copied()
        .unwrap_or(0.0);
    let cap = ((r + 1) * d) as f64;
    if lambda1 > cap + tol {
        return Err(Error::Internal(format!(
            "lambda_1(L') = {lambda1} exceeds (r+1)d = {cap}"
        )));
    }
    let cols = x.faces_shared(r as isize);
    Ok(LPrime {
        matrix: OperatorMatrix::new(OperatorKind::GadgetLprime, r, cols.clone(), cols, entries),
        exact: lp,
        d,
        top,
        coefficients,
        lambda1,
    })
}
