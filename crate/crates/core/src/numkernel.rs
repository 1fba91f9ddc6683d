//! Dense complex matrices and orthonormal-basis subspaces.
//!
//! The inner product is `<x, y> = sum x_i conj(y_i)`, linear in the first
//! slot. Every subspace is stored as an orthonormal basis; the zero subspace
//! is a basis with no columns and is accepted everywhere.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Numerical cutoffs shared by all rank and equality decisions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_rel: f64,
    pub angle_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_rel: 1e-12,
            angle_tol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(rank_rel: f64, angle_tol: f64) -> Result<Self> {
        let ok = |x: f64| x > 0.0 && x < 1.0;
        if ok(rank_rel) && ok(angle_tol) {
            Ok(Tolerance {
                rank_rel,
                angle_tol,
            })
        } else {
            Err(Error::Malformed(format!(
                "tolerances must lie in (0,1): rank_rel={rank_rel}, angle_tol={angle_tol}"
            )))
        }
    }
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn ensure_finite(m: &CMatrix) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMatrix {
    CMatrix::zeros(r, c)
}

/// Build a matrix from real-valued rows (convenience for fixtures).
pub fn real_matrix(rows: &[&[f64]]) -> CMatrix {
    let r = rows.len();
    let c = if r == 0 { 0 } else { rows[0].len() };
    CMatrix::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
}

pub fn diag_real(d: &[f64]) -> CMatrix {
    let n = d.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(d[i], 0.0) } else { ZERO })
}

pub fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows(), "hstack row mismatch");
    let mut out = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

pub fn vstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.ncols(), "vstack column mismatch");
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.rows_mut(0, a.nrows()).copy_from(a);
    out.rows_mut(a.nrows(), b.nrows()).copy_from(b);
    out
}

pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

/// 2x2 block matrix `[[a, b], [c, d]]`.
pub fn blocks(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> CMatrix {
    vstack(&hstack(a, b), &hstack(c, d))
}

pub fn rows_of(m: &CMatrix, start: usize, count: usize) -> CMatrix {
    m.rows(start, count).into_owned()
}

pub fn cols_of(m: &CMatrix, start: usize, count: usize) -> CMatrix {
    m.columns(start, count).into_owned()
}

/// Spectral norm (largest singular value); zero for empty matrices.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Thin singular value decomposition `m = u diag(s) v_t`, `s` descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v_t: CMatrix,
}

#[cfg(test)]
impl Svd {
    fn residual(&self, m: &CMatrix) -> f64 {
        let p = self.s.len();
        let mut us = self.u.clone();
        for (j, sj) in self.s.iter().enumerate() {
            us.column_mut(j).scale_mut(*sj);
        }
        let rec = (&us * &self.v_t - m).norm();
        let ou = (self.u.adjoint() * &self.u - identity(p)).norm();
        let ov = (&self.v_t * self.v_t.adjoint() - identity(p)).norm();
        (rec / m.norm().max(f64::MIN_POSITIVE)).max(ou).max(ov)
    }
}

/// nalgebra's implicit-shift iteration, kept as a fallback and for comparison.
fn raw_svd(m: CMatrix) -> Svd {
    let d = SVD::new(m, true, true);
    Svd {
        u: d.u.expect("left vectors requested"),
        s: d.singular_values.iter().copied().collect(),
        v_t: d.v_t.expect("right vectors requested"),
    }
}

fn to_faer(m: &CMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn faer_svd(m: &CMatrix) -> Option<Svd> {
    let (r, c) = m.shape();
    let a = to_faer(m);
    let d = a.thin_svd().ok()?;
    let (u, v, sd) = (d.U(), d.V(), d.S().column_vector());
    let p = r.min(c);
    Some(Svd {
        u: CMatrix::from_fn(r, p, |i, j| u[(i, j)]),
        s: (0..p).map(|k| sd[k].re).collect(),
        v_t: CMatrix::from_fn(p, c, |i, j| v[(j, i)].conj()),
    })
}

/// Thin SVD. faer does the work: nalgebra's complex SVD returns inconsistent
/// singular vectors on some rank-deficient inputs, which would corrupt every
/// null-space and range computation downstream.
pub fn svd(m: &CMatrix) -> Svd {
    faer_svd(m).unwrap_or_else(|| raw_svd(m.clone()))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    svd(m).s
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = (m + m.adjoint()).scale(0.5);
    let a = to_faer(&h);
    let mut ev: Vec<f64> = match a.self_adjoint_eigenvalues(faer::Side::Lower) {
        Ok(ev) => ev,
        Err(_) => SymmetricEigen::new(h).eigenvalues.iter().copied().collect(),
    };
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Eigenvalues of a general square complex matrix.
pub fn eigenvalues(m: &CMatrix) -> Vec<C64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    match to_faer(m).eigenvalues() {
        Ok(ev) => ev,
        Err(_) => {
            let (_, t) = nalgebra::Schur::new(m.clone()).unpack();
            (0..t.nrows()).map(|i| t[(i, i)]).collect()
        }
    }
}

/// Inverse of a square matrix, refusing numerically singular input.
pub fn inverse(m: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    check_dim("inverse (square)", m.nrows(), m.ncols())?;
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    let sv = singular_values(m);
    let cutoff = tol.rank_rel * sv[0] * m.nrows() as f64;
    if sv[0] == 0.0 || *sv.last().unwrap() <= cutoff {
        return Err(Error::NotInvertible("matrix is numerically singular".into()));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::NotInvertible("LU inversion failed".into()))
}

fn rank_from(sv: &[f64], rows: usize, cols: usize, tol: Tolerance) -> usize {
    rank_from_ref(sv, 0.0, rows, cols, tol)
}

/// Rank with cutoff measured against `max(sigma_max, reference)`, so blocks
/// cut out of an orthonormal basis are judged on the scale of the basis.
fn rank_from_ref(sv: &[f64], reference: f64, rows: usize, cols: usize, tol: Tolerance) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0).max(reference);
    if smax == 0.0 {
        return 0;
    }
    let cutoff = tol.rank_rel * smax * rows.max(cols) as f64;
    sv.iter().filter(|&&s| s > cutoff).count()
}

pub fn rank(m: &CMatrix, tol: Tolerance) -> usize {
    rank_from(&singular_values(m), m.nrows(), m.ncols(), tol)
}

pub fn rank_ref(m: &CMatrix, reference: f64, tol: Tolerance) -> usize {
    rank_from_ref(&singular_values(m), reference, m.nrows(), m.ncols(), tol)
}

/// A linear subspace of `C^n` represented by an orthonormal basis (`n x k`).
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: CMatrix,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace {
            ambient_dim: n,
            basis: CMatrix::zeros(n, 0),
        }
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            ambient_dim: n,
            basis: identity(n),
        }
    }

    /// Wrap a basis that is already orthonormal (checked loosely).
    pub fn from_orthonormal(basis: CMatrix) -> Result<Self> {
        ensure_finite(&basis)?;
        let k = basis.ncols();
        let gram = basis.adjoint() * &basis - identity(k);
        if k > 0 && gram.norm() > 1e-8 {
            return Err(Error::Malformed("basis columns are not orthonormal".into()));
        }
        Ok(Subspace {
            ambient_dim: basis.nrows(),
            basis,
        })
    }

    /// The span of the given vectors.
    pub fn span(vectors: &CMatrix) -> Result<Self> {
        column_space(vectors, Tolerance::default())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// Distance of a vector from the subspace.
    pub fn distance(&self, v: &CVector) -> f64 {
        let p = &self.basis * (self.basis.adjoint() * v);
        (v - p).norm()
    }

    /// Image under a linear map `m` (ambient `n` to ambient `rows(m)`).
    pub fn image(&self, m: &CMatrix, tol: Tolerance) -> Result<Subspace> {
        check_dim("subspace image", self.ambient_dim, m.ncols())?;
        if self.dim() == 0 {
            return Ok(Subspace::zero(m.nrows()));
        }
        column_space(&(m * &self.basis), tol)
    }

    /// Keep only coordinates `start..start+count` of every vector and re-span.
    pub fn project_coords(&self, start: usize, count: usize, tol: Tolerance) -> Result<Subspace> {
        column_space_ref(&rows_of(&self.basis, start, count), 1.0, tol)
    }

    pub fn eq_tol(&self, other: &Subspace, tol: Tolerance) -> bool {
        subspace_eq(self, other, tol)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    let mut re = Vec::with_capacity(m.len());
    let mut im = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            re.push(m[(i, j)].re);
            im.push(m[(i, j)].im);
        }
    }
    MatrixJson {
        rows: m.nrows(),
        cols: m.ncols(),
        re,
        im,
    }
}

fn matrix_from_json(j: MatrixJson) -> Result<CMatrix> {
    let n = j.rows * j.cols;
    if j.re.len() != n || j.im.len() != n {
        return Err(Error::Malformed(format!(
            "matrix {}x{} needs {} entries, got re={} im={}",
            j.rows,
            j.cols,
            n,
            j.re.len(),
            j.im.len()
        )));
    }
    let m = CMatrix::from_fn(j.rows, j.cols, |r, c| {
        C64::new(j.re[r * j.cols + c], j.im[r * j.cols + c])
    });
    ensure_finite(&m)?;
    Ok(m)
}

/// Serde adapter for `CMatrix` fields: `{"rows","cols","re","im"}`, row-major.
pub mod cmatrix_serde {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_json(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        matrix_from_json(j).map_err(serde::de::Error::custom)
    }
}

/// Standalone JSON wrapper for a bare matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDoc(#[serde(with = "cmatrix_serde")] pub CMatrix);

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    ambient_dim: usize,
    #[serde(with = "cmatrix_serde")]
    basis: CMatrix,
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceJson {
            ambient_dim: self.ambient_dim,
            basis: self.basis.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SubspaceJson::deserialize(d)?;
        if j.basis.nrows() != j.ambient_dim {
            return Err(serde::de::Error::custom("basis rows differ from ambient_dim"));
        }
        // Re-orthonormalize: files may carry any spanning set.
        let s = column_space(&j.basis, Tolerance::default()).map_err(serde::de::Error::custom)?;
        Ok(s)
    }
}

/// Orthonormal basis of the span of the columns of `m`.
pub fn column_space(m: &CMatrix, tol: Tolerance) -> Result<Subspace> {
    column_space_ref(m, 0.0, tol)
}

/// `column_space` with the rank cutoff taken relative to `max(sigma_max, reference)`.
pub fn column_space_ref(m: &CMatrix, reference: f64, tol: Tolerance) -> Result<Subspace> {
    ensure_finite(m)?;
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Ok(Subspace::zero(r));
    }
    let d = svd(m);
    let k = rank_from_ref(&d.s, reference, r, c, tol);
    let u = d.u;
    Ok(Subspace {
        ambient_dim: r,
        basis: cols_of(&u, 0, k),
    })
}

/// Orthonormal basis of `{x : m x = 0}`.
pub fn null_space(m: &CMatrix, tol: Tolerance) -> Result<Subspace> {
    null_space_ref(m, 0.0, tol)
}

/// `null_space` with the rank cutoff taken relative to `max(sigma_max, reference)`.
pub fn null_space_ref(m: &CMatrix, reference: f64, tol: Tolerance) -> Result<Subspace> {
    ensure_finite(m)?;
    let (r, c) = m.shape();
    if c == 0 {
        return Ok(Subspace::zero(0));
    }
    if r == 0 {
        return Ok(Subspace::full(c));
    }
    // Pad wide matrices with zero rows so the SVD returns a full right basis.
    let padded = if r < c {
        vstack(m, &CMatrix::zeros(c - r, c))
    } else {
        m.clone()
    };
    let d = svd(&padded);
    let k = rank_from_ref(&d.s, reference, r, c, tol);
    let v = d.v_t.adjoint();
    Ok(Subspace {
        ambient_dim: c,
        basis: cols_of(&v, k, c - k),
    })
}

fn same_ambient(u: &Subspace, v: &Subspace, ctx: &'static str) -> Result<()> {
    check_dim(ctx, u.ambient_dim, v.ambient_dim)
}

pub fn intersect(u: &Subspace, v: &Subspace, tol: Tolerance) -> Result<Subspace> {
    same_ambient(u, v, "intersect")?;
    if u.dim() == 0 || v.dim() == 0 {
        return Ok(Subspace::zero(u.ambient_dim));
    }
    if u.is_full() {
        return Ok(v.clone());
    }
    if v.is_full() {
        return Ok(u.clone());
    }
    let k = u.dim();
    let stacked = hstack(&u.basis, &(-&v.basis));
    let ns = null_space_ref(&stacked, 1.0, tol)?;
    if ns.dim() == 0 {
        return Ok(Subspace::zero(u.ambient_dim));
    }
    let a = rows_of(&ns.basis, 0, k);
    let b = rows_of(&ns.basis, k, v.dim());
    let w = (&u.basis * a + &v.basis * b).scale(0.5);
    // The null-space dimension is the intersection dimension; keep exactly that many.
    let uu = svd(&w).u;
    Ok(Subspace {
        ambient_dim: u.ambient_dim,
        basis: cols_of(&uu, 0, ns.dim()),
    })
}

pub fn subspace_sum(u: &Subspace, v: &Subspace, tol: Tolerance) -> Result<Subspace> {
    same_ambient(u, v, "subspace_sum")?;
    if v.dim() == 0 {
        return Ok(u.clone());
    }
    if u.dim() == 0 {
        return Ok(v.clone());
    }
    column_space(&hstack(&u.basis, &v.basis), tol)
}

pub fn orth_complement(u: &Subspace, tol: Tolerance) -> Result<Subspace> {
    if u.dim() == 0 {
        return Ok(Subspace::full(u.ambient_dim));
    }
    null_space_ref(&u.basis.adjoint(), 1.0, tol)
}

/// Frobenius residual of `V` outside `U`.
pub fn containment_residual(u: &Subspace, v: &Subspace) -> f64 {
    if v.dim() == 0 {
        return 0.0;
    }
    let p = &u.basis * (u.basis.adjoint() * &v.basis);
    (&v.basis - p).norm()
}

/// Whether `V` is contained in `U`.
pub fn contains(u: &Subspace, v: &Subspace, tol: Tolerance) -> Result<bool> {
    same_ambient(u, v, "contains")?;
    Ok(containment_residual(u, v) <= tol.angle_tol * (v.dim() as f64).sqrt())
}

/// Principal angles in ascending order, `min(dim U, dim V)` of them.
///
/// Cosines come from `U* V` and sines from the residual of the smaller space
/// outside the larger, so tiny angles are resolved accurately.
pub fn principal_angles(u: &Subspace, v: &Subspace) -> Result<Vec<f64>> {
    same_ambient(u, v, "principal_angles")?;
    let (big, small) = if u.dim() >= v.dim() { (u, v) } else { (v, u) };
    let k = small.dim();
    if k == 0 {
        return Ok(Vec::new());
    }
    let cosines = singular_values(&(big.basis.adjoint() * &small.basis));
    let resid = &small.basis - &big.basis * (big.basis.adjoint() * &small.basis);
    let mut sines = singular_values(&resid);
    sines.reverse();
    Ok((0..k)
        .map(|i| {
            let cs = cosines[i].clamp(0.0, 1.0);
            let sn = sines[i].clamp(0.0, 1.0);
            sn.atan2(cs)
        })
        .collect())
}

/// Largest principal angle, or `pi/2` when the dimensions differ.
pub fn subspace_distance(u: &Subspace, v: &Subspace) -> f64 {
    if u.ambient_dim != v.ambient_dim || u.dim() != v.dim() {
        return std::f64::consts::FRAC_PI_2;
    }
    principal_angles(u, v)
        .map(|a| a.into_iter().fold(0.0, f64::max))
        .unwrap_or(std::f64::consts::FRAC_PI_2)
}

pub fn subspace_eq(u: &Subspace, v: &Subspace, tol: Tolerance) -> bool {
    subspace_distance(u, v) <= tol.angle_tol
}
