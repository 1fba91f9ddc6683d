//! Linear relations as graph subspaces of `C^{n+m}` and their calculus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::krein::KreinSpace;
use crate::numkernel::{
    block_diag, column_space, column_space_ref, cols_of, eigenvalues, hstack, identity, intersect, inverse as mat_inverse,
    null_space_ref, rows_of, singular_values, subspace_eq, subspace_sum, vstack, zeros, CMatrix, CVector, Subspace,
    Tolerance, C64,
};

/// A subspace of `C^{from} x C^{to}`; the first `from` coordinates are inputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RelationJson", into = "RelationJson")]
pub struct LinearRelation {
    from_dim: usize,
    to_dim: usize,
    graph: Subspace,
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    from_dim: usize,
    to_dim: usize,
    graph: Subspace,
}

impl TryFrom<RelationJson> for LinearRelation {
    type Error = Error;
    fn try_from(j: RelationJson) -> Result<Self> {
        LinearRelation::new(j.from_dim, j.to_dim, j.graph)
    }
}

impl From<LinearRelation> for RelationJson {
    fn from(r: LinearRelation) -> Self {
        RelationJson {
            from_dim: r.from_dim,
            to_dim: r.to_dim,
            graph: r.graph,
        }
    }
}

/// Domain, range, kernel and multivalued part of a relation.
#[derive(Clone, Debug)]
pub struct RelationParts {
    pub dom: Subspace,
    pub ran: Subspace,
    pub ker: Subspace,
    pub mul: Subspace,
}

impl LinearRelation {
    pub fn new(from_dim: usize, to_dim: usize, graph: Subspace) -> Result<Self> {
        check_dim("relation graph ambient", from_dim + to_dim, graph.ambient_dim())?;
        Ok(LinearRelation {
            from_dim,
            to_dim,
            graph,
        })
    }

    /// Relation spanned by the pairs `(F e_i, G e_i)`.
    pub fn from_pairs(f: &CMatrix, g: &CMatrix, tol: Tolerance) -> Result<Self> {
        check_dim("from_pairs columns", f.ncols(), g.ncols())?;
        let graph = column_space(&vstack(f, g), tol)?;
        Ok(LinearRelation {
            from_dim: f.nrows(),
            to_dim: g.nrows(),
            graph,
        })
    }

    pub fn zero(from_dim: usize, to_dim: usize) -> Self {
        LinearRelation {
            from_dim,
            to_dim,
            graph: Subspace::zero(from_dim + to_dim),
        }
    }

    pub fn full(from_dim: usize, to_dim: usize) -> Self {
        LinearRelation {
            from_dim,
            to_dim,
            graph: Subspace::full(from_dim + to_dim),
        }
    }

    pub fn identity(n: usize) -> Self {
        rel_from_operator(&identity(n))
    }

    /// Graph of `z I` on `C^n`.
    pub fn scalar(n: usize, z: C64) -> Self {
        rel_from_operator(&identity(n).map(|x| x * z))
    }

    pub fn from_dim(&self) -> usize {
        self.from_dim
    }

    pub fn to_dim(&self) -> usize {
        self.to_dim
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.graph.dim()
    }

    pub fn is_square(&self) -> bool {
        self.from_dim == self.to_dim
    }

    /// Input block `F` of the graph basis `[F; G]`.
    pub fn f_block(&self) -> CMatrix {
        rows_of(self.graph.basis(), 0, self.from_dim)
    }

    /// Output block `G` of the graph basis `[F; G]`.
    pub fn g_block(&self) -> CMatrix {
        rows_of(self.graph.basis(), self.from_dim, self.to_dim)
    }

    pub fn dom(&self) -> Subspace {
        self.graph
            .project_coords(0, self.from_dim, Tolerance::default())
            .expect("finite basis")
    }

    pub fn ran(&self) -> Subspace {
        self.graph
            .project_coords(self.from_dim, self.to_dim, Tolerance::default())
            .expect("finite basis")
    }

    pub fn ker(&self) -> Subspace {
        let tol = Tolerance::default();
        if self.dim() == 0 {
            return Subspace::zero(self.from_dim);
        }
        let n = null_space_ref(&self.g_block(), 1.0, tol).expect("finite basis");
        column_space_ref(&(self.f_block() * n.basis()), 1.0, tol).expect("finite basis")
    }

    pub fn mul(&self) -> Subspace {
        self.inverse().ker()
    }

    pub fn is_operator(&self) -> bool {
        self.mul().dim() == 0
    }

    pub fn inverse(&self) -> LinearRelation {
        let f = self.f_block();
        let g = self.g_block();
        LinearRelation {
            from_dim: self.to_dim,
            to_dim: self.from_dim,
            graph: Subspace::from_orthonormal(vstack(&g, &f)).expect("row permutation keeps orthonormality"),
        }
    }

    /// Image under a linear map of the graph space.
    pub fn map_graph(&self, l: &CMatrix, from_dim: usize, to_dim: usize) -> Result<LinearRelation> {
        check_dim("map_graph target", from_dim + to_dim, l.nrows())?;
        let graph = self.graph.image(l, Tolerance::default())?;
        LinearRelation::new(from_dim, to_dim, graph)
    }

    /// `{(f, a f')}`.
    pub fn scale_output(&self, a: C64) -> LinearRelation {
        let l = block_diag(&identity(self.from_dim), &identity(self.to_dim).map(|x| x * a));
        self.map_graph(&l, self.from_dim, self.to_dim).expect("shapes agree")
    }

    /// `T - zI = {(f, f' - z f)}`.
    pub fn shift(&self, z: C64) -> Result<LinearRelation> {
        if !self.is_square() {
            return Err(Error::Precondition("shift needs a relation in one space".into()));
        }
        let n = self.from_dim;
        let mut l = identity(2 * n);
        for i in 0..n {
            l[(n + i, i)] = -z;
        }
        self.map_graph(&l, n, n)
    }

    /// Any `g` with `(x, g)` in the relation (the unique one for operators).
    pub fn apply(&self, x: &CVector) -> Result<CVector> {
        check_dim("apply", self.from_dim, x.len())?;
        if self.dim() == 0 {
            return if x.norm() == 0.0 {
                Ok(CVector::zeros(self.to_dim))
            } else {
                Err(Error::Precondition("vector outside the domain".into()))
            };
        }
        let f = self.f_block();
        let d = crate::numkernel::svd(&f);
        let cut = 1e-12 * d.s.first().copied().unwrap_or(0.0).max(1e-300);
        let mut w = d.u.adjoint() * x;
        for (i, si) in d.s.iter().enumerate() {
            w[i] = if *si > cut { w[i] / *si } else { C64::new(0.0, 0.0) };
        }
        let coeff = d.v_t.adjoint() * w;
        let resid = (&f * &coeff - x).norm();
        if resid > 1e-8 * x.norm().max(1.0) {
            return Err(Error::Precondition(format!("vector outside the domain (residual {resid:.2e})")));
        }
        Ok(self.g_block() * coeff)
    }

    /// Matrix of an everywhere defined operator.
    pub fn to_matrix(&self, tol: Tolerance) -> Result<CMatrix> {
        if self.dim() != self.from_dim {
            return Err(Error::Precondition(format!(
                "relation of dimension {} is not an everywhere defined operator on C^{}",
                self.dim(),
                self.from_dim
            )));
        }
        let finv = mat_inverse(&self.f_block(), tol)
            .map_err(|_| Error::Precondition("relation is not an everywhere defined operator".into()))?;
        Ok(self.g_block() * finv)
    }
}

/// `from_pairs` for vectors cut out of orthonormal bases: ranks are judged
/// against unit scale rather than the largest singular value.
pub fn pairs_ref(f: &CMatrix, g: &CMatrix, tol: Tolerance) -> Result<LinearRelation> {
    let graph = column_space_ref(&vstack(f, g), 1.0, tol)?;
    LinearRelation::new(f.nrows(), g.nrows(), graph)
}

pub fn rel_from_operator(m: &CMatrix) -> LinearRelation {
    let n = m.ncols();
    LinearRelation::from_pairs(&identity(n), m, Tolerance::default()).expect("finite operator")
}

pub fn parts(t: &LinearRelation) -> RelationParts {
    RelationParts {
        dom: t.dom(),
        ran: t.ran(),
        ker: t.ker(),
        mul: t.mul(),
    }
}

pub fn inverse(t: &LinearRelation) -> LinearRelation {
    t.inverse()
}

pub fn rel_eq(a: &LinearRelation, b: &LinearRelation, tol: Tolerance) -> bool {
    a.from_dim == b.from_dim && a.to_dim == b.to_dim && subspace_eq(&a.graph, &b.graph, tol)
}

/// Largest principal angle between two graphs (`pi/2` if the shapes differ).
pub fn rel_distance(a: &LinearRelation, b: &LinearRelation) -> f64 {
    if a.from_dim != b.from_dim || a.to_dim != b.to_dim {
        return std::f64::consts::FRAC_PI_2;
    }
    crate::numkernel::subspace_distance(&a.graph, &b.graph)
}

/// `A ⊆ B` as graphs.
pub fn rel_contains(b: &LinearRelation, a: &LinearRelation, tol: Tolerance) -> bool {
    a.from_dim == b.from_dim
        && a.to_dim == b.to_dim
        && crate::numkernel::contains(&b.graph, &a.graph, tol).unwrap_or(false)
}

/// `R X = {(f, h) : (f, g) in X, (g, h) in R for some g}`.
pub fn compose(r: &LinearRelation, x: &LinearRelation, tol: Tolerance) -> Result<LinearRelation> {
    check_dim("compose middle space", x.to_dim, r.from_dim)?;
    if x.dim() == 0 {
        // {(0, h) : (0, h) ∈ R}
        let m = r.mul();
        return LinearRelation::new(x.from_dim, r.to_dim, Subspace::from_orthonormal(vstack(&zeros(x.from_dim, m.dim()), m.basis()))?);
    }
    if r.dim() == 0 {
        // {(f, 0) : (f, 0) ∈ X}
        let k = x.ker();
        return LinearRelation::new(x.from_dim, r.to_dim, Subspace::from_orthonormal(vstack(k.basis(), &zeros(r.to_dim, k.dim())))?);
    }
    let p = x.dim();
    let sys = hstack(&x.g_block(), &(-r.f_block()));
    let ns = null_space_ref(&sys, 1.0, tol)?;
    if ns.dim() == 0 {
        return Ok(LinearRelation::zero(x.from_dim, r.to_dim));
    }
    let u = rows_of(ns.basis(), 0, p);
    let v = rows_of(ns.basis(), p, r.dim());
    pairs_ref(&(x.f_block() * u), &(r.g_block() * v), tol)
}

/// Componentwise sum `V ∔ W`.
pub fn cw_sum(v: &LinearRelation, w: &LinearRelation, tol: Tolerance) -> Result<LinearRelation> {
    check_dim("cw_sum from", v.from_dim, w.from_dim)?;
    check_dim("cw_sum to", v.to_dim, w.to_dim)?;
    LinearRelation::new(v.from_dim, v.to_dim, subspace_sum(&v.graph, &w.graph, tol)?)
}

pub fn rel_intersect(v: &LinearRelation, w: &LinearRelation, tol: Tolerance) -> Result<LinearRelation> {
    check_dim("intersect from", v.from_dim, w.from_dim)?;
    check_dim("intersect to", v.to_dim, w.to_dim)?;
    LinearRelation::new(v.from_dim, v.to_dim, intersect(&v.graph, &w.graph, tol)?)
}

/// Operatorwise sum `T + R = {(f, a + b) : (f, a) in T, (f, b) in R}`.
pub fn op_sum(t: &LinearRelation, r: &LinearRelation, tol: Tolerance) -> Result<LinearRelation> {
    check_dim("op_sum from", t.from_dim, r.from_dim)?;
    check_dim("op_sum to", t.to_dim, r.to_dim)?;
    if t.dim() == 0 || r.dim() == 0 {
        return Ok(LinearRelation::zero(t.from_dim, t.to_dim));
    }
    let p = t.dim();
    let ns = null_space_ref(&hstack(&t.f_block(), &(-r.f_block())), 1.0, tol)?;
    if ns.dim() == 0 {
        return Ok(LinearRelation::zero(t.from_dim, t.to_dim));
    }
    let u = rows_of(ns.basis(), 0, p);
    let v = rows_of(ns.basis(), p, r.dim());
    pairs_ref(&(t.f_block() * &u), &(t.g_block() * u + r.g_block() * v), tol)
}

/// Hilbert adjoint `T* = {(k, h) : <f', k> = <f, h> for all (f, f') in T}`.
pub fn hilbert_adjoint(t: &LinearRelation, tol: Tolerance) -> Result<LinearRelation> {
    if t.dim() == 0 {
        return Ok(LinearRelation::full(t.to_dim, t.from_dim));
    }
    // <f', k> - <f, h> = G* k - F* h over the basis columns.
    let sys = hstack(&t.g_block().adjoint(), &(-t.f_block().adjoint()));
    LinearRelation::new(t.to_dim, t.from_dim, null_space_ref(&sys, 1.0, tol)?)
}

/// Krein adjoint between `(C^n, J_from)` and `(C^m, J_to)`.
pub fn krein_adjoint(
    t: &LinearRelation,
    k_from: &KreinSpace,
    k_to: &KreinSpace,
    tol: Tolerance,
) -> Result<LinearRelation> {
    check_dim("krein_adjoint from", k_from.dim(), t.from_dim)?;
    check_dim("krein_adjoint to", k_to.dim(), t.to_dim)?;
    if t.dim() == 0 {
        return Ok(LinearRelation::full(t.to_dim, t.from_dim));
    }
    // [f', k]_to - [f, h]_from = G* J_to k - F* J_from h.
    let sys = hstack(
        &(t.g_block().adjoint() * k_to.j()),
        &(-(t.f_block().adjoint() * k_from.j())),
    );
    LinearRelation::new(t.to_dim, t.from_dim, null_space_ref(&sys, 1.0, tol)?)
}

/// `N_z(T) = {f : (f, z f) in T}`.
pub fn eigenspace(t: &LinearRelation, z: C64, tol: Tolerance) -> Result<Subspace> {
    square(t, "eigenspace")?;
    if t.dim() == 0 {
        return Ok(Subspace::zero(t.from_dim));
    }
    let f = t.f_block();
    let pencil = t.g_block() - f.map(|x| x * z);
    let ns = null_space_ref(&pencil, 1.0 + z.norm(), tol)?;
    column_space_ref(&(f * ns.basis()), 1.0, tol)
}

/// `T ∩ zI`.
pub fn graph_restriction(t: &LinearRelation, z: C64, tol: Tolerance) -> Result<LinearRelation> {
    let e = eigenspace(t, z, tol)?;
    let zf = e.basis().map(|x| x * z);
    LinearRelation::from_pairs(e.basis(), &zf, tol)
}

/// `V|_S = V ∩ (S x C^q)` for a subspace `S` of the input space of `V`.
pub fn restrict_to(v: &LinearRelation, s: &Subspace, tol: Tolerance) -> Result<LinearRelation> {
    check_dim("restriction subspace", v.from_dim, s.ambient_dim())?;
    let cyl = Subspace::from_orthonormal(block_diag(s.basis(), &identity(v.to_dim)))?;
    LinearRelation::new(v.from_dim, v.to_dim, intersect(&v.graph, &cyl, tol)?)
}

/// `V|_T` where `T` is a relation whose graph lives in the input space of `V`.
pub fn domain_restriction(v: &LinearRelation, t: &LinearRelation, tol: Tolerance) -> Result<LinearRelation> {
    restrict_to(v, &t.graph, tol)
}

/// `V(S) = ran(V ∩ (S x C^q))` for a subspace `S`.
pub fn image(v: &LinearRelation, s: &Subspace, tol: Tolerance) -> Result<Subspace> {
    check_dim("image subspace", v.from_dim, s.ambient_dim())?;
    if v.dim() == 0 {
        return Ok(Subspace::zero(v.to_dim));
    }
    if s.dim() == 0 {
        return Ok(v.mul());
    }
    let p = v.dim();
    let ns = null_space_ref(&hstack(&v.f_block(), &(-s.basis())), 1.0, tol)?;
    if ns.dim() == 0 {
        return Ok(Subspace::zero(v.to_dim));
    }
    column_space_ref(&(v.g_block() * rows_of(ns.basis(), 0, p)), 1.0, tol)
}

/// `V^{-1}(S)`.
pub fn preimage(v: &LinearRelation, s: &Subspace, tol: Tolerance) -> Result<Subspace> {
    image(&v.inverse(), s, tol)
}

/// Read a subspace of `C^{2k}` as a relation in `C^k`.
pub fn relation_in(s: Subspace) -> Result<LinearRelation> {
    let n = s.ambient_dim();
    if n % 2 != 0 {
        return Err(Error::Precondition(format!("odd ambient dimension {n} cannot be split")));
    }
    LinearRelation::new(n / 2, n / 2, s)
}

/// Shmul'yan transform `V(T)` of a relation `T` in `C^n` under `V` from
/// `C^{2n}` to `C^{2k}`; the result is a relation in `C^k`.
pub fn shmulyan(v: &LinearRelation, t: &LinearRelation, tol: Tolerance) -> Result<LinearRelation> {
    check_dim("shmulyan input", v.from_dim, t.from_dim + t.to_dim)?;
    relation_in(image(v, &t.graph, tol)?)
}

fn square(t: &LinearRelation, ctx: &'static str) -> Result<()> {
    check_dim(ctx, t.from_dim, t.to_dim)
}

/// Classification of a point `z` relative to a relation `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    /// Eigenvalue whose range `ran(T - z)` is not everything.
    P1,
    /// Eigenvalue with full range.
    P2,
    /// Not an eigenvalue, range not everything.
    R,
    Resolvent,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub z: C64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Eigenvalue>,
    /// Every complex number is an eigenvalue (singular pencil).
    pub all_of_c: bool,
    pub has_full_graph_dim: bool,
    pub classified: Vec<(C64, PointClass)>,
}

impl SpectrumReport {
    pub fn contains(&self, z: C64, rel_tol: f64) -> bool {
        self.all_of_c
            || self
                .eigenvalues
                .iter()
                .any(|e| (e.z - z).norm() <= rel_tol * z.norm().max(1.0))
    }

    pub fn nonreal(&self, imag_tol: f64) -> Vec<C64> {
        self.eigenvalues
            .iter()
            .filter(|e| e.z.im.abs() > imag_tol)
            .map(|e| e.z)
            .collect()
    }
}

const PROBE_POINTS: [(f64, f64); 3] = [(0.613, 0.417), (-1.271, 0.733), (0.318, -1.529)];
const VERIFY_TOL: f64 = 1e-7;

fn pencil_sigma_min(f: &CMatrix, g: &CMatrix, z: C64) -> f64 {
    let p = g - f.map(|x| x * z);
    singular_values(&p).last().copied().unwrap_or(0.0)
}

/// Finite point spectrum of a square relation.
///
/// With graph basis `[F; G]` (`k` columns), `z` is an eigenvalue exactly when
/// `G - zF` loses column rank: a null vector `c` with `Fc = 0` would force
/// `Gc = 0`, which the orthonormal basis rules out. If the rank is deficient
/// at three unrelated probe points the pencil is singular and every `z` is an
/// eigenvalue. Otherwise the `n x k` pencil is compressed to `k x k` with a
/// fixed pseudo-random row mixing, its eigenvalues are computed by a
/// shift-and-invert Schur step, and every candidate is verified on the
/// uncompressed pencil (compression can only add spurious roots).
pub fn point_spectrum(t: &LinearRelation, tol: Tolerance) -> Result<SpectrumReport> {
    square(t, "point_spectrum")?;
    let n = t.from_dim;
    let k = t.dim();
    let mut report = SpectrumReport {
        eigenvalues: Vec::new(),
        all_of_c: false,
        has_full_graph_dim: k == n,
        classified: Vec::new(),
    };
    if k == 0 {
        return Ok(report);
    }
    let f = t.f_block();
    let g = t.g_block();
    let scale = f.norm() + g.norm();
    let rank_deficient = |z: C64| {
        let p = &g - f.map(|x| x * z);
        crate::numkernel::rank_ref(&p, 1.0 + z.norm(), tol) < k
    };
    if k > n || PROBE_POINTS.iter().all(|&(a, b)| rank_deficient(C64::new(a, b))) {
        report.all_of_c = true;
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_9e4c11);
    let mut candidates: Vec<C64> = Vec::new();
    let mut solved = false;
    for _attempt in 0..4 {
        let r = CMatrix::from_fn(k, n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let rf = &r * &f;
        let rg = &r * &g;
        let alpha = C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
        let shifted = &rg - rf.map(|x| x * alpha);
        let Ok(inv) = mat_inverse(&shifted, Tolerance::new(1e-13, tol.angle_tol)?) else {
            continue;
        };
        let kmat = inv * &rf;
        let kn = crate::numkernel::op_norm(&kmat).max(1e-300);
        for mu in eigenvalues(&kmat) {
            if mu.norm() > 1e-10 * kn {
                candidates.push(alpha + mu.inv());
            }
        }
        solved = true;
        break;
    }
    if !solved {
        return Err(Error::NotInvertible("pencil compression failed for every mixing".into()));
    }
    for z in candidates {
        let smin = pencil_sigma_min(&f, &g, z);
        if smin > VERIFY_TOL * (scale * (1.0 + z.norm())) {
            continue;
        }
        if report
            .eigenvalues
            .iter()
            .any(|e| (e.z - z).norm() <= 1e-6 * z.norm().max(1.0))
        {
            continue;
        }
        let p = &g - f.map(|x| x * z);
        let mult = singular_values(&p)
            .iter()
            .filter(|&&s| s <= VERIFY_TOL * scale * (1.0 + z.norm()))
            .count()
            .max(1);
        report.eigenvalues.push(Eigenvalue { z, multiplicity: mult });
    }
    report
        .eigenvalues
        .sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    Ok(report)
}

/// Point spectrum together with a classification of the sampled points.
pub fn spectrum_report(t: &LinearRelation, samples: &[C64], tol: Tolerance) -> Result<SpectrumReport> {
    let mut rep = point_spectrum(t, tol)?;
    for &z in samples {
        rep.classified.push((z, classify_point(t, z, tol)?));
    }
    Ok(rep)
}

pub fn classify_point(t: &LinearRelation, z: C64, tol: Tolerance) -> Result<PointClass> {
    let eig = eigenspace(t, z, tol)?.dim() > 0;
    let full_range = t.shift(z)?.ran().is_full();
    Ok(match (eig, full_range) {
        (true, false) => PointClass::P1,
        (true, true) => PointClass::P2,
        (false, false) => PointClass::R,
        (false, true) => PointClass::Resolvent,
    })
}

/// `(T - z)^{-1}` is an everywhere defined operator.
pub fn in_resolvent(t: &LinearRelation, z: C64, tol: Tolerance) -> Result<bool> {
    square(t, "in_resolvent")?;
    Ok(t.dim() == t.from_dim && eigenspace(t, z, tol)?.dim() == 0)
}

/// Regularity-domain predicate: `ker(T - z) = {0}` (ranges are closed here).
pub fn is_regular_point(t: &LinearRelation, z: C64, tol: Tolerance) -> Result<bool> {
    Ok(eigenspace(t, z, tol)?.dim() == 0)
}

pub fn is_symmetric(t: &LinearRelation, k: &KreinSpace, tol: Tolerance) -> Result<bool> {
    let tp = krein_adjoint(t, k, k, tol)?;
    Ok(rel_contains(&tp, t, tol))
}

pub fn is_selfadjoint(t: &LinearRelation, k: &KreinSpace, tol: Tolerance) -> Result<bool> {
    let tp = krein_adjoint(t, k, k, tol)?;
    Ok(rel_eq(&tp, t, tol))
}

/// Graph of `[F; G]` restricted to the columns of an orthonormal set (helper for tests).
pub fn sub_relation(t: &LinearRelation, coeffs: &CMatrix, tol: Tolerance) -> Result<LinearRelation> {
    let b = t.graph.basis() * coeffs;
    LinearRelation::from_pairs(&rows_of(&b, 0, t.from_dim), &rows_of(&b, t.from_dim, t.to_dim), tol)
}

/// Keep the first `count` basis columns of a relation's graph.
pub fn leading_part(t: &LinearRelation, count: usize) -> LinearRelation {
    let b = cols_of(t.graph.basis(), 0, count.min(t.dim()));
    LinearRelation::new(t.from_dim, t.to_dim, Subspace::from_orthonormal(b).expect("columns of a basis"))
        .expect("same ambient")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krein::make_krein;
    use crate::numkernel::{c, diag_real, real_matrix, I, ONE, ZERO};

    fn t() -> Tolerance {
        Tolerance::default()
    }

    fn span_rel(n: usize, m: usize, rows: &[&[f64]]) -> LinearRelation {
        LinearRelation::new(n, m, Subspace::span(&real_matrix(rows)).unwrap()).unwrap()
    }

    #[test]
    fn operator_graphs() {
        let r = rel_from_operator(&real_matrix(&[&[2.0]]));
        let expected = span_rel(1, 1, &[&[1.0], &[2.0]]);
        assert!(rel_eq(&r, &expected, t()));
        assert_eq!(r.dom().dim(), 1);
        assert_eq!(r.mul().dim(), 0);
        assert_eq!(rel_from_operator(&crate::numkernel::identity(2)).dim(), 2);
    }

    #[test]
    fn parts_of_simple_relations() {
        let id = LinearRelation::identity(1);
        let p = parts(&id);
        assert_eq!((p.dom.dim(), p.ran.dim(), p.ker.dim(), p.mul.dim()), (1, 1, 0, 0));
        let pure_mul = span_rel(1, 1, &[&[0.0], &[1.0]]);
        assert_eq!(pure_mul.dom().dim(), 0);
        assert_eq!(pure_mul.mul().dim(), 1);
        let p = parts(&LinearRelation::full(1, 1));
        assert_eq!((p.dom.dim(), p.ran.dim(), p.ker.dim(), p.mul.dim()), (1, 1, 1, 1));
    }

    #[test]
    fn inverse_and_compose() {
        let two = rel_from_operator(&real_matrix(&[&[2.0]]));
        assert!(rel_eq(&two.inverse(), &rel_from_operator(&real_matrix(&[&[0.5]])), t()));
        let a = CMatrix::from_fn(2, 3, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        let b = CMatrix::from_fn(3, 2, |i, j| c(j as f64 * 0.3, i as f64 + 0.25));
        let ab = compose(&rel_from_operator(&a), &rel_from_operator(&b), t()).unwrap();
        assert!(rel_eq(&ab, &rel_from_operator(&(&a * &b)), t()));
        // {0} x C after C x {0}: every input reaches every output.
        let r = span_rel(1, 1, &[&[0.0], &[1.0]]);
        let x = span_rel(1, 1, &[&[1.0], &[0.0]]);
        assert!(rel_eq(&compose(&r, &x, t()).unwrap(), &LinearRelation::full(1, 1), t()));
    }

    #[test]
    fn sums() {
        let a = CMatrix::from_fn(2, 2, |i, j| c(i as f64 - j as f64, 1.0));
        let b = CMatrix::from_fn(2, 2, |i, j| c(0.5, i as f64 * j as f64));
        let s = op_sum(&rel_from_operator(&a), &rel_from_operator(&b), t()).unwrap();
        assert!(rel_eq(&s, &rel_from_operator(&(&a + &b)), t()));
        let disjoint = op_sum(&span_rel(2, 1, &[&[1.0], &[0.0], &[0.0]]), &span_rel(2, 1, &[&[0.0], &[1.0], &[0.0]]), t())
            .unwrap();
        assert_eq!(disjoint.dom().dim(), 0);
        // zI with a full multivalued part spans all of C^2 x C^2 here (n = 2, z = i).
        let zi = LinearRelation::scalar(2, I);
        let mul = LinearRelation::new(2, 2, Subspace::from_orthonormal(vstack(&CMatrix::zeros(2, 2), &identity(2))).unwrap())
            .unwrap();
        let sum = cw_sum(&zi, &mul, t()).unwrap();
        assert!(sum.graph().is_full());
    }

    #[test]
    fn adjoints() {
        let m = CMatrix::from_fn(2, 3, |i, j| c(i as f64 + 0.5 * j as f64, j as f64 - i as f64));
        let adj = hilbert_adjoint(&rel_from_operator(&m), t()).unwrap();
        assert!(rel_eq(&adj, &rel_from_operator(&m.adjoint()), t()));
        let pure_mul = span_rel(1, 1, &[&[0.0], &[1.0]]);
        let ker_side = span_rel(1, 1, &[&[1.0], &[0.0]]);
        // {0} x C and C x {0} are both selfadjoint.
        assert!(rel_eq(&hilbert_adjoint(&pure_mul, t()).unwrap(), &pure_mul, t()));
        assert!(rel_eq(&hilbert_adjoint(&ker_side, t()).unwrap(), &ker_side, t()));
        let km = make_krein(diag_real(&[-1.0])).unwrap();
        let ii = LinearRelation::scalar(1, I);
        assert!(rel_eq(&krein_adjoint(&ii, &km, &km, t()).unwrap(), &LinearRelation::scalar(1, -I), t()));
    }

    #[test]
    fn krein_adjoint_pairing() {
        let from = make_krein(diag_real(&[1.0, -1.0])).unwrap();
        let to = crate::krein::KreinSpace::hilbert(1);
        let tr = LinearRelation::from_pairs(
            &CMatrix::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.0, 1.0), c(-0.3, 0.0), c(2.0, 0.0)]),
            &CMatrix::from_row_slice(1, 2, &[c(0.2, -1.0), c(1.5, 0.5)]),
            t(),
        )
        .unwrap();
        let tp = krein_adjoint(&tr, &from, &to, t()).unwrap();
        for a in 0..tr.dim() {
            for b in 0..tp.dim() {
                let f = tr.f_block().column(a).into_owned();
                let fp = tr.g_block().column(a).into_owned();
                let k = tp.f_block().column(b).into_owned();
                let h = tp.g_block().column(b).into_owned();
                let lhs = crate::krein::indef_inner(&fp, &k, &to).unwrap();
                let rhs = crate::krein::indef_inner(&f, &h, &from).unwrap();
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eigen_data() {
        let id = LinearRelation::identity(2);
        assert_eq!(eigenspace(&id, ONE, t()).unwrap().dim(), 2);
        assert_eq!(eigenspace(&id, ZERO, t()).unwrap().dim(), 0);
        assert_eq!(eigenspace(&LinearRelation::full(1, 1), c(3.0, 1.0), t()).unwrap().dim(), 1);
        let r = graph_restriction(&LinearRelation::full(1, 1), c(5.0, 0.0), t()).unwrap();
        assert!(rel_eq(&r, &span_rel(1, 1, &[&[1.0], &[5.0]]), t()));
        let two = rel_from_operator(&real_matrix(&[&[2.0]]));
        assert_eq!(graph_restriction(&two, c(2.0, 0.0), t()).unwrap().dim(), 1);
        assert_eq!(graph_restriction(&two, c(3.0, 0.0), t()).unwrap().dim(), 0);
    }

    #[test]
    fn spectra() {
        let d = rel_from_operator(&diag_real(&[1.0, 2.0]));
        let s = point_spectrum(&d, t()).unwrap();
        assert_eq!(s.eigenvalues.len(), 2);
        assert!((s.eigenvalues[0].z - ONE).norm() < 1e-10);
        assert!((s.eigenvalues[1].z - c(2.0, 0.0)).norm() < 1e-10);
        assert!(point_spectrum(&LinearRelation::full(1, 1), t()).unwrap().all_of_c);
        let z = point_spectrum(&LinearRelation::zero(1, 1), t()).unwrap();
        assert!(z.eigenvalues.is_empty() && !z.all_of_c && !z.has_full_graph_dim);
        assert!(in_resolvent(&LinearRelation::identity(1), c(2.0, 0.0), t()).unwrap());
        assert!(!in_resolvent(&LinearRelation::identity(1), ONE, t()).unwrap());
        assert!(!in_resolvent(&LinearRelation::full(1, 1), c(0.3, 0.9), t()).unwrap());
    }

    #[test]
    fn spectrum_with_multivalued_part() {
        // T = graph of 3 on e1, plus {0} x span{e2}: only eigenvalue is 3.
        let tr = LinearRelation::from_pairs(
            &real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]),
            &real_matrix(&[&[3.0, 0.0], &[0.0, 1.0]]),
            t(),
        )
        .unwrap();
        let s = point_spectrum(&tr, t()).unwrap();
        assert!(!s.all_of_c);
        assert_eq!(s.eigenvalues.len(), 1);
        assert!((s.eigenvalues[0].z - c(3.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn symmetry_predicates() {
        let h = real_matrix(&[&[1.0, 2.0], &[2.0, -1.0]]);
        let k = crate::krein::KreinSpace::hilbert(2);
        assert!(is_selfadjoint(&rel_from_operator(&h), &k, t()).unwrap());
        let k1 = crate::krein::KreinSpace::hilbert(1);
        let zero = LinearRelation::zero(1, 1);
        assert!(is_symmetric(&zero, &k1, t()).unwrap());
        assert!(!is_selfadjoint(&zero, &k1, t()).unwrap());
        assert!(!is_symmetric(&LinearRelation::scalar(1, I), &k1, t()).unwrap());
    }

    #[test]
    fn shmulyan_with_u_j() {
        let j = diag_real(&[1.0, -1.0]);
        let v = rel_from_operator(&block_diag(&identity(2), &j));
        let tr = LinearRelation::identity(2);
        assert!(rel_eq(&shmulyan(&v, &tr, t()).unwrap(), &rel_from_operator(&j), t()));
        let idv = LinearRelation::identity(4);
        assert!(rel_eq(&shmulyan(&idv, &tr, t()).unwrap(), &tr, t()));
    }

    #[test]
    fn json_shape() {
        let r = rel_from_operator(&real_matrix(&[&[2.0]]));
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.starts_with("{\"from_dim\":1,\"to_dim\":1,\"graph\":"));
        let back: LinearRelation = serde_json::from_str(&s).unwrap();
        assert!(rel_eq(&back, &r, t()));
    }
}
