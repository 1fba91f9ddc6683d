//! Transformations of boundary pairs.
//!
//! Right transforms `Γ ↦ Γ V⁻¹` use a unitary `V` between doubled state
//! spaces, usually given as a block operator `(A, B; C, D)`. Left transforms
//! `Γ ↦ V Γ` act on the boundary side: ε-scaling, κ-scaled triples and the
//! quasi boundary triple map `(G⁻¹, 0; E G⁻¹, G*)`.

use serde::{Deserialize, Serialize};

use crate::boundary::{nonreal, projections_pi, underlying_t, weyl, BoundaryPair};
use crate::error::{check_dim, Error, Result};
use crate::krein::KreinSpace;
use crate::numkernel::{
    blocks, column_space, contains, identity, intersect, inverse as mat_inverse, null_space, op_norm, rows_of,
    subspace_eq, CMatrix, CVector, Subspace, Tolerance, C64, ONE,
};
use crate::relcalc::{
    compose, eigenspace, graph_restriction, hilbert_adjoint, image, in_resolvent, krein_adjoint, op_sum, pairs_ref,
    preimage, rel_contains, rel_eq, rel_from_operator, relation_in, shmulyan, LinearRelation,
};

/// Residual bound for the six block conditions, relative to `max(1, ‖V‖²)`.
pub const STD_TOL: f64 = 1e-10;

pub const STD_CONDITIONS: [&str; 6] = [
    "A⁺D − C⁺B = I",
    "AD⁺ − BC⁺ = I",
    "A⁺C selfadjoint",
    "AB⁺ selfadjoint",
    "B⁺D selfadjoint",
    "CD⁺ selfadjoint",
];

/// Block operator `(A, B; C, D)` from `(C^{2n}, Ĵ_from)` to `(C^{2k}, Ĵ_to)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "StdUnitaryJson", into = "StdUnitaryJson")]
pub struct StdUnitaryOp {
    a: CMatrix,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
    k_from: KreinSpace,
    k_to: KreinSpace,
}

#[derive(Serialize, Deserialize)]
struct StdUnitaryJson {
    #[serde(rename = "A", with = "crate::numkernel::cmatrix_serde")]
    a: CMatrix,
    #[serde(rename = "B", with = "crate::numkernel::cmatrix_serde")]
    b: CMatrix,
    #[serde(rename = "C", with = "crate::numkernel::cmatrix_serde")]
    c: CMatrix,
    #[serde(rename = "D", with = "crate::numkernel::cmatrix_serde")]
    d: CMatrix,
    #[serde(rename = "K_from")]
    k_from: KreinSpace,
    #[serde(rename = "K_to")]
    k_to: KreinSpace,
}

impl TryFrom<StdUnitaryJson> for StdUnitaryOp {
    type Error = Error;
    fn try_from(j: StdUnitaryJson) -> Result<Self> {
        make_std_unitary(j.a, j.b, j.c, j.d, j.k_from, j.k_to)
    }
}

impl From<StdUnitaryOp> for StdUnitaryJson {
    fn from(v: StdUnitaryOp) -> Self {
        StdUnitaryJson {
            a: v.a,
            b: v.b,
            c: v.c,
            d: v.d,
            k_from: v.k_from,
            k_to: v.k_to,
        }
    }
}

/// `X⁺ = J_from X* J_to` for `X : C^{n_from} → C^{n_to}`.
fn plus(x: &CMatrix, from: &KreinSpace, to: &KreinSpace) -> CMatrix {
    from.j() * x.adjoint() * to.j()
}

fn sa_defect(x: &CMatrix, k: &KreinSpace) -> f64 {
    (x - k.j() * x.adjoint() * k.j()).norm()
}

/// Residuals of the six block conditions, each divided by `max(1, ‖V‖²)`.
pub fn std_residuals(
    a: &CMatrix,
    b: &CMatrix,
    c: &CMatrix,
    d: &CMatrix,
    kf: &KreinSpace,
    kt: &KreinSpace,
) -> Result<[f64; 6]> {
    let (nf, nt) = (kf.dim(), kt.dim());
    for blk in [a, b, c, d] {
        check_dim("block rows", nt, blk.nrows())?;
        check_dim("block columns", nf, blk.ncols())?;
    }
    let (ap, bp, cp, dp) = (plus(a, kf, kt), plus(b, kf, kt), plus(c, kf, kt), plus(d, kf, kt));
    let scale = op_norm(&blocks(a, b, c, d)).powi(2).max(1.0);
    let r = [
        (&ap * d - &cp * b - identity(nf)).norm(),
        (a * &dp - b * &cp - identity(nt)).norm(),
        sa_defect(&(&ap * c), kf),
        sa_defect(&(a * &bp), kt),
        sa_defect(&(&bp * d), kf),
        sa_defect(&(c * &dp), kt),
    ];
    Ok(r.map(|x| x / scale))
}

/// Validate `(A, B; C, D)` as a standard unitary operator.
pub fn make_std_unitary(
    a: CMatrix,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
    k_from: KreinSpace,
    k_to: KreinSpace,
) -> Result<StdUnitaryOp> {
    for blk in [&a, &b, &c, &d] {
        if !crate::numkernel::is_finite(blk) {
            return Err(Error::NonFinite);
        }
    }
    let res = std_residuals(&a, &b, &c, &d, &k_from, &k_to)?;
    let failed: Vec<String> = res
        .iter()
        .zip(STD_CONDITIONS)
        .filter(|(r, _)| **r > STD_TOL)
        .map(|(r, name)| format!("{name} (residual {r:.2e})"))
        .collect();
    if !failed.is_empty() {
        return Err(Error::NotStdUnitary(failed.join("; ")));
    }
    let v = StdUnitaryOp {
        a,
        b,
        c,
        d,
        k_from,
        k_to,
    };
    if !is_unitary_relation(&v.to_relation(), &v.k_from, &v.k_to, Tolerance::default())? {
        return Err(Error::NotStdUnitary("graph is not a unitary relation between the doubled spaces".into()));
    }
    Ok(v)
}

/// `V = V_#` for a relation between the doubled spaces of `kf` and `kt`.
pub fn is_unitary_relation(v: &LinearRelation, kf: &KreinSpace, kt: &KreinSpace, tol: Tolerance) -> Result<bool> {
    let sharp = krein_adjoint(v, &kf.doubled(), &kt.doubled(), tol)?.inverse();
    Ok(rel_eq(v, &sharp, tol))
}

/// `V ⊆ V_#` for a relation between the doubled spaces of `kf` and `kt`.
pub fn is_isometric_relation(v: &LinearRelation, kf: &KreinSpace, kt: &KreinSpace, tol: Tolerance) -> Result<bool> {
    let sharp = krein_adjoint(v, &kf.doubled(), &kt.doubled(), tol)?.inverse();
    Ok(rel_contains(&sharp, v, tol))
}

/// `V(A, B; J_from, J_to) = (A, B; −J_to B J_from, J_to A J_from)`, which
/// commutes with the hat symmetries and is unitary in the Hilbert sense too.
pub fn make_commuting_unitary(a: CMatrix, b: CMatrix, j_from: KreinSpace, j_to: KreinSpace) -> Result<StdUnitaryOp> {
    let (nf, nt) = (j_from.dim(), j_to.dim());
    check_dim("A rows", nt, a.nrows())?;
    check_dim("A columns", nf, a.ncols())?;
    check_dim("B rows", nt, b.nrows())?;
    check_dim("B columns", nf, b.ncols())?;
    let (jf, jt) = (j_from.j(), j_to.j());
    let mut failed = Vec::new();
    let r1 = (a.adjoint() * &a + jf * b.adjoint() * &b * jf - identity(nf)).norm();
    let r2 = (&a * a.adjoint() + &b * b.adjoint() - identity(nt)).norm();
    let r3 = sa_defect(&(a.adjoint() * &b), &j_from);
    let r4 = sa_defect(&(&a * plus(&b, &j_from, &j_to)), &j_to);
    for (r, name) in [
        (r1, "A*A + J B*B J = I"),
        (r2, "AA* + BB* = I"),
        (r3, "A*B selfadjoint"),
        (r4, "AB⁺ selfadjoint"),
    ] {
        if r > STD_TOL {
            failed.push(format!("{name} (residual {r:.2e})"));
        }
    }
    if !failed.is_empty() {
        return Err(Error::NotStdUnitary(failed.join("; ")));
    }
    let c = -(jt * &b * jf);
    let d = jt * &a * jf;
    make_std_unitary(a, b, c, d, j_from, j_to)
}

impl StdUnitaryOp {
    pub fn a(&self) -> &CMatrix {
        &self.a
    }
    pub fn b(&self) -> &CMatrix {
        &self.b
    }
    pub fn c(&self) -> &CMatrix {
        &self.c
    }
    pub fn d(&self) -> &CMatrix {
        &self.d
    }
    pub fn k_from(&self) -> &KreinSpace {
        &self.k_from
    }
    pub fn k_to(&self) -> &KreinSpace {
        &self.k_to
    }

    pub fn matrix(&self) -> CMatrix {
        blocks(&self.a, &self.b, &self.c, &self.d)
    }

    pub fn to_relation(&self) -> LinearRelation {
        rel_from_operator(&self.matrix())
    }

    /// `U_J = (I, 0; 0, J)` from `(C^n, J)` to the Hilbert space `C^n`.
    pub fn u_j(k: &KreinSpace) -> StdUnitaryOp {
        let n = k.dim();
        make_commuting_unitary(identity(n), CMatrix::zeros(n, n), k.clone(), KreinSpace::hilbert(n))
            .expect("U_J is standard unitary")
    }

    /// `(0, I; −I, 0)` on the Hilbert space `C^n`.
    pub fn symplectic_flip(n: usize) -> StdUnitaryOp {
        let h = KreinSpace::hilbert(n);
        make_std_unitary(
            CMatrix::zeros(n, n),
            identity(n),
            -identity(n),
            CMatrix::zeros(n, n),
            h.clone(),
            h,
        )
        .expect("the flip is standard unitary")
    }

    /// `(cos θ, sin θ; −sin θ, cos θ)` on the Hilbert space `C^n`.
    pub fn rotation(n: usize, theta: f64) -> StdUnitaryOp {
        let h = KreinSpace::hilbert(n);
        let a = identity(n).map(|x| x * theta.cos());
        let b = identity(n).map(|x| x * theta.sin());
        make_commuting_unitary(a, b, h.clone(), h).expect("rotations are standard unitary")
    }

    /// `(X⁻¹, 0; 0, X⁺)` for an invertible `X` on `(C^n, J)`.
    pub fn similarity(x: &CMatrix, k: &KreinSpace, tol: Tolerance) -> Result<StdUnitaryOp> {
        let xi = mat_inverse(x, tol)?;
        let n = k.dim();
        make_std_unitary(
            xi,
            CMatrix::zeros(n, n),
            CMatrix::zeros(n, n),
            plus(x, k, k),
            k.clone(),
            k.clone(),
        )
    }

    /// Read the blocks off an everywhere defined operator relation.
    pub fn from_relation(v: &LinearRelation, k_from: KreinSpace, k_to: KreinSpace, tol: Tolerance) -> Result<Self> {
        check_dim("relation input", 2 * k_from.dim(), v.from_dim())?;
        check_dim("relation output", 2 * k_to.dim(), v.to_dim())?;
        let m = v.to_matrix(tol)?;
        let (nf, nt) = (k_from.dim(), k_to.dim());
        let a = m.view((0, 0), (nt, nf)).into_owned();
        let b = m.view((0, nf), (nt, nf)).into_owned();
        let c = m.view((nt, 0), (nt, nf)).into_owned();
        let d = m.view((nt, nf), (nt, nf)).into_owned();
        make_std_unitary(a, b, c, d, k_from, k_to)
    }

    /// `V⁻¹ = V⁺ = (D⁺, −B⁺; −C⁺, A⁺)`.
    pub fn inverse(&self) -> StdUnitaryOp {
        let (kf, kt) = (&self.k_from, &self.k_to);
        StdUnitaryOp {
            a: plus(&self.d, kf, kt),
            b: -plus(&self.b, kf, kt),
            c: -plus(&self.c, kf, kt),
            d: plus(&self.a, kf, kt),
            k_from: kt.clone(),
            k_to: kf.clone(),
        }
    }

    /// `p_V(z) = z²B + z(A − D) − C`.
    pub fn p_v(&self, z: C64) -> CMatrix {
        self.b.map(|x| x * z * z) + (&self.a - &self.d).map(|x| x * z) - &self.c
    }

    /// `p_V(z; ·)` on graph vectors `[F; G]`: `z(AF + BG) − (CF + DG)`.
    pub fn p_v_on(&self, z: C64, f: &CMatrix, g: &CMatrix) -> CMatrix {
        (&self.a * f + &self.b * g).map(|x| x * z) - (&self.c * f + &self.d * g)
    }

    /// `W(A, B; z) = A + zB`.
    pub fn w_ab(&self, z: C64) -> CMatrix {
        &self.a + self.b.map(|x| x * z)
    }

    /// Linear fractional transform of the scalar `z`: `(C + zD)(A + zB)⁻¹`.
    pub fn phi_scalar(&self, z: C64, tol: Tolerance) -> Result<CMatrix> {
        let w = mat_inverse(&self.w_ab(z), tol)?;
        Ok((&self.c + self.d.map(|x| x * z)) * w)
    }
}

/// `W(X, Y; T) = {(f, X f + Y f') : (f, f') ∈ T}`.
pub fn w_relation(x: &CMatrix, y: &CMatrix, t: &LinearRelation) -> Result<LinearRelation> {
    let n = t.from_dim();
    check_dim("W input", n, x.ncols())?;
    check_dim("W input", n, y.ncols())?;
    let k = x.nrows();
    let mut l = CMatrix::zeros(n + k, 2 * n);
    l.view_mut((0, 0), (n, n)).copy_from(&identity(n));
    l.view_mut((n, 0), (k, n)).copy_from(x);
    l.view_mut((n, n), (k, n)).copy_from(y);
    t.map_graph(&l, n, k)
}

#[derive(Clone, Debug)]
pub struct LftResult {
    pub t_prime: LinearRelation,
    pub w_forward: LinearRelation,
    /// `0 ∉ σ_p(W(A, B; T))`.
    pub invertible: bool,
    /// `W(C, D; T) W(A, B; T)⁻¹`, only formed when `invertible`.
    pub composition: Option<LinearRelation>,
    pub composition_agrees: Option<bool>,
    /// `dom T = ran W(D⁺, −B⁺; T')`, `dom T' = ran W(A, B; T)`,
    /// `ran T = ran W(−C⁺, A⁺; T')`, `ran T' = ran W(C, D; T)`.
    pub range_identities: [bool; 4],
}

/// `φ_V(T) = V(T)`, cross-checked against `W(C, D; T) W(A, B; T)⁻¹`.
pub fn lft(v: &StdUnitaryOp, t: &LinearRelation, tol: Tolerance) -> Result<LftResult> {
    let n = v.k_from.dim();
    check_dim("lft relation", n, t.from_dim())?;
    check_dim("lft relation", n, t.to_dim())?;
    let t_prime = shmulyan(&v.to_relation(), t, tol)?;
    let w_ab = w_relation(&v.a, &v.b, t)?;
    let w_cd = w_relation(&v.c, &v.d, t)?;
    let invertible = w_ab.ker().dim() == 0;
    let (composition, composition_agrees) = if invertible {
        let comp = compose(&w_cd, &w_ab.inverse(), tol)?;
        let ok = rel_eq(&comp, &t_prime, tol);
        (Some(comp), Some(ok))
    } else {
        (None, None)
    };
    let inv = v.inverse();
    let range_identities = [
        subspace_eq(&t.dom(), &w_relation(&inv.a, &inv.b, &t_prime)?.ran(), tol),
        subspace_eq(&t_prime.dom(), &w_ab.ran(), tol),
        subspace_eq(&t.ran(), &w_relation(&inv.c, &inv.d, &t_prime)?.ran(), tol),
        subspace_eq(&t_prime.ran(), &w_cd.ran(), tol),
    ];
    Ok(LftResult {
        t_prime,
        w_forward: w_ab,
        invertible,
        composition,
        composition_agrees,
        range_identities,
    })
}

/// The alternative form `T' = W̃ T W_*` with `W_* = (A + BT)⁻¹`, for an
/// operator `T` given by its matrix. Returns whether `W̃ T W_* = φ_V(T)` and
/// whether `(W̃ − D) T = C`; the two answers should agree.
pub fn wtilde_check(v: &StdUnitaryOp, t: &CMatrix, w_tilde: &CMatrix, tol: Tolerance) -> Result<(bool, bool)> {
    let w_star = mat_inverse(&(&v.a + &v.b * t), tol)?;
    let phi = (&v.c + &v.d * t) * &w_star;
    let alt = w_tilde * t * &w_star;
    let scale = op_norm(&phi).max(1.0);
    let same = (&alt - &phi).norm() <= 1e-8 * scale;
    let cond = ((w_tilde - &v.d) * t - &v.c).norm() <= 1e-8 * op_norm(&v.matrix()).max(1.0) * op_norm(t).max(1.0);
    Ok((same, cond))
}

/// Result of `Γ ↦ Γ V⁻¹`.
#[derive(Clone, Debug)]
pub struct RightTransform {
    pub pair: BoundaryPair,
    /// `V(T)`.
    pub t_prime: LinearRelation,
    /// `ker V ⊆ ker Γ`.
    pub one_to_one: bool,
}

/// `Γ' = Γ V⁻¹` for a relation `V` from `(C^{2n}, Ĵ)` to `(C^{2k}, Ĵ_to)`.
pub fn transform_right(bp: &BoundaryPair, v: &LinearRelation, k_to: &KreinSpace) -> Result<RightTransform> {
    let tol = bp.tol();
    check_dim("V input", 2 * bp.n(), v.from_dim())?;
    check_dim("V output", 2 * k_to.dim(), v.to_dim())?;
    if !contains(&v.dom(), bp.a_star().graph(), tol)? {
        return Err(Error::Precondition("dom V does not cover A_*".into()));
    }
    let gamma = compose(bp.gamma(), &v.inverse(), tol)?;
    let pair = BoundaryPair::new(k_to.clone(), bp.l_dim(), gamma, tol)?;
    let t = underlying_t(bp).or_else(|_| Ok::<_, Error>(relation_in(bp.gamma().ker())?))?;
    let t_prime = shmulyan(v, &t, tol)?;
    let one_to_one = contains(&bp.gamma().ker(), &v.ker(), tol)?;
    Ok(RightTransform {
        pair,
        t_prime,
        one_to_one,
    })
}

fn same_space(a: &KreinSpace, b: &KreinSpace) -> Result<()> {
    check_dim("Krein space", a.dim(), b.dim())?;
    if (a.j() - b.j()).norm() > 1e-10 {
        return Err(Error::Precondition("V starts from a different Krein space".into()));
    }
    Ok(())
}

pub fn transform_right_std(bp: &BoundaryPair, v: &StdUnitaryOp) -> Result<RightTransform> {
    same_space(bp.h(), &v.k_from)?;
    transform_right(bp, &v.to_relation(), &v.k_to)
}

/// `N̂^V_z(A_*) = dom(V ∩ (A_* × zI))`.
pub fn n_hat_v(bp: &BoundaryPair, v: &LinearRelation, z: C64) -> Result<Subspace> {
    let tol = bp.tol();
    let k = v.to_dim() / 2;
    let a = bp.a_star();
    let zi = LinearRelation::scalar(k, z);
    let cyl = Subspace::from_orthonormal(crate::numkernel::block_diag(a.graph().basis(), zi.graph().basis()))?;
    let cut = LinearRelation::new(v.from_dim(), v.to_dim(), intersect(v.graph(), &cyl, tol)?)?;
    Ok(cut.dom())
}

/// Compare `M_{Γ'}(z)` with `Γ(N̂^V_z(A_*))`; returns the principal-angle distance.
pub fn right_weyl_residual(bp: &BoundaryPair, v: &LinearRelation, transformed: &BoundaryPair, z: C64) -> Result<f64> {
    let lhs = weyl(transformed, z)?.m;
    let rhs = relation_in(image(bp.gamma(), &n_hat_v(bp, v, z)?, bp.tol())?)?;
    Ok(crate::relcalc::rel_distance(&lhs, &rhs))
}

/// Apply an operator-like relation column by column.
pub fn apply_columns(r: &LinearRelation, x: &CMatrix) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(r.to_dim(), x.ncols());
    for j in 0..x.ncols() {
        let col: CVector = x.column(j).into_owned();
        out.set_column(j, &r.apply(&col)?);
    }
    Ok(out)
}

/// Membership data for `ρ_V = res T₀ ∩ res T₀'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoV {
    pub in_res_t0: bool,
    /// `0 ∈ res p_V(z; T₀)`.
    pub p_invertible: bool,
    /// Computed directly from the transformed triple.
    pub in_res_t0_prime: bool,
}

impl RhoV {
    pub fn contains(&self) -> bool {
        self.in_res_t0 && self.p_invertible
    }
    /// The two ways of deciding `z ∈ res T₀'` agree.
    pub fn consistent(&self) -> bool {
        self.p_invertible == self.in_res_t0_prime
    }
}

fn p_on_t0(bp: &BoundaryPair, v: &StdUnitaryOp, z: C64) -> Result<(LinearRelation, CMatrix)> {
    let t0 = projections_pi(bp)?.t0;
    let n = bp.n();
    let q = t0.graph().basis();
    let p = v.p_v_on(z, &rows_of(q, 0, n), &rows_of(q, n, n));
    Ok((t0, p))
}

fn invertible(p: &CMatrix, tol: Tolerance) -> bool {
    p.nrows() == p.ncols() && mat_inverse(p, tol).is_ok()
}

pub fn rho_v(bp: &BoundaryPair, v: &StdUnitaryOp, z: C64) -> Result<RhoV> {
    same_space(bp.h(), &v.k_from)?;
    let tol = bp.tol();
    let (t0, p) = p_on_t0(bp, v, z)?;
    let transformed = transform_right_std(bp, v)?.pair;
    let t0p = projections_pi(&transformed)?.t0;
    Ok(RhoV {
        in_res_t0: in_resolvent(&t0, z, tol)?,
        p_invertible: invertible(&p, tol),
        in_res_t0_prime: in_resolvent(&t0p, z, tol)?,
    })
}

fn weyl_matrix(bp: &BoundaryPair, z: C64) -> Result<(CMatrix, CMatrix)> {
    let w = weyl(bp, z)?;
    let tol = bp.tol();
    let m = w
        .m
        .to_matrix(tol)
        .map_err(|_| Error::Precondition("M(z) is not an everywhere defined operator".into()))?;
    let g = w
        .gamma_field
        .to_matrix(tol)
        .map_err(|_| Error::Precondition("γ(z) is not an everywhere defined operator".into()))?;
    Ok((m, g))
}

/// `Δ^V_Γ(z) = −Γ₁ p_V(z; T₀)⁻¹ p_V(z) γ(z)` for an ordinary boundary triple.
///
/// `p_V(z; ·)` acts on pairs in `T₀`, so `T₀` may be multivalued.
pub fn delta_correction(bp: &BoundaryPair, v: &StdUnitaryOp, z: C64) -> Result<CMatrix> {
    nonreal(z)?;
    if !bp.is_obt() {
        return Err(Error::Precondition("Δ needs an ordinary boundary triple".into()));
    }
    same_space(bp.h(), &v.k_from)?;
    let tol = bp.tol();
    let (t0, p) = p_on_t0(bp, v, z)?;
    if !in_resolvent(&t0, z, tol)? {
        return Err(Error::Precondition(format!("z = {z} lies in σ(T₀)")));
    }
    let pinv = mat_inverse(&p, tol).map_err(|_| Error::Precondition(format!("z = {z} lies outside ρ_V")))?;
    let (_, gamma) = weyl_matrix(bp, z)?;
    let coeff = -(pinv * v.p_v(z) * gamma);
    let f0 = t0.graph().basis() * coeff;
    let g1 = projections_pi(bp)?.gamma1;
    apply_columns(&g1, &f0)
}

/// One sample of the identity `M_{Γ'}(z) = M_Γ(z) + Δ(z)`.
#[derive(Clone, Debug)]
pub struct DeltaSample {
    pub z: C64,
    pub delta: CMatrix,
    pub m: CMatrix,
    pub m_prime: CMatrix,
    /// `‖M' − M − Δ‖ / max(1, ‖M'‖)`.
    pub residual: f64,
}

pub fn delta_sample(bp: &BoundaryPair, v: &StdUnitaryOp, z: C64) -> Result<DeltaSample> {
    let delta = delta_correction(bp, v, z)?;
    let transformed = transform_right_std(bp, v)?.pair;
    let (m, _) = weyl_matrix(bp, z)?;
    let (m_prime, _) = weyl_matrix(&transformed, z)?;
    let residual = (&m_prime - &m - &delta).norm() / op_norm(&m_prime).max(1.0);
    Ok(DeltaSample {
        z,
        delta,
        m,
        m_prime,
        residual,
    })
}

/// `z Γ₁ (J T₀ − z)⁻¹ (I − J) γ(z)`, the correction for `V = U_J`,
/// evaluated through the resolvent of `J T₀`.
pub fn delta_ftex(bp: &BoundaryPair, z: C64) -> Result<CMatrix> {
    nonreal(z)?;
    let tol = bp.tol();
    let n = bp.n();
    let j = bp.h().j().clone();
    let pi = projections_pi(bp)?;
    let jt0 = pi.t0.map_graph(&crate::numkernel::block_diag(&identity(n), &j), n, n)?;
    let res = jt0.shift(z)?.inverse().to_matrix(tol)?;
    let (_, gamma) = weyl_matrix(bp, z)?;
    let g = (identity(n) - &j) * gamma;
    let f = &res * &g;
    let fp = &j * (&g + f.map(|x| x * z));
    let pairs = crate::numkernel::vstack(&f, &fp);
    Ok(apply_columns(&pi.gamma1, &pairs)?.map(|x| x * z))
}

/// `N_z(T⁺) ⊆ ker p_V(z)`.
pub fn delta0_kernel_condition(bp: &BoundaryPair, v: &StdUnitaryOp, z: C64) -> Result<bool> {
    let tol = bp.tol();
    let tp = crate::boundary::t_plus(bp)?;
    let nz = eigenspace(&tp, z, tol)?;
    let kp = crate::numkernel::null_space_ref(&v.p_v(z), 1.0, tol)?;
    contains(&kp, &nz, tol)
}

/// Radius `‖B W(A, B; z₀)⁻¹‖⁻¹` of the disc around `z₀` (infinite when the product vanishes).
pub fn delta0b_radius(v: &StdUnitaryOp, z0: C64, tol: Tolerance) -> Result<f64> {
    let w = mat_inverse(&v.w_ab(z0), tol)?;
    let nb = op_norm(&(&v.b * w));
    Ok(if nb == 0.0 { f64::INFINITY } else { 1.0 / nb })
}

/// `W(A, B; z) N_z(T⁺) ⊆ N_z(φ_V(z))`, or `None` when `z` is outside the disc around `z₀`.
pub fn delta0b_condition(bp: &BoundaryPair, v: &StdUnitaryOp, z0: C64, z: C64) -> Result<Option<bool>> {
    let tol = bp.tol();
    if (z - z0).norm() >= delta0b_radius(v, z0, tol)? {
        return Ok(None);
    }
    let tp = crate::boundary::t_plus(bp)?;
    let nz = eigenspace(&tp, z, tol)?;
    let lhs = nz.image(&v.w_ab(z), tol)?;
    let phi = v.phi_scalar(z, tol)?;
    let k = phi.nrows();
    let rhs = crate::numkernel::null_space_ref(&(phi - identity(k).map(|x| x * z)), 1.0 + z.norm(), tol)?;
    Ok(Some(contains(&rhs, &lhs, tol)?))
}

/// `J`-orthogonal projection onto a `J`-nondegenerate subspace spanned by the columns of `n`.
pub fn j_projection(n: &CMatrix, k: &KreinSpace, tol: Tolerance) -> Result<CMatrix> {
    let gram = n.adjoint() * k.j() * n;
    let gi = mat_inverse(&gram, tol).map_err(|_| Error::Precondition("subspace is J-degenerate".into()))?;
    Ok(n * gi * n.adjoint() * k.j())
}

// ---------------------------------------------------------------------------
// Boundary-side transforms.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeftBundle {
    /// `dom V ⊇ ran Γ`.
    DomainCovers,
    /// `dom V ⊆ ran Γ` together with `mul V⁺ ∩ ran Γ ⊆ dom V`.
    GunTp,
}

#[derive(Clone, Debug)]
pub struct LeftTransform {
    pub pair: BoundaryPair,
    pub bundle: LeftBundle,
    /// `T` itself, or `Γ⁻¹(mul V⁺)` under the second bundle.
    pub t_prime: LinearRelation,
    /// `V` unitary with `ker V ⊆ mul Γ`.
    pub one_to_one: bool,
}

/// `Γ' = V Γ` for an isometric `V` from `(C^{2m}, Ĵ°)` to `(C^{2m'}, Ĵ°)`.
pub fn transform_left(bp: &BoundaryPair, v: &LinearRelation) -> Result<LeftTransform> {
    let tol = bp.tol();
    check_dim("V input", 2 * bp.l_dim(), v.from_dim())?;
    if v.to_dim() % 2 != 0 {
        return Err(Error::Precondition("V must map into an even-dimensional space".into()));
    }
    let m2 = v.to_dim() / 2;
    let (kl, kl2) = (KreinSpace::hilbert(bp.l_dim()), KreinSpace::hilbert(m2));
    let vp = krein_adjoint(v, &kl.doubled(), &kl2.doubled(), tol)?;
    let sharp = vp.inverse();
    if !rel_contains(&sharp, v, tol) {
        return Err(Error::Precondition("V is not isometric".into()));
    }
    let ran_g = bp.gamma().ran();
    let dom_v = v.dom();
    let bundle = if contains(&dom_v, &ran_g, tol)? {
        LeftBundle::DomainCovers
    } else {
        let mul_vp = vp.mul();
        let lhs = intersect(&mul_vp, &ran_g, tol)?;
        let rhs = intersect(&dom_v, &ran_g, tol)?;
        let mut failed = Vec::new();
        if !contains(&ran_g, &dom_v, tol)? {
            failed.push("dom V ⊆ ran Γ");
        }
        if !contains(&rhs, &lhs, tol)? {
            failed.push("mul V⁺ ∩ ran Γ ⊆ dom V ∩ ran Γ");
        }
        if !bp.is_unitary() {
            failed.push("Γ unitary");
        }
        if !failed.is_empty() {
            return Err(Error::Precondition(format!(
                "dom V ⊉ ran Γ and the second bundle fails: {}",
                failed.join(", ")
            )));
        }
        LeftBundle::GunTp
    };
    let gamma = compose(v, bp.gamma(), tol)?;
    let pair = BoundaryPair::new(bp.h().clone(), m2, gamma, tol)?;
    let t_prime = match bundle {
        LeftBundle::DomainCovers => underlying_t(bp)?,
        LeftBundle::GunTp => relation_in(preimage(bp.gamma(), &vp.mul(), tol)?)?,
    };
    let one_to_one = rel_eq(&sharp, v, tol) && contains(&bp.gamma().mul(), &v.ker(), tol)?;
    Ok(LeftTransform {
        pair,
        bundle,
        t_prime,
        one_to_one,
    })
}

/// Principal-angle distance between `M_{Γ'}(z)` and `V(M_Γ(z))`.
pub fn left_weyl_residual(bp: &BoundaryPair, v: &LinearRelation, transformed: &BoundaryPair, z: C64) -> Result<f64> {
    let m = weyl(bp, z)?.m;
    let rhs = shmulyan(v, &m, bp.tol())?;
    let lhs = weyl(transformed, z)?.m;
    Ok(crate::relcalc::rel_distance(&lhs, &rhs))
}

fn diag_scale(m: usize, s0: f64, s1: f64) -> CMatrix {
    let mut d = identity(2 * m);
    for i in 0..m {
        d[(i, i)] = ONE * s0;
        d[(m + i, m + i)] = ONE * s1;
    }
    d
}

/// `V_ε = diag(ε^{-1/2}, ε^{1/2})`.
pub fn v_eps(m: usize, eps: f64) -> Result<LinearRelation> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Precondition(format!("ε must be positive, got {eps}")));
    }
    Ok(rel_from_operator(&diag_scale(m, eps.powf(-0.5), eps.sqrt())))
}

/// `Γ_ε = V_ε Γ`.
pub fn scale_eps(bp: &BoundaryPair, eps: f64) -> Result<BoundaryPair> {
    let v = v_eps(bp.l_dim(), eps)?;
    Ok(transform_left(bp, &v)?.pair)
}

/// `Γ'₀ = κ⁻¹ Γ₀`, `Γ'₁ = κ Γ₁`, giving `M' = κ² M`.
pub fn scaled_obt(bp: &BoundaryPair, kappa: f64) -> Result<BoundaryPair> {
    if !kappa.is_finite() || kappa == 0.0 || kappa.abs() == 1.0 {
        return Err(Error::Precondition(format!("κ = {kappa} is excluded")));
    }
    if !bp.is_obt() {
        return Err(Error::Precondition("scaling needs an ordinary boundary triple".into()));
    }
    let v = rel_from_operator(&diag_scale(bp.l_dim(), 1.0 / kappa, kappa));
    Ok(transform_left(bp, &v)?.pair)
}

/// `(G, E)` defining `V = (G⁻¹, 0; E G⁻¹, G*)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "QbtJson", into = "QbtJson")]
pub struct QbtMap {
    g: CMatrix,
    e: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct QbtJson {
    #[serde(rename = "G", with = "crate::numkernel::cmatrix_serde")]
    g: CMatrix,
    #[serde(rename = "E", with = "crate::numkernel::cmatrix_serde")]
    e: CMatrix,
}

impl TryFrom<QbtJson> for QbtMap {
    type Error = Error;
    fn try_from(j: QbtJson) -> Result<Self> {
        QbtMap::new(j.g, j.e, Tolerance::default())
    }
}

impl From<QbtMap> for QbtJson {
    fn from(q: QbtMap) -> Self {
        QbtJson { g: q.g, e: q.e }
    }
}

impl QbtMap {
    pub fn new(g: CMatrix, e: CMatrix, tol: Tolerance) -> Result<Self> {
        check_dim("G (square)", g.nrows(), g.ncols())?;
        check_dim("E", g.nrows(), e.nrows())?;
        check_dim("E", g.nrows(), e.ncols())?;
        if !crate::numkernel::is_finite(&g) || !crate::numkernel::is_finite(&e) {
            return Err(Error::NonFinite);
        }
        mat_inverse(&g, tol).map_err(|_| Error::Precondition("G is singular".into()))?;
        if (&e - e.adjoint()).norm() > 1e-10 * e.norm().max(1.0) {
            return Err(Error::Precondition("E is not Hermitian".into()));
        }
        Ok(QbtMap { g, e })
    }

    pub fn g(&self) -> &CMatrix {
        &self.g
    }

    pub fn e(&self) -> &CMatrix {
        &self.e
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn matrix(&self) -> CMatrix {
        let gi = self.g.clone().try_inverse().expect("validated invertible");
        let m = self.dim();
        blocks(&gi, &CMatrix::zeros(m, m), &(&self.e * &gi), &self.g.adjoint())
    }

    pub fn to_relation(&self) -> LinearRelation {
        rel_from_operator(&self.matrix())
    }
}

/// `V_* = dom(V ∩ (C^{2m} × ({0} × C^k)))`, read as a relation in `C^m`.
pub fn v_star(v: &LinearRelation, tol: Tolerance) -> Result<LinearRelation> {
    let (p, q) = (v.from_dim(), v.to_dim());
    let k = q / 2;
    let mut cyl = CMatrix::zeros(p + q, p + k);
    cyl.view_mut((0, 0), (p, p)).copy_from(&identity(p));
    cyl.view_mut((p + k, p), (k, k)).copy_from(&identity(k));
    let cut = intersect(v.graph(), &Subspace::from_orthonormal(cyl)?, tol)?;
    relation_in(LinearRelation::new(p, q, cut)?.dom())
}

/// Hypotheses of the quasi boundary triple construction, each reported separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VvvHypotheses {
    pub is_obt: bool,
    pub isometric: bool,
    pub gamma_operator: bool,
    pub ker_gamma_is_t: bool,
    pub t0_selfadjoint: bool,
    /// `Γ₁(T₀) ⊆ mul dom V`.
    pub a: bool,
    /// `V(ran Γ)` is all of `C^{2m}`.
    pub b: bool,
    /// `T'₀ = T₀`.
    pub c: bool,
    /// `dom V_* = {0}`.
    pub vstar_dom_trivial: bool,
    /// `Γ₁(T₀) ⊆ mul V_*`.
    pub vstar_mul_covers: bool,
}

impl VvvHypotheses {
    pub fn lemma_bundle(&self) -> bool {
        self.isometric && self.gamma_operator && self.ker_gamma_is_t && self.t0_selfadjoint && self.a && self.b && self.c
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut f = Vec::new();
        for (ok, name) in [
            (self.isometric, "Γ isometric"),
            (self.gamma_operator, "Γ an operator"),
            (self.ker_gamma_is_t, "ker Γ = T"),
            (self.t0_selfadjoint, "T₀ selfadjoint"),
            (self.a, "(a) Γ₁(T₀) ⊆ mul dom V"),
            (self.b, "(b) V(ran Γ) dense"),
            (self.c, "(c) T'₀ = T₀"),
        ] {
            if !ok {
                f.push(name);
            }
        }
        f
    }
}

#[derive(Clone, Debug)]
pub struct QbtResult {
    pub pair: BoundaryPair,
    pub hypotheses: VvvHypotheses,
}

pub fn vvv_hypotheses(bp: &BoundaryPair, q: &QbtMap) -> Result<VvvHypotheses> {
    let tol = bp.tol();
    check_dim("QBT map size", bp.l_dim(), q.dim())?;
    let v = q.to_relation();
    let pi = projections_pi(bp)?;
    let t = underlying_t(bp)?;
    let gamma = compose(&v, bp.gamma(), tol)?;
    let t0_prime = relation_in(LinearRelation::new(gamma.from_dim(), gamma.to_dim(), gamma.graph().clone())?.dom())
        .and_then(|_| {
            let g0 = pairs_ref(
                &gamma.f_block(),
                &rows_of(&gamma.g_block(), 0, bp.l_dim()),
                tol,
            )?;
            relation_in(g0.ker())
        })?;
    let g1_t0 = image(&pi.gamma1, pi.t0.graph(), tol)?;
    let mul_dom_v = relation_in(v.dom())?.mul();
    let vs = v_star(&v, tol)?;
    Ok(VvvHypotheses {
        is_obt: bp.is_obt(),
        isometric: bp.is_isometric(),
        gamma_operator: bp.gamma().is_operator(),
        ker_gamma_is_t: subspace_eq(&bp.gamma().ker(), t.graph(), tol),
        t0_selfadjoint: bp.flags().t0_selfadjoint,
        a: contains(&mul_dom_v, &g1_t0, tol)?,
        b: image(&v, &bp.gamma().ran(), tol)?.is_full(),
        c: rel_eq(&t0_prime, &pi.t0, tol),
        vstar_dom_trivial: vs.dom().dim() == 0,
        vstar_mul_covers: contains(&vs.mul(), &g1_t0, tol)?,
    })
}

/// `Γ' = V Γ` with `V = (G⁻¹, 0; E G⁻¹, G*)`, accepted for an ordinary
/// boundary triple or when every hypothesis of the isometric construction holds.
pub fn qbt_transform(bp: &BoundaryPair, q: &QbtMap) -> Result<QbtResult> {
    let tol = bp.tol();
    let hyp = vvv_hypotheses(bp, q)?;
    if !hyp.is_obt && !hyp.lemma_bundle() {
        return Err(Error::Precondition(format!(
            "quasi boundary triple hypotheses fail: {}",
            hyp.failures().join(", ")
        )));
    }
    let gamma = compose(&q.to_relation(), bp.gamma(), tol)?;
    let pair = BoundaryPair::new(bp.h().clone(), bp.l_dim(), gamma, tol)?;
    Ok(QbtResult { pair, hypotheses: hyp })
}

/// `‖M'(z) − (E + G* M(z) G)‖ / max(1, ‖M'(z)‖)`.
pub fn qbt_weyl_residual(bp: &BoundaryPair, q: &QbtMap, transformed: &BoundaryPair, z: C64) -> Result<f64> {
    let (m, _) = weyl_matrix(bp, z)?;
    let (mp, _) = weyl_matrix(transformed, z)?;
    let rhs = q.e() + q.g().adjoint() * m * q.g();
    Ok((&mp - rhs).norm() / op_norm(&mp).max(1.0))
}

/// Both sides of `ker Γ'⁺ = E₀* + G* Θ₀* G` for an operator `Γ`.
pub fn qbtex_sides(bp: &BoundaryPair, q: &QbtMap) -> Result<(LinearRelation, LinearRelation)> {
    let tol = bp.tol();
    if !bp.gamma().is_operator() {
        return Err(Error::Precondition("Γ must be an operator".into()));
    }
    let m = bp.l_dim();
    let v = q.to_relation();
    let gamma = compose(&v, bp.gamma(), tol)?;
    let kh = bp.h().doubled();
    let kl = KreinSpace::hilbert(m).doubled();
    let lhs = relation_in(krein_adjoint(&gamma, &kh, &kl, tol)?.ker())?;
    let theta0 = relation_in(bp.gamma().ran())?;
    let gi = mat_inverse(q.g(), tol)?;
    let dom_e0 = column_space(&(&gi * theta0.dom().basis()), tol)?;
    let e0 = if dom_e0.dim() == 0 {
        LinearRelation::zero(m, m)
    } else {
        pairs_ref(dom_e0.basis(), &(q.e() * dom_e0.basis()), tol)?
    };
    let g = rel_from_operator(q.g());
    let gs = rel_from_operator(&q.g().adjoint());
    let mid = compose(&gs, &compose(&hilbert_adjoint(&theta0, tol)?, &g, tol)?, tol)?;
    let rhs = op_sum(&hilbert_adjoint(&e0, tol)?, &mid, tol)?;
    Ok((lhs, rhs))
}

/// Weyl family of `Γ` restricted by a boundary condition: `Γ(N̂_z(A'_*))` where
/// `A'_* = Γ⁻¹(dom V)`, used as a cross-check for isometric `V`.
pub fn restricted_weyl(bp: &BoundaryPair, dom_v: &Subspace, z: C64) -> Result<LinearRelation> {
    let tol = bp.tol();
    let a = relation_in(preimage(bp.gamma(), dom_v, tol)?)?;
    let nz = graph_restriction(&a, z, tol)?;
    shmulyan(bp.gamma(), &nz, tol)
}

/// Subspace of `C^{2m}` with `(a, H a)`, `a` ranging over the columns of `basis`; neutral for Hermitian `H`.
pub fn neutral_graph(basis: &CMatrix, h: &CMatrix, tol: Tolerance) -> Result<Subspace> {
    column_space(&crate::numkernel::vstack(basis, &(h * basis)), tol)
}

/// `U|_D` for an operator `U` on `C^{2m}` and a subspace `D`.
pub fn restrict_operator(u: &CMatrix, d: &Subspace, tol: Tolerance) -> Result<LinearRelation> {
    if d.dim() == 0 {
        return Ok(LinearRelation::zero(u.ncols(), u.nrows()));
    }
    pairs_ref(d.basis(), &(u * d.basis()), tol)
}

/// `[⊥]`-complement in `(C^{2m}, Ĵ°)`.
pub fn boundary_orth(s: &Subspace, tol: Tolerance) -> Result<Subspace> {
    let k = KreinSpace::hilbert(s.ambient_dim() / 2).doubled();
    if s.dim() == 0 {
        return Ok(Subspace::full(s.ambient_dim()));
    }
    null_space(&(s.basis().adjoint() * k.j()), tol)
}
