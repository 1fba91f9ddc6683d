//! Boundary pairs `(C^m, Γ)` for a symmetric relation in a Krein space,
//! their Weyl families, γ-fields, Θ-extensions, the main transform and
//! the spectral bookkeeping sets.
//!
//! `Γ` is a relation from the doubled state space `(C^{2n}, Ĵ)` to the
//! doubled boundary space `(C^{2m}, Ĵ°)`. Coordinates of a graph vector
//! are ordered `(f, f', l, l')`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::krein::{hat_symmetry, KreinSpace};
use crate::numkernel::{identity, rows_of, CMatrix, Subspace, Tolerance, C64};
use crate::relcalc::{
    graph_restriction, image, in_resolvent, pairs_ref, is_symmetric, krein_adjoint, point_spectrum, preimage, rel_contains,
    rel_eq, relation_in, restrict_to, shmulyan, LinearRelation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    NotIsometric,
    Isometric,
    Unitary,
}

/// Decidable finite-dimensional versions of the usual subclass conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFlags {
    pub gamma_is_operator: bool,
    pub gamma_surjective: bool,
    pub t0_selfadjoint: bool,
    pub ran_gamma0_full: bool,
}

impl PairFlags {
    pub fn is_obt(&self) -> bool {
        self.gamma_is_operator && self.gamma_surjective
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PairJson", into = "PairJson")]
pub struct BoundaryPair {
    h: KreinSpace,
    l_dim: usize,
    gamma: LinearRelation,
    classification: Classification,
    flags: PairFlags,
    tol: Tolerance,
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    #[serde(rename = "H")]
    h: KreinSpace,
    #[serde(rename = "L_dim")]
    l_dim: usize,
    gamma: LinearRelation,
}

impl TryFrom<PairJson> for BoundaryPair {
    type Error = Error;
    fn try_from(j: PairJson) -> Result<Self> {
        BoundaryPair::new(j.h, j.l_dim, j.gamma, Tolerance::default())
    }
}

impl From<BoundaryPair> for PairJson {
    fn from(b: BoundaryPair) -> Self {
        PairJson {
            h: b.h,
            l_dim: b.l_dim,
            gamma: b.gamma,
        }
    }
}

/// `Γ₀`, `Γ₁` and their kernels `T₀`, `T₁`.
#[derive(Clone, Debug)]
pub struct Projections {
    pub gamma0: LinearRelation,
    pub gamma1: LinearRelation,
    pub t0: LinearRelation,
    pub t1: LinearRelation,
}

#[derive(Clone, Debug)]
pub struct WeylSample {
    pub z: C64,
    pub m: LinearRelation,
    pub gamma_field: LinearRelation,
    /// `mul M(z) = Γ₁(N̂_z(T₀))`.
    pub mul_invariant: bool,
    /// `ker M(z) = Γ₀(N̂_z(T₁))`.
    pub ker_invariant: bool,
}

impl WeylSample {
    pub fn invariants_hold(&self) -> bool {
        self.mul_invariant && self.ker_invariant
    }
}

impl BoundaryPair {
    pub fn new(h: KreinSpace, l_dim: usize, gamma: LinearRelation, tol: Tolerance) -> Result<Self> {
        check_dim("boundary relation input", 2 * h.dim(), gamma.from_dim())?;
        check_dim("boundary relation output", 2 * l_dim, gamma.to_dim())?;
        let sharp = gamma_sharp(&gamma, &h, l_dim, tol)?;
        let classification = if rel_eq(&gamma, &sharp, tol) {
            Classification::Unitary
        } else if rel_contains(&sharp, &gamma, tol) {
            Classification::Isometric
        } else {
            Classification::NotIsometric
        };
        let mut bp = BoundaryPair {
            h,
            l_dim,
            gamma,
            classification,
            flags: PairFlags {
                gamma_is_operator: false,
                gamma_surjective: false,
                t0_selfadjoint: false,
                ran_gamma0_full: false,
            },
            tol,
        };
        let pi = projections_pi(&bp)?;
        bp.flags = PairFlags {
            gamma_is_operator: bp.gamma.is_operator(),
            gamma_surjective: bp.gamma.ran().is_full(),
            t0_selfadjoint: crate::relcalc::is_selfadjoint(&pi.t0, &bp.h, tol)?,
            ran_gamma0_full: pi.gamma0.ran().is_full(),
        };
        Ok(bp)
    }

    /// `Γ = identity` on `C^{2n}` with `J = I`: the boundary triple of the
    /// trivial relation, `M(z) = z`.
    pub fn identity_obt(n: usize) -> Self {
        BoundaryPair::new(
            KreinSpace::hilbert(n),
            n,
            LinearRelation::identity(2 * n),
            Tolerance::default(),
        )
        .expect("identity triple is valid")
    }

    /// `J = -I` on `C^n` with `Γ(f, f') = (f, -f')`; here `M(z) = -z` and the
    /// main transform is `{((c, c), (d, d))}` for `n = 1`.
    pub fn flip_fixture(n: usize) -> Self {
        let h = KreinSpace::diagonal(n, n).expect("valid signature");
        let g = crate::numkernel::block_diag(&identity(n), &identity(n).map(|x| -x));
        BoundaryPair::new(h, n, crate::relcalc::rel_from_operator(&g), Tolerance::default())
            .expect("flip fixture is valid")
    }

    pub fn h(&self) -> &KreinSpace {
        &self.h
    }

    pub fn n(&self) -> usize {
        self.h.dim()
    }

    pub fn l_dim(&self) -> usize {
        self.l_dim
    }

    pub fn gamma(&self) -> &LinearRelation {
        &self.gamma
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    pub fn flags(&self) -> PairFlags {
        self.flags
    }

    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn is_isometric(&self) -> bool {
        self.classification >= Classification::Isometric
    }

    pub fn is_unitary(&self) -> bool {
        self.classification == Classification::Unitary
    }

    pub fn is_obt(&self) -> bool {
        self.is_unitary() && self.flags.is_obt()
    }

    /// Doubled state space `(C^{2n}, Ĵ)`.
    pub fn state_doubled(&self) -> KreinSpace {
        self.h.doubled()
    }

    /// Doubled boundary space `(C^{2m}, Ĵ°)`.
    pub fn boundary_doubled(&self) -> KreinSpace {
        KreinSpace::hilbert(self.l_dim).doubled()
    }

    /// `A_* = dom Γ` as a relation in the state space.
    pub fn a_star(&self) -> LinearRelation {
        relation_in(self.gamma.dom()).expect("even ambient")
    }

    /// The same `Γ` read as a pair over a different boundary relation.
    pub fn with_gamma(&self, gamma: LinearRelation) -> Result<BoundaryPair> {
        BoundaryPair::new(self.h.clone(), gamma.to_dim() / 2, gamma, self.tol)
    }
}

/// `Γ_# = (Γ⁺)^{-1}` with the Krein adjoint taken between the doubled spaces.
pub fn gamma_sharp(gamma: &LinearRelation, h: &KreinSpace, l_dim: usize, tol: Tolerance) -> Result<LinearRelation> {
    let kh = h.doubled();
    let kl = KreinSpace::hilbert(l_dim).doubled();
    Ok(krein_adjoint(gamma, &kh, &kl, tol)?.inverse())
}

pub fn classify(bp: &BoundaryPair) -> Classification {
    bp.classification
}

/// `max |[f̂, ĝ]_Ĵ − [l̂, k̂]_Ĵ°|` over graph basis vectors: zero exactly for isometric `Γ`.
pub fn green_defect(bp: &BoundaryPair) -> f64 {
    let n2 = 2 * bp.n();
    let b = bp.gamma.graph().basis();
    let fh = rows_of(b, 0, n2);
    let lh = rows_of(b, n2, 2 * bp.l_dim);
    let jh = hat_symmetry(&bp.h).hat;
    let jl = hat_symmetry(&KreinSpace::hilbert(bp.l_dim)).hat;
    let d = fh.adjoint() * jh * &fh - lh.adjoint() * jl * &lh;
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `T = ker Γ_#`, checked to be symmetric.
pub fn underlying_t(bp: &BoundaryPair) -> Result<LinearRelation> {
    let sharp = gamma_sharp(&bp.gamma, &bp.h, bp.l_dim, bp.tol)?;
    let t = relation_in(sharp.ker())?;
    if !is_symmetric(&t, &bp.h, bp.tol)? {
        return Err(Error::InvalidPair("ker Γ_# is not symmetric".into()));
    }
    Ok(t)
}

/// `T⁺` in the state space.
pub fn t_plus(bp: &BoundaryPair) -> Result<LinearRelation> {
    let t = underlying_t(bp)?;
    krein_adjoint(&t, &bp.h, &bp.h, bp.tol)
}

pub fn projections_pi(bp: &BoundaryPair) -> Result<Projections> {
    let n2 = 2 * bp.n();
    let m = bp.l_dim;
    let b = bp.gamma.graph().basis();
    let fh = rows_of(b, 0, n2);
    let l0 = rows_of(b, n2, m);
    let l1 = rows_of(b, n2 + m, m);
    let gamma0 = pairs_ref(&fh, &l0, bp.tol)?;
    let gamma1 = pairs_ref(&fh, &l1, bp.tol)?;
    let t0 = relation_in(gamma0.ker())?;
    let t1 = relation_in(gamma1.ker())?;
    Ok(Projections {
        gamma0,
        gamma1,
        t0,
        t1,
    })
}

pub(crate) fn nonreal(z: C64) -> Result<()> {
    if z.im.abs() <= f64::EPSILON * z.norm().max(1.0) || !z.im.is_finite() || !z.re.is_finite() {
        Err(Error::RealParameter(format!("{z}")))
    } else {
        Ok(())
    }
}

/// Weyl family `M(z) = Γ(N̂_z(A_*))` and γ-field at a nonreal `z`.
pub fn weyl(bp: &BoundaryPair, z: C64) -> Result<WeylSample> {
    nonreal(z)?;
    let tol = bp.tol;
    let n = bp.n();
    let nz = graph_restriction(&bp.a_star(), z, tol)?;
    let m = shmulyan(&bp.gamma, &nz, tol)?;
    let pi = projections_pi(bp)?;
    let g0_on_nz = restrict_to(&pi.gamma0, nz.graph(), tol)?;
    let gamma_field = if g0_on_nz.dim() == 0 {
        LinearRelation::zero(bp.l_dim, n)
    } else {
        pairs_ref(&g0_on_nz.g_block(), &rows_of(&g0_on_nz.f_block(), 0, n), tol)?
    };
    let mul_rhs = image(&pi.gamma1, graph_restriction(&pi.t0, z, tol)?.graph(), tol)?;
    let ker_rhs = image(&pi.gamma0, graph_restriction(&pi.t1, z, tol)?.graph(), tol)?;
    let mul_invariant = crate::numkernel::subspace_eq(&m.mul(), &mul_rhs, tol);
    let ker_invariant = crate::numkernel::subspace_eq(&m.ker(), &ker_rhs, tol);
    Ok(WeylSample {
        z,
        m,
        gamma_field,
        mul_invariant,
        ker_invariant,
    })
}

/// Weyl family of an arbitrary relation `Γ` (no classification required).
pub fn weyl_of_relation(gamma: &LinearRelation, z: C64, tol: Tolerance) -> Result<LinearRelation> {
    nonreal(z)?;
    let a = relation_in(gamma.dom())?;
    let nz = graph_restriction(&a, z, tol)?;
    shmulyan(gamma, &nz, tol)
}

/// Permutation-with-sign taking `(f, f', l, l')` to `((f, l), (f', -l'))`.
fn main_transform_matrix(n: usize, m: usize) -> CMatrix {
    let d = 2 * (n + m);
    let mut p = CMatrix::zeros(d, d);
    for i in 0..n {
        p[(i, i)] = crate::numkernel::ONE;
        p[(n + m + i, n + i)] = crate::numkernel::ONE;
    }
    for i in 0..m {
        p[(n + i, 2 * n + i)] = crate::numkernel::ONE;
        p[(2 * n + m + i, 2 * n + m + i)] = -crate::numkernel::ONE;
    }
    p
}

/// The main transform `{((f, l), (f', -l')) : (f̂, l̂) ∈ Γ}`, a relation in `C^{n+m}`.
pub fn main_transform(bp: &BoundaryPair) -> LinearRelation {
    let (n, m) = (bp.n(), bp.l_dim);
    bp.gamma
        .map_graph(&main_transform_matrix(n, m), n + m, n + m)
        .expect("permutation preserves shape")
}

/// The Krein space `(C^{n+m}, J ⊕ I)` in which the main transform lives.
pub fn main_space(bp: &BoundaryPair) -> KreinSpace {
    bp.h.direct_sum(&KreinSpace::hilbert(bp.l_dim))
}

pub fn inverse_main_transform(a: &LinearRelation, h: &KreinSpace, l_dim: usize, tol: Tolerance) -> Result<BoundaryPair> {
    let (n, m) = (h.dim(), l_dim);
    check_dim("inverse_main_transform", n + m, a.from_dim())?;
    check_dim("inverse_main_transform", n + m, a.to_dim())?;
    let p = main_transform_matrix(n, m);
    let gamma = a.map_graph(&p.adjoint(), 2 * n, 2 * m)?;
    BoundaryPair::new(h.clone(), m, gamma, tol)
}

/// `T̊_Θ = Γ^{-1}(Θ)`, with the chain `T ⊆ T̊_Θ ⊆ A_*` verified.
pub fn theta_extension(bp: &BoundaryPair, theta: &LinearRelation) -> Result<LinearRelation> {
    if !bp.is_isometric() {
        return Err(Error::Precondition("Θ-extensions need an isometric pair".into()));
    }
    check_dim("theta dimension", bp.l_dim, theta.from_dim())?;
    check_dim("theta dimension", bp.l_dim, theta.to_dim())?;
    let ext = relation_in(preimage(&bp.gamma, theta.graph(), bp.tol)?)?;
    let t = underlying_t(bp)?;
    if !rel_contains(&ext, &t, bp.tol) || !rel_contains(&bp.a_star(), &ext, bp.tol) {
        return Err(Error::InvalidPair("extension chain T ⊆ T_Θ ⊆ A_* violated".into()));
    }
    Ok(ext)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralSample {
    pub z: C64,
    /// Always true here: every range is closed.
    pub in_omega: bool,
    pub in_o: bool,
    pub in_sigma: bool,
    pub in_delta: bool,
    pub in_b_eps: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralSets {
    /// Nonreal eigenvalues of `T` together with their conjugates.
    pub excluded_points: Vec<C64>,
    pub delta_is_all_nonreal: bool,
    /// `σ_p(T)` is all of `C`, so `δ_Γ` is empty.
    pub delta_is_empty: bool,
    pub eps: f64,
    pub samples: Vec<SpectralSample>,
}

const IMAG_TOL: f64 = 1e-9;
const POINT_TOL: f64 = 1e-6;

fn near_any(z: C64, pts: &[C64]) -> bool {
    pts.iter().any(|p| (p - z).norm() <= POINT_TOL * z.norm().max(1.0))
}

/// Membership of `z` in `Σ_Γ`: `z ∈ 𝒪_Γ` and `0 ∈ res(M(z) + z)`.
pub fn in_sigma(bp: &BoundaryPair, z: C64) -> Result<bool> {
    let sets = spectral_sets(bp, 1.0, &[z])?;
    Ok(sets.samples[0].in_sigma)
}

pub fn spectral_sets(bp: &BoundaryPair, eps: f64, samples: &[C64]) -> Result<SpectralSets> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Precondition(format!("ε must be positive, got {eps}")));
    }
    let tol = bp.tol;
    let t = underlying_t(bp)?;
    let spec = point_spectrum(&t, tol)?;
    let mut excluded = Vec::new();
    for z in spec.nonreal(IMAG_TOL) {
        excluded.push(z);
        excluded.push(z.conj());
    }
    let delta_is_empty = spec.all_of_c;
    let delta_is_all_nonreal = !delta_is_empty && excluded.is_empty();
    let a = bp.a_star();
    let mut out = Vec::with_capacity(samples.len());
    for &z in samples {
        nonreal(z)?;
        let in_sigma_p_t = spec.all_of_c || near_any(z, &excluded);
        let full_range = a.shift(z)?.ran().is_full();
        let in_o = !in_sigma_p_t && full_range;
        let in_sigma = in_o && {
            let mz = weyl(bp, z)?.m;
            in_resolvent(&mz, -z, tol)?
        };
        let in_delta = !delta_is_empty && !near_any(z, &excluded) && !near_any(z.conj(), &excluded);
        out.push(SpectralSample {
            z,
            in_omega: true,
            in_o,
            in_sigma,
            in_delta,
            in_b_eps: in_delta && z.norm() > eps,
        });
    }
    Ok(SpectralSets {
        excluded_points: excluded,
        delta_is_all_nonreal,
        delta_is_empty,
        eps,
        samples: out,
    })
}

/// `(n_z, n_z̄)` with `n_z = dim N_z̄(T⁺)`.
pub fn defect_numbers(bp: &BoundaryPair, z: C64) -> Result<(usize, usize)> {
    nonreal(z)?;
    let tp = t_plus(bp)?;
    let nz = crate::relcalc::eigenspace(&tp, z.conj(), bp.tol)?.dim();
    let nzb = crate::relcalc::eigenspace(&tp, z, bp.tol)?.dim();
    Ok((nz, nzb))
}

/// Subspace `{(f, 0) : f ∈ C^n} ⊂ C^{n+m}` squared, used for the `T`-corner of the main transform.
pub fn state_corner(n: usize, m: usize) -> Subspace {
    let d = n + m;
    let mut b = CMatrix::zeros(2 * d, 2 * n);
    for i in 0..n {
        b[(i, i)] = crate::numkernel::ONE;
        b[(d + i, n + i)] = crate::numkernel::ONE;
    }
    Subspace::from_orthonormal(b).expect("coordinate vectors")
}

/// `{((f, 0), (f', 0)) : f̂ ∈ T}` as a relation in `C^{n+m}`.
pub fn embed_corner(t: &LinearRelation, m: usize) -> Result<LinearRelation> {
    let n = t.from_dim();
    let d = n + m;
    let mut e = CMatrix::zeros(2 * d, 2 * n);
    for i in 0..n {
        e[(i, i)] = crate::numkernel::ONE;
        e[(d + i, n + i)] = crate::numkernel::ONE;
    }
    t.map_graph(&e, d, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{c, real_matrix, I, ONE};
    use crate::relcalc::{rel_from_operator, LinearRelation};

    fn t() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_triple() {
        let bp = BoundaryPair::identity_obt(1);
        assert_eq!(bp.classification(), Classification::Unitary);
        assert!(bp.is_obt());
        assert!(green_defect(&bp) < 1e-14);
        let tt = underlying_t(&bp).unwrap();
        assert_eq!(tt.dim(), 0);
        assert!(t_plus(&bp).unwrap().graph().is_full());
        let pi = projections_pi(&bp).unwrap();
        let zero_first = LinearRelation::new(1, 1, Subspace::span(&real_matrix(&[&[0.0], &[1.0]])).unwrap()).unwrap();
        let zero_second = LinearRelation::new(1, 1, Subspace::span(&real_matrix(&[&[1.0], &[0.0]])).unwrap()).unwrap();
        assert!(rel_eq(&pi.t0, &zero_first, t()));
        assert!(rel_eq(&pi.t1, &zero_second, t()));
    }

    #[test]
    fn identity_weyl_function() {
        let bp = BoundaryPair::identity_obt(1);
        let z = c(0.4, 1.3);
        let w = weyl(&bp, z).unwrap();
        assert!(rel_eq(&w.m, &LinearRelation::scalar(1, z), t()));
        assert!(rel_eq(&w.gamma_field, &LinearRelation::identity(1), t()));
        assert!(w.invariants_hold());
        assert!(matches!(weyl(&bp, c(2.0, 0.0)), Err(Error::RealParameter(_))));
    }

    #[test]
    fn trivial_pairs() {
        let h = KreinSpace::hilbert(1);
        let zero = LinearRelation::zero(2, 2);
        let sharp = gamma_sharp(&zero, &h, 1, t()).unwrap();
        assert!(sharp.graph().is_full());
        // A shear keeps the Green identity; stretching one coordinate breaks it.
        let shear = rel_from_operator(&real_matrix(&[&[1.0, 0.3], &[0.0, 1.0]]));
        assert!(BoundaryPair::new(h.clone(), 1, shear, t()).unwrap().is_unitary());
        let g = rel_from_operator(&real_matrix(&[&[2.0, 0.0], &[0.0, 1.0]]));
        let bp = BoundaryPair::new(h, 1, g, t()).unwrap();
        assert_eq!(bp.classification(), Classification::NotIsometric);
    }

    #[test]
    fn flip_fixture_main_transform() {
        let bp = BoundaryPair::flip_fixture(1);
        assert!(bp.is_unitary());
        let w = weyl(&bp, I).unwrap();
        assert!(rel_eq(&w.m, &LinearRelation::scalar(1, -I), t()));
        let a = main_transform(&bp);
        let ixi = LinearRelation::from_pairs(&real_matrix(&[&[1.0, 0.0], &[1.0, 0.0]]), &real_matrix(&[&[0.0, 1.0], &[0.0, 1.0]]), t())
            .unwrap();
        assert!(rel_eq(&a, &ixi, t()));
        assert!(point_spectrum(&a, t()).unwrap().all_of_c);
        assert!(!in_resolvent(&a, c(0.3, 0.2), t()).unwrap());
        let back = inverse_main_transform(&a, bp.h(), 1, t()).unwrap();
        assert!(rel_eq(back.gamma(), bp.gamma(), t()));
    }

    #[test]
    fn identity_main_transform() {
        let bp = BoundaryPair::identity_obt(1);
        let a = main_transform(&bp);
        let expected = LinearRelation::from_pairs(&real_matrix(&[&[1.0, 0.0], &[1.0, 0.0]]), &real_matrix(&[&[0.0, 1.0], &[0.0, -1.0]]), t())
            .unwrap();
        assert!(rel_eq(&a, &expected, t()));
        assert!(crate::relcalc::eigenspace(&a, crate::numkernel::ZERO, t()).unwrap().dim() == 1);
        assert!(crate::relcalc::is_selfadjoint(&a, &main_space(&bp), t()).unwrap());
    }

    #[test]
    fn theta_extensions_of_identity_triple() {
        let bp = BoundaryPair::identity_obt(1);
        let vertical = LinearRelation::new(1, 1, Subspace::span(&real_matrix(&[&[0.0], &[1.0]])).unwrap()).unwrap();
        let ext = theta_extension(&bp, &vertical).unwrap();
        assert!(rel_eq(&ext, &projections_pi(&bp).unwrap().t0, t()));
        let full = theta_extension(&bp, &LinearRelation::full(1, 1)).unwrap();
        assert!(rel_eq(&full, &bp.a_star(), t()));
    }

    #[test]
    fn spectral_bookkeeping() {
        let bp = BoundaryPair::identity_obt(1);
        let s = spectral_sets(&bp, 0.5, &[c(0.1, 1.0), c(-2.0, -0.3)]).unwrap();
        assert!(s.delta_is_all_nonreal);
        assert!(s.samples.iter().all(|x| x.in_o && x.in_delta));
        // M(z) + z = 2z is invertible.
        assert!(s.samples.iter().all(|x| x.in_sigma));
        assert_eq!(defect_numbers(&bp, I).unwrap(), (1, 1));
        let _ = ONE;
    }

    #[test]
    fn json_round_trip() {
        let bp = BoundaryPair::flip_fixture(1);
        let s = serde_json::to_string(&bp).unwrap();
        assert!(s.starts_with("{\"H\":"));
        let back: BoundaryPair = serde_json::from_str(&s).unwrap();
        assert_eq!(back.classification(), Classification::Unitary);
    }
}
