//! Theorem-keyed randomized property checks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gen::{
    boundary_unitary_with, gaussian, restricted_pair_with, obt_with, projection_similarity, qbt_map_with,
    random_krein, random_relation, random_subspace, random_unitary_relation, std_unitary_with, trial_rng,
    unitary_pair_with, TrialRng,
};
use crate::boundary::{
    embed_corner, gamma_sharp, inverse_main_transform, main_space, main_transform, projections_pi, spectral_sets,
    state_corner, t_plus, theta_extension, underlying_t, weyl, weyl_of_relation, BoundaryPair, Classification,
    WeylSample,
};
use crate::error::{Error, Result};
use crate::krein::KreinSpace;
use crate::nevanlinna::{gen_nevanlinna_probe, nev_kernel, weyl_symmetry_check, KernelSampleGrid};
use crate::numkernel::{
    column_space, contains, intersect, op_norm, subspace_eq, subspace_sum, vstack, CMatrix, Subspace, Tolerance, C64,
};
use crate::relcalc::{
    compose, cw_sum, eigenspace, graph_restriction, hilbert_adjoint, in_resolvent, is_selfadjoint, is_symmetric,
    krein_adjoint, point_spectrum, rel_contains, rel_distance, rel_eq, rel_from_operator, rel_intersect, relation_in,
    shmulyan, LinearRelation,
};
use crate::transforms::{
    delta0_kernel_condition, delta0b_condition, delta_correction, delta_ftex, delta_sample, left_weyl_residual,
    neutral_graph, boundary_orth, qbt_transform, qbt_weyl_residual, qbtex_sides, restrict_operator, rho_v,
    right_weyl_residual, scale_eps, scaled_obt, transform_left, transform_right_std, v_star, vvv_hypotheses,
    StdUnitaryOp,
};

/// Inclusive range of state dimensions drawn per trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRange {
    pub lo: usize,
    pub hi: usize,
}

impl DimRange {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 || hi < lo {
            return Err(Error::Malformed(format!("invalid dimension range {lo}..{hi}")));
        }
        Ok(DimRange { lo, hi })
    }
}

impl Default for DimRange {
    fn default() -> Self {
        DimRange { lo: 1, hi: 4 }
    }
}

impl std::str::FromStr for DimRange {
    type Err = Error;
    /// `"3"`, `"1..4"` or `"1..=4"`, all inclusive.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Malformed(format!("cannot parse dimension range {s:?}"));
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
        match s.split_once("..") {
            None => {
                let v = parse(s)?;
                DimRange::new(v, v)
            }
            Some((a, b)) => DimRange::new(parse(a)?, parse(b.trim_start_matches('='))?),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Parallel,
    Sequential,
}

/// Per-trial context: a private RNG stream plus the shared settings.
pub struct Trial {
    pub rng: TrialRng,
    pub index: u64,
    pub dims: DimRange,
    pub tol: Tolerance,
}

impl Trial {
    pub fn new(seed: u64, index: u64, dims: DimRange, tol: Tolerance) -> Self {
        Trial {
            rng: trial_rng(seed, index),
            index,
            dims,
            tol,
        }
    }

    fn n(&mut self) -> usize {
        self.rng.random_range(self.dims.lo..=self.dims.hi)
    }

    fn n_at_least(&mut self, k: usize) -> usize {
        self.n().max(k)
    }

    /// Boundary dimension between 1 and `min(n, 3)`.
    fn m_for(&mut self, n: usize) -> usize {
        self.rng.random_range(1..=n.clamp(1, 3))
    }

    /// One of `κ₋ ∈ {0, 1, n}`.
    fn kappa(&mut self, n: usize) -> usize {
        [0, 1.min(n), n][self.rng.random_range(0..3)]
    }

    fn z(&mut self) -> C64 {
        let re = self.rng.random_range(-2.0..2.0);
        let im = self.rng.random_range(0.25..2.0);
        C64::new(re, if self.rng.random_bool(0.5) { im } else { -im })
    }

    fn upper_z(&mut self) -> C64 {
        let z = self.z();
        C64::new(z.re, z.im.abs())
    }

    fn coin(&mut self) -> bool {
        self.rng.random_bool(0.5)
    }

    fn upto(&mut self, hi: usize) -> usize {
        self.rng.random_range(0..=hi)
    }

    fn krein(&mut self, n: usize) -> Result<KreinSpace> {
        let k = self.kappa(n);
        random_krein(&mut self.rng, n, k)
    }

    fn unitary_pair(&mut self) -> Result<BoundaryPair> {
        let n = self.n();
        let m = self.m_for(n);
        let k = self.kappa(n);
        Ok(unitary_pair_with(&mut self.rng, n, m, k)?.with_tolerance(self.tol))
    }

    fn obt(&mut self, min_n: usize) -> Result<BoundaryPair> {
        let n = self.n_at_least(min_n);
        let m = self.m_for(n);
        let k = self.kappa(n);
        Ok(obt_with(&mut self.rng, n, m, k)?.with_tolerance(self.tol))
    }

    fn unitary_or_isometric(&mut self) -> Result<BoundaryPair> {
        let n = self.n();
        let m = self.m_for(n);
        let k = self.kappa(n);
        let bp = if self.coin() {
            unitary_pair_with(&mut self.rng, n, m, k)?
        } else {
            let d = self.rng.random_range(1..=m);
            restricted_pair_with(&mut self.rng, n, m, k, d)?
        };
        Ok(bp.with_tolerance(self.tol))
    }

    fn sub_relation(&mut self, r: &LinearRelation, dim: usize) -> Result<LinearRelation> {
        let c = random_subspace(&mut self.rng, r.dim(), dim);
        LinearRelation::new(r.from_dim(), r.to_dim(), Subspace::from_orthonormal(r.graph().basis() * c.basis())?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Hypotheses were not met by the sampled instance; nothing was tested.
    Skip,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    pub residual: f64,
    pub note: Option<String>,
}

impl Outcome {
    fn check(ok: bool, residual: f64) -> Self {
        Outcome {
            status: if ok { Status::Pass } else { Status::Fail },
            residual,
            note: None,
        }
    }

    fn skip(why: &str) -> Self {
        Outcome {
            status: Status::Skip,
            residual: 0.0,
            note: Some(why.to_string()),
        }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

/// Accumulates sub-results inside one trial.
struct Acc {
    ok: bool,
    residual: f64,
    failed: Vec<&'static str>,
}

impl Acc {
    fn new() -> Self {
        Acc {
            ok: true,
            residual: 0.0,
            failed: Vec::new(),
        }
    }

    fn flag(&mut self, ok: bool, what: &'static str) {
        if !ok {
            self.ok = false;
            self.failed.push(what);
        }
    }

    /// Relation equality with the principal-angle distance folded into the residual.
    fn rel(&mut self, a: &LinearRelation, b: &LinearRelation, tol: Tolerance, what: &'static str) {
        let same = rel_eq(a, b, tol);
        if a.from_dim() == b.from_dim() && a.to_dim() == b.to_dim() && a.dim() == b.dim() {
            self.residual = self.residual.max(rel_distance(a, b));
        }
        self.flag(same, what);
    }

    /// Numeric residual compared against `bound`.
    fn num(&mut self, r: f64, bound: f64, what: &'static str) {
        self.residual = self.residual.max(r);
        self.flag(r.is_finite() && r <= bound, what);
    }

    fn done(self) -> Outcome {
        let o = Outcome::check(self.ok, self.residual);
        if self.failed.is_empty() {
            o
        } else {
            o.with_note(format!("failed: {}", self.failed.join(", ")))
        }
    }
}

/// Weyl sample with its two invariants enforced.
fn wsample(bp: &BoundaryPair, z: C64) -> Result<WeylSample> {
    let s = weyl(bp, z)?;
    if !s.mul_invariant {
        return Err(Error::InvalidPair(format!("mul M(z) ≠ Γ₁(N̂_z(T₀)) at z = {z}")));
    }
    if !s.ker_invariant {
        return Err(Error::InvalidPair(format!("ker M(z) ≠ Γ₀(N̂_z(T₁)) at z = {z}")));
    }
    Ok(s)
}

fn zero_delta(d: &CMatrix, scale: f64) -> bool {
    d.norm() <= 1e-8 * scale.max(1.0)
}

// ---------------------------------------------------------------------------
// Relation calculus.

fn check_cwsum_adjoint(t: &mut Trial) -> Result<Outcome> {
    let (n1, n2) = (t.n(), t.n());
    let (k1, k2) = (t.krein(n1)?, t.krein(n2)?);
    let tol = t.tol;
    let mut acc = Acc::new();
    let d = t.upto(n1 + n2);
    let r = random_relation(&mut t.rng, n1, n2, d);
    let rp = krein_adjoint(&r, &k1, &k2, tol)?;
    acc.rel(&krein_adjoint(&rp, &k2, &k1, tol)?, &r, tol, "involution");
    let (dv, dw) = (t.upto(n1 + n2), t.upto(n1 + n2));
    let v = random_relation(&mut t.rng, n1, n2, dv);
    let w = random_relation(&mut t.rng, n1, n2, dw);
    let lhs = krein_adjoint(&cw_sum(&v, &w, tol)?, &k1, &k2, tol)?;
    let rhs = rel_intersect(&krein_adjoint(&v, &k1, &k2, tol)?, &krein_adjoint(&w, &k1, &k2, tol)?, tol)?;
    acc.rel(&lhs, &rhs, tol, "(V ∔ W)⁺ = V⁺ ∩ W⁺");
    Ok(acc.done())
}

fn check_pop(t: &mut Trial) -> Result<Outcome> {
    let k = t.n();
    let tol = t.tol;
    let d = t.rng.random_range(1..=2 * k);
    let r = random_relation(&mut t.rng, k, k, d);
    let l = match t.rng.random_range(0..3) {
        0 => r.clone(),
        _ => {
            let dl = t.upto(d);
            t.sub_relation(&r, dl)?
        }
    };
    let a = subspace_eq(&l.dom(), &r.dom(), tol) && subspace_eq(&l.mul(), &r.mul(), tol);
    let b = rel_eq(&l, &r, tol);
    let c = subspace_eq(&l.ran(), &r.ran(), tol) && subspace_eq(&l.ker(), &r.ker(), tol);
    Ok(Outcome::check(a == b && b == c, 0.0).with_note(format!("L = R: {b}")))
}

fn check_derk(t: &mut Trial) -> Result<Outcome> {
    let (n1, n2, n3) = (t.n(), t.n(), t.n());
    let (k1, k2, k3) = (t.krein(n1)?, t.krein(n2)?, t.krein(n3)?);
    let tol = t.tol;
    let mut acc = Acc::new();

    // ran X ⊆ dom R  ⟹  (RX)⁺ = X⁺R⁺
    let dr = t.upto(n2 + n3);
    let r = random_relation(&mut t.rng, n2, n3, dr);
    let dom_r = r.dom();
    let cols = t.upto(n1 + dom_r.dim()).max(1);
    let f = gaussian(&mut t.rng, n1, cols);
    let g = dom_r.basis() * gaussian(&mut t.rng, dom_r.dim(), cols);
    let x = LinearRelation::new(n1, n2, column_space(&vstack(&f, &g), tol)?)?;
    let lhs = krein_adjoint(&compose(&r, &x, tol)?, &k1, &k3, tol)?;
    let rhs = compose(&krein_adjoint(&x, &k1, &k2, tol)?, &krein_adjoint(&r, &k2, &k3, tol)?, tol)?;
    acc.rel(&lhs, &rhs, tol, "(RX)⁺ = X⁺R⁺");

    // dom Y ⊆ ran R  ⟹  (YR)⁺ = R⁺Y⁺
    let dr = t.upto(n1 + n2);
    let r = random_relation(&mut t.rng, n1, n2, dr);
    let ran_r = r.ran();
    let cols = t.upto(n3 + ran_r.dim()).max(1);
    let f = ran_r.basis() * gaussian(&mut t.rng, ran_r.dim(), cols);
    let g = gaussian(&mut t.rng, n3, cols);
    let y = LinearRelation::new(n2, n3, column_space(&vstack(&f, &g), tol)?)?;
    let lhs = krein_adjoint(&compose(&y, &r, tol)?, &k1, &k3, tol)?;
    let rhs = compose(&krein_adjoint(&r, &k1, &k2, tol)?, &krein_adjoint(&y, &k2, &k3, tol)?, tol)?;
    acc.rel(&lhs, &rhs, tol, "(YR)⁺ = R⁺Y⁺");
    Ok(acc.done())
}

fn check_torth(t: &mut Trial) -> Result<Outcome> {
    let (n, k) = (t.n(), t.n());
    let (h, c) = (t.krein(n)?, t.krein(k)?);
    let tol = t.tol;
    let mut acc = Acc::new();
    let (hd, cd) = (h.doubled(), c.doubled());
    let dv = t.upto(2 * n + 2 * k);
    let v = random_relation(&mut t.rng, 2 * n, 2 * k, dv);
    let dt = t.upto(2 * n);
    let tt = random_relation(&mut t.rng, n, n, dt);
    let lhs = krein_adjoint(&shmulyan(&v, &tt, tol)?, &c, &c, tol)?;
    let v_sharp = krein_adjoint(&v, &hd, &cd, tol)?.inverse();
    let rhs = shmulyan(&v_sharp, &krein_adjoint(&tt, &h, &h, tol)?, tol)?;
    acc.rel(&lhs, &rhs, tol, "V(T)⁺ = V_#(T⁺)");

    // Round trip under ker V ⊆ T ⊆ dom V.
    let dom_v = v.dom();
    let extra = t.upto(dom_v.dim());
    let coeffs = random_subspace(&mut t.rng, dom_v.dim(), extra);
    let inside = Subspace::from_orthonormal(dom_v.basis() * coeffs.basis())?;
    let t2 = relation_in(subspace_sum(&v.ker(), &inside, tol)?)?;
    let back = shmulyan(&v.inverse(), &shmulyan(&v, &t2, tol)?, tol)?;
    acc.rel(&back, &t2, tol, "V⁻¹(V(T)) = T");
    Ok(acc.done())
}

fn check_wie(t: &mut Trial) -> Result<Outcome> {
    let (n, k) = (t.n(), t.n());
    let (h, c) = (t.krein(n)?, t.krein(k)?);
    let tol = t.tol;
    let (hd, cd) = (h.doubled(), c.doubled());
    let u = random_unitary_relation(&mut t.rng, hd.j(), cd.j())?;
    let dv = t.upto(u.dim());
    let v = t.sub_relation(&u, dv)?;
    // T ⊆ dom V
    let dom_v = v.dom();
    let dt = t.upto(dom_v.dim());
    let coeffs = random_subspace(&mut t.rng, dom_v.dim(), dt);
    let tt = relation_in(Subspace::from_orthonormal(dom_v.basis() * coeffs.basis())?)?;
    let mut acc = Acc::new();
    let vt_plus = krein_adjoint(&shmulyan(&v, &tt, tol)?, &c, &c, tol)?;
    let lhs = relation_in(intersect(vt_plus.graph(), &v.ran(), tol)?)?;
    let tp = krein_adjoint(&tt, &h, &h, tol)?;
    let rhs = shmulyan(&v, &relation_in(intersect(tp.graph(), &dom_v, tol)?)?, tol)?;
    acc.rel(&lhs, &rhs, tol, "V(T)⁺ ∩ ran V = V(T⁺ ∩ dom V)");
    let full = shmulyan(&v, &tp, tol)?;
    acc.rel(&rhs, &full, tol, "V(T⁺ ∩ dom V) = V(T⁺)");
    Ok(acc.done())
}

/// `L ⊆ R` drawn so that both truth values of `R = L ∔ N̂_z(R)` occur.
fn behrndt_instance(t: &mut Trial) -> Result<(LinearRelation, LinearRelation, C64)> {
    let k = t.n();
    let tol = t.tol;
    let z = if t.coin() { t.z() } else { C64::new(t.rng.random_range(-2.0..2.0), 0.0) };
    if t.coin() {
        let dl = t.upto(2 * k);
        let l = random_relation(&mut t.rng, k, k, dl);
        let r_extra = t.upto(k);
        let f = gaussian(&mut t.rng, k, r_extra.max(1));
        let nz = column_space(&vstack(&f, &f.map(|x| x * z)), tol)?;
        let nz = if r_extra == 0 { Subspace::zero(2 * k) } else { nz };
        let r = relation_in(subspace_sum(l.graph(), &nz, tol)?)?;
        Ok((l, r, z))
    } else {
        let dr = t.rng.random_range(1..=2 * k);
        let r = random_relation(&mut t.rng, k, k, dr);
        let dl = t.upto(dr);
        let l = t.sub_relation(&r, dl)?;
        Ok((l, r, z))
    }
}

fn behrndt_sides(l: &LinearRelation, r: &LinearRelation, z: C64, tol: Tolerance) -> Result<(bool, bool)> {
    let i = rel_eq(r, &cw_sum(l, &graph_restriction(r, z, tol)?, tol)?, tol);
    let ii = subspace_eq(&r.shift(z)?.ran(), &l.shift(z)?.ran(), tol);
    Ok((i, ii))
}

fn check_behrndt20(t: &mut Trial) -> Result<Outcome> {
    let (l, r, z) = behrndt_instance(t)?;
    let (i, ii) = behrndt_sides(&l, &r, z, t.tol)?;
    Ok(Outcome::check(i == ii, 0.0).with_note(format!("(i) = {i}, (ii) = {ii}")))
}

fn check_projp1(t: &mut Trial) -> Result<Outcome> {
    let (l, r, z) = behrndt_instance(t)?;
    let tol = t.tol;
    let (i, ii) = behrndt_sides(&l, &r, z, tol)?;
    if !(i || ii) {
        return Ok(Outcome::skip("neither equivalent condition holds"));
    }
    let extra = t.upto(r.dim());
    let piece = t.sub_relation(&r, extra)?;
    let l1 = cw_sum(&l, &piece, tol)?;
    let mut acc = Acc::new();
    acc.rel(&l1, &cw_sum(&l, &graph_restriction(&l1, z, tol)?, tol)?, tol, "L₁ = L ∔ N̂_z(L₁)");
    Ok(acc.done())
}

// ---------------------------------------------------------------------------
// Boundary pairs.

fn check_rrz(t: &mut Trial) -> Result<Outcome> {
    let bp = t.unitary_pair()?;
    let tol = t.tol;
    let sharp = gamma_sharp(bp.gamma(), bp.h(), bp.l_dim(), tol)?;
    let mut acc = Acc::new();
    for _ in 0..5 {
        let z = t.z();
        let lhs = hilbert_adjoint(&wsample(&bp, z)?.m, tol)?;
        let rhs = weyl_of_relation(&sharp, z.conj(), tol)?;
        acc.rel(&lhs, &rhs, tol, "M(z)* = M_{Γ#}(z̄)");
    }
    Ok(acc.done())
}

fn check_rrzz(t: &mut Trial) -> Result<Outcome> {
    let bp = t.unitary_pair()?;
    let z = t.z();
    let sets = spectral_sets(&bp, 1.0, &[z])?;
    if !sets.samples[0].in_delta {
        return Ok(Outcome::skip("z outside δ_Γ"));
    }
    let mut acc = Acc::new();
    for w in [z, z.conj()] {
        acc.flag(bp.a_star().shift(w)?.ran().is_full(), "ran(A_* − ω) full");
        wsample(&bp, w)?;
        acc.flag(weyl_symmetry_check(&bp, w)?, "M(ω)* = M_{Γ#}(ω̄)");
    }
    Ok(acc.done())
}

fn check_equivfnth(t: &mut Trial) -> Result<Outcome> {
    let bp = t.unitary_pair()?;
    let tol = t.tol;
    let m = bp.l_dim();
    let d = t.upto(2 * m);
    let theta = random_relation(&mut t.rng, m, m, d);
    let mut acc = Acc::new();
    let ext = theta_extension(&bp, &theta)?;
    let lhs = krein_adjoint(&ext, bp.h(), bp.h(), tol)?;
    let rhs = theta_extension(&bp, &hilbert_adjoint(&theta, tol)?)?;
    acc.rel(&lhs, &rhs, tol, "T_Θ⁺ = T_{Θ*}");
    let full = theta_extension(&bp, &LinearRelation::full(m, m))?;
    acc.rel(&full, &bp.a_star(), tol, "Θ ⊇ ran Γ gives A_*");
    Ok(acc.done())
}

fn check_mrtg(t: &mut Trial) -> Result<Outcome> {
    let bp = t.unitary_or_isometric()?;
    let tol = t.tol;
    let (n, m) = (bp.n(), bp.l_dim());
    let j = main_transform(&bp);
    let mut acc = Acc::new();
    let sa = is_selfadjoint(&j, &main_space(&bp), tol)?;
    acc.flag(sa == (bp.classification() == Classification::Unitary), "𝒥(Γ) selfadjoint ⇔ Γ unitary");
    if bp.is_unitary() {
        let t_rel = underlying_t(&bp)?;
        let corner = LinearRelation::new(n + m, n + m, intersect(j.graph(), &state_corner(n, m), tol)?)?;
        acc.rel(&corner, &embed_corner(&t_rel, m)?, tol, "T-corner identity");
        let spec = point_spectrum(&t_rel, tol)?;
        if spec.all_of_c {
            acc.flag(point_spectrum(&j, tol)?.all_of_c, "σ_p(T) ⊆ σ_p(𝒥(Γ))");
        } else {
            for e in &spec.eigenvalues {
                acc.flag(eigenspace(&j, e.z, tol)?.dim() > 0, "σ_p(T) ⊆ σ_p(𝒥(Γ))");
            }
        }
    }
    let back = inverse_main_transform(&j, bp.h(), m, tol)?;
    acc.rel(back.gamma(), bp.gamma(), tol, "main transform round trip");
    Ok(acc.done())
}

fn check_lemma_r(t: &mut Trial) -> Result<Outcome> {
    let bp = t.unitary_pair()?;
    let z = t.z();
    let s = spectral_sets(&bp, 1.0, &[z])?;
    wsample(&bp, z)?;
    if !s.samples[0].in_sigma {
        return Ok(Outcome::skip("z outside Σ_Γ"));
    }
    let ok = in_resolvent(&main_transform(&bp), z, t.tol)?;
    Ok(Outcome::check(ok, 0.0))
}

/// `M_ε(z) + z` injective and surjective, where `ε = |z| / 2`.
fn check_lemma_r2(t: &mut Trial) -> Result<Outcome> {
    let bp = t.unitary_pair()?;
    let z = t.z();
    let eps = z.norm() / 2.0;
    let s = spectral_sets(&bp, eps, &[z])?;
    if !s.samples[0].in_b_eps {
        return Ok(Outcome::skip("z outside B^ε"));
    }
    let scaled = scale_eps(&bp, eps)?;
    let shifted = wsample(&scaled, z)?.m.shift(-z)?;
    let mut acc = Acc::new();
    acc.flag(shifted.ker().dim() == 0, "M_ε(z) + z injective");
    acc.flag(shifted.ran().is_full(), "M_ε(z) + z surjective");
    Ok(acc.done())
}

fn check_restg(t: &mut Trial) -> Result<Outcome> {
    let bp = t.unitary_pair()?;
    let z = t.z();
    let eps = z.norm() / 2.0;
    let s = spectral_sets(&bp, eps, &[z])?;
    if s.delta_is_empty || !s.samples[0].in_delta {
        return Ok(Outcome::skip("δ_Γ is empty at the sampled point"));
    }
    let scaled = scale_eps(&bp, eps)?;
    let mut acc = Acc::new();
    acc.flag(in_resolvent(&main_transform(&scaled), z, t.tol)?, "z ∈ res 𝒥(Γ_ε)");
    acc.rel(scale_eps(&scaled, 1.0 / eps)?.gamma(), bp.gamma(), t.tol, "Γ recovered from Γ_ε");
    Ok(acc.done())
}

// ---------------------------------------------------------------------------
// Right transforms.

fn check_iubp(t: &mut Trial) -> Result<Outcome> {
    let bp = t.unitary_or_isometric()?;
    let v = std_unitary_with(&mut t.rng, bp.h())?;
    let tol = t.tol;
    let r = transform_right_std(&bp, &v)?;
    let mut acc = Acc::new();
    acc.flag(r.pair.classification() == bp.classification(), "classification preserved");
    acc.flag(r.one_to_one, "ker V ⊆ ker Γ");
    if bp.is_unitary() {
        acc.rel(&r.t_prime, &underlying_t(&r.pair)?, tol, "T' = V(T)");
    }
    let z = t.z();
    wsample(&r.pair, z)?;
    acc.num(right_weyl_residual(&bp, &v.to_relation(), &r.pair, z)?, tol.angle_tol, "M' = Γ(N̂^V_z(A_*))");
    Ok(acc.done())
}

fn draw_rho_z(t: &mut Trial, bp: &BoundaryPair, v: &StdUnitaryOp) -> Result<Option<(C64, bool)>> {
    for _ in 0..5 {
        let z = t.z();
        let rho = rho_v(bp, v, z)?;
        if rho.contains() {
            return Ok(Some((z, rho.consistent())));
        }
        if !rho.consistent() {
            return Ok(Some((z, false)));
        }
    }
    Ok(None)
}

fn check_iubp3(t: &mut Trial) -> Result<Outcome> {
    let bp = t.obt(1)?;
    let v = match t.rng.random_range(0..4) {
        0 => StdUnitaryOp::u_j(bp.h()),
        1 if bp.h().is_hilbert() => StdUnitaryOp::rotation(bp.n(), t.rng.random_range(0.1..3.0)),
        _ => std_unitary_with(&mut t.rng, bp.h())?,
    };
    let Some((z, consistent)) = draw_rho_z(t, &bp, &v)? else {
        return Ok(Outcome::skip("no sampled z in ρ_V"));
    };
    let mut acc = Acc::new();
    acc.flag(consistent, "ρ_V via p_V(z; T₀) agrees with res T₀'");
    if !consistent {
        return Ok(acc.done());
    }
    wsample(&bp, z)?;
    let s = delta_sample(&bp, &v, z)?;
    acc.num(s.residual, t.tol.angle_tol, "M' = M + Δ");
    Ok(acc.done())
}

fn check_ftex(t: &mut Trial) -> Result<Outcome> {
    let bp = t.obt(1)?;
    let v = StdUnitaryOp::u_j(bp.h());
    let Some((z, consistent)) = draw_rho_z(t, &bp, &v)? else {
        return Ok(Outcome::skip("no sampled z in ρ_V"));
    };
    let mut acc = Acc::new();
    acc.flag(consistent, "ρ_V consistency");
    if !consistent {
        return Ok(acc.done());
    }
    let d1 = delta_correction(&bp, &v, z)?;
    let d2 = delta_ftex(&bp, z)?;
    acc.num((&d1 - &d2).norm() / op_norm(&d1).max(1.0), t.tol.angle_tol, "Δ = zΓ₁(JT₀ − z)⁻¹(I − J)γ");
    acc.num(delta_sample(&bp, &v, z)?.residual, t.tol.angle_tol, "M' = M + Δ");
    Ok(acc.done())
}

/// Similarity fixture: even trials make `ker p_V(z)` contain `N_z(T⁺)`, odd trials avoid it.
fn delta_fixture(t: &mut Trial) -> Result<Option<(BoundaryPair, StdUnitaryOp, C64, bool)>> {
    let bp = t.obt(1)?;
    let tol = t.tol;
    let n = bp.n();
    let z = t.z();
    let nz = eigenspace(&t_plus(&bp)?, z, tol)?;
    let want_contained = t.index % 2 == 0;
    let cols = if want_contained {
        let extra = t.upto(n - nz.dim());
        crate::numkernel::hstack(nz.basis(), &gaussian(&mut t.rng, n, extra))
    } else {
        let d = t.upto(n - 1);
        gaussian(&mut t.rng, n, d)
    };
    let v = match projection_similarity(&cols, bp.h(), 2.0) {
        Ok(v) => v,
        Err(_) => return Ok(None),
    };
    if !rho_v(&bp, &v, z)?.contains() {
        return Ok(None);
    }
    Ok(Some((bp, v, z, want_contained)))
}

fn check_delta0(t: &mut Trial) -> Result<Outcome> {
    let Some((bp, v, z, want)) = delta_fixture(t)? else {
        return Ok(Outcome::skip("fixture is J-degenerate or z ∉ ρ_V"));
    };
    let d = delta_correction(&bp, &v, z)?;
    let m = wsample(&bp, z)?.m.to_matrix(t.tol)?;
    let zero = zero_delta(&d, op_norm(&m));
    let contained = delta0_kernel_condition(&bp, &v, z)?;
    let mut acc = Acc::new();
    acc.flag(contained == want, "fixture direction");
    acc.flag(zero == contained, "Δ(z) = 0 ⇔ N_z(T⁺) ⊆ ker p_V(z)");
    acc.residual = if contained { d.norm() } else { 0.0 };
    Ok(acc.done().with_note(format!("direction: {}", if want { "contained" } else { "not contained" })))
}

fn check_delta0b(t: &mut Trial) -> Result<Outcome> {
    let (bp, v, z) = if t.coin() {
        match delta_fixture(t)? {
            Some((bp, v, z, _)) => (bp, v, z),
            None => return Ok(Outcome::skip("fixture is J-degenerate or z ∉ ρ_V")),
        }
    } else {
        let bp = t.obt(1)?;
        let v = std_unitary_with(&mut t.rng, bp.h())?;
        let Some((z, true)) = draw_rho_z(t, &bp, &v)? else {
            return Ok(Outcome::skip("no sampled z in ρ_V"));
        };
        (bp, v, z)
    };
    // z₀ is a small perturbation of z so that z lies inside the disc whenever it is nonempty.
    let z0 = z + C64::new(1e-3, 0.0);
    let Some(cond) = delta0b_condition(&bp, &v, z0, z)? else {
        return Ok(Outcome::skip("z outside the disc around z₀"));
    };
    let d = delta_correction(&bp, &v, z)?;
    let m = wsample(&bp, z)?.m.to_matrix(t.tol)?;
    Ok(Outcome::check(zero_delta(&d, op_norm(&m)) == cond, 0.0).with_note(format!("condition holds: {cond}")))
}

pub const SCALED_KAPPAS: [f64; 3] = [2.0, 1.732_050_807_568_877_2, -2.0];

fn check_scaled_obt(t: &mut Trial) -> Result<Outcome> {
    let bp = t.obt(1)?;
    let kappa = SCALED_KAPPAS[(t.index % 3) as usize];
    let s = scaled_obt(&bp, kappa)?;
    let z = t.z();
    let m = wsample(&bp, z)?.m.to_matrix(t.tol)?;
    let ms = wsample(&s, z)?.m.to_matrix(t.tol)?;
    let r = (&ms - m.map(|x| x * kappa * kappa)).norm() / op_norm(&ms).max(1.0);
    let mut acc = Acc::new();
    acc.flag(s.is_obt(), "scaled pair is an ordinary boundary triple");
    acc.num(r, t.tol.angle_tol, "M' = κ²M");
    Ok(acc.done())
}

// ---------------------------------------------------------------------------
// Left transforms.

fn check_ibp0(t: &mut Trial) -> Result<Outcome> {
    let bp = t.unitary_or_isometric()?;
    let v = rel_from_operator(&boundary_unitary_with(&mut t.rng, bp.l_dim())?);
    let l = transform_left(&bp, &v)?;
    let z = t.z();
    wsample(&l.pair, z)?;
    let mut acc = Acc::new();
    acc.flag(l.pair.classification() == bp.classification(), "classification preserved");
    acc.rel(&l.t_prime, &underlying_t(&l.pair)?, t.tol, "T' = T");
    acc.num(left_weyl_residual(&bp, &v, &l.pair, z)?, t.tol.angle_tol, "M' = V(M)");
    Ok(acc.done())
}

fn check_iubp2xxcor(t: &mut Trial) -> Result<Outcome> {
    let bp = t.unitary_or_isometric()?;
    let u = boundary_unitary_with(&mut t.rng, bp.l_dim())?;
    let v = rel_from_operator(&u);
    let l = transform_left(&bp, &v)?;
    let back = transform_left(&l.pair, &v.inverse())?;
    let mut acc = Acc::new();
    acc.flag(l.one_to_one, "ker V ⊆ mul Γ with V unitary");
    acc.rel(back.pair.gamma(), bp.gamma(), t.tol, "V⁻¹(VΓ) = Γ");
    Ok(acc.done())
}

fn check_guntp(t: &mut Trial) -> Result<Outcome> {
    let bp = t.obt(2)?;
    let tol = t.tol;
    let m = bp.l_dim();
    if m < 2 {
        return Ok(Outcome::skip("needs a boundary space of dimension at least 2"));
    }
    let k = t.rng.random_range(1..m);
    let a = gaussian(&mut t.rng, m, k);
    let hm = super::gen::random_hermitian(&mut t.rng, m);
    let nset = neutral_graph(&a, &hm, tol)?;
    let d = boundary_orth(&nset, tol)?;
    let v = restrict_operator(&crate::numkernel::identity(2 * m), &d, tol)?;
    let l = transform_left(&bp, &v)?;
    let z = t.z();
    wsample(&l.pair, z)?;
    let mut acc = Acc::new();
    acc.flag(l.bundle == crate::transforms::LeftBundle::GunTp, "second bundle selected");
    acc.flag(is_symmetric(&l.t_prime, bp.h(), tol)?, "T' symmetric");
    acc.flag(rel_contains(&l.t_prime, &underlying_t(&bp)?, tol), "T ⊆ T'");
    acc.flag(l.t_prime.dim() == underlying_t(&bp)?.dim() + k, "dim T' = dim T + dim N");
    acc.flag(l.pair.is_isometric(), "Γ' isometric");
    acc.num(left_weyl_residual(&bp, &v, &l.pair, z)?, tol.angle_tol, "M' = V(M)");
    Ok(acc.done())
}

fn check_vvv(t: &mut Trial) -> Result<Outcome> {
    let bp = t.obt(1)?;
    let q = qbt_map_with(&mut t.rng, bp.l_dim())?;
    let h = vvv_hypotheses(&bp, &q)?;
    let r = qbt_transform(&bp, &q)?;
    let mut acc = Acc::new();
    acc.flag(h.lemma_bundle(), "hypotheses (a)-(c)");
    acc.flag(r.pair.is_isometric(), "Γ' isometric");
    acc.rel(&projections_pi(&r.pair)?.t0, &projections_pi(&bp)?.t0, t.tol, "T'₀ = T₀");
    Ok(acc.done())
}

fn check_vstar(t: &mut Trial) -> Result<Outcome> {
    let bp = t.obt(1)?;
    let tol = t.tol;
    let q = qbt_map_with(&mut t.rng, bp.l_dim())?;
    let vs = v_star(&q.to_relation(), tol)?;
    let pi = projections_pi(&bp)?;
    let g1_t0 = crate::relcalc::image(&pi.gamma1, pi.t0.graph(), tol)?;
    let mut acc = Acc::new();
    acc.flag(vs.dom().dim() == 0, "dom V_* = {0}");
    acc.flag(contains(&vs.mul(), &g1_t0, tol)?, "Γ₁(T₀) ⊆ mul V_*");
    acc.flag(vs.mul().is_full(), "V_* = {0} × dom G*");
    let r = qbt_transform(&bp, &q)?;
    acc.rel(&projections_pi(&r.pair)?.t0, &pi.t0, tol, "T'₀ = T₀");
    Ok(acc.done())
}

fn check_propvvv(t: &mut Trial) -> Result<Outcome> {
    let bp = t.obt(1)?;
    let q = qbt_map_with(&mut t.rng, bp.l_dim())?;
    let r = qbt_transform(&bp, &q)?;
    let z = t.z();
    wsample(&r.pair, z)?;
    let mut acc = Acc::new();
    acc.flag(r.pair.is_obt(), "Γ' is an ordinary boundary triple");
    acc.rel(&projections_pi(&r.pair)?.t0, &projections_pi(&bp)?.t0, t.tol, "T'₀ = T₀");
    acc.num(qbt_weyl_residual(&bp, &q, &r.pair, z)?, t.tol.angle_tol, "M' = E + G*MG");
    Ok(acc.done())
}

fn check_qbtex(t: &mut Trial) -> Result<Outcome> {
    let bp = t.obt(1)?;
    let tol = t.tol;
    let d = t.rng.random_range(1..bp.gamma().dim());
    let sub = t.sub_relation(bp.gamma(), d)?;
    let ip = BoundaryPair::new(bp.h().clone(), bp.l_dim(), sub, tol)?;
    if ip.is_unitary() {
        return Ok(Outcome::skip("the restriction is still unitary"));
    }
    let q = qbt_map_with(&mut t.rng, bp.l_dim())?;
    let (lhs, rhs) = qbtex_sides(&ip, &q)?;
    let mut acc = Acc::new();
    acc.flag(ip.is_isometric(), "restriction isometric");
    acc.rel(&lhs, &rhs, tol, "ker Γ'⁺ = E₀* + G*Θ₀*G");
    Ok(acc.done())
}

fn check_thmvvv(t: &mut Trial) -> Result<Outcome> {
    let bp = t.obt(1)?;
    let tol = t.tol;
    let m = bp.l_dim();
    let q = qbt_map_with(&mut t.rng, m)?;
    let h = vvv_hypotheses(&bp, &q)?;
    let theta0 = relation_in(bp.gamma().ran())?;
    let theta0_star = hilbert_adjoint(&theta0, tol)?;
    let g_rel = rel_from_operator(q.g());
    let dom_theta_g = compose(&theta0_star, &g_rel, tol)?.dom();
    let mut acc = Acc::new();
    acc.flag(h.ker_gamma_is_t && h.t0_selfadjoint, "ker Γ = T and T₀ selfadjoint");
    acc.flag(intersect(&Subspace::full(m), &dom_theta_g, tol)?.dim() == 0, "dom E₀* ∩ dom(Θ₀*G) = {0}");
    acc.flag(theta0.dom().is_full(), "dom Θ₀ full");
    let r = qbt_transform(&bp, &q)?;
    let f = r.pair.flags();
    acc.flag(f.gamma_is_operator && f.t0_selfadjoint && f.gamma_surjective, "Γ' is a quasi boundary triple");
    let z = t.z();
    let mp = wsample(&r.pair, z)?.m;
    acc.flag(mp.dom().is_full(), "dom M'(z) = dom E₀");
    acc.num(qbt_weyl_residual(&bp, &q, &r.pair, z)?, tol.angle_tol, "M' = E₀ + G*MG");
    Ok(acc.done())
}

// ---------------------------------------------------------------------------
// Nevanlinna probe.

fn check_pstan2(t: &mut Trial) -> Result<Outcome> {
    let n = t.n();
    let m = t.m_for(n);
    let kappa = [0, 1.min(n)][t.rng.random_range(0..2)];
    let bp = unitary_pair_with(&mut t.rng, n, m, kappa)?.with_tolerance(t.tol);
    let pts: Vec<C64> = (0..3).map(|_| t.upper_z()).collect();
    let grid = KernelSampleGrid::symmetric(&pts)?;
    let eps = pts.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min) / 2.0;
    let p = gen_nevanlinna_probe(&bp, eps, &grid)?;
    let mut acc = Acc::new();
    acc.flag(p.condition1, "condition (1)");
    acc.flag(p.kappa_prime <= p.kappa_bound, "κ' ≤ κ₋");
    if kappa == 0 {
        acc.flag(p.kappa_prime == 0, "no negative squares for J = I");
    }
    if !p.no_admissible_z {
        acc.flag(p.condition2, "condition (2)");
        let scaled = scale_eps(&bp, eps)?;
        let (z, w) = (pts[0], pts[pts.len() - 1]);
        if let (Ok(a), Ok(b)) = (nev_kernel(&scaled, z, w), nev_kernel(&scaled, w, z)) {
            acc.num((a.adjoint() - b).norm() / op_norm(&a).max(1.0), 1e-10, "G(z, w)* = G(w, z)");
        }
    }
    Ok(acc.done().with_note(format!("κ' = {}, κ₋ = {}", p.kappa_prime, p.kappa_bound)))
}

// ---------------------------------------------------------------------------
// Registry.

pub type CheckFn = fn(&mut Trial) -> Result<Outcome>;

pub struct TheoremEntry {
    pub id: &'static str,
    pub summary: &'static str,
    /// Hypotheses that are automatically true in finite dimensions.
    pub vacuous: &'static [&'static str],
    pub run: CheckFn,
}

const CLOSED: &str = "closedness of the relations involved";

pub const THEOREMS: [TheoremEntry; 29] = [
    TheoremEntry {
        id: "pop_lemma",
        summary: "L ⊆ R: equal dom and mul ⇔ L = R ⇔ equal ran and ker",
        vacuous: &[CLOSED],
        run: check_pop,
    },
    TheoremEntry {
        id: "derk_lemma",
        summary: "(RX)⁺ = X⁺R⁺ when ran X ⊆ dom R; (YR)⁺ = R⁺Y⁺ when dom Y ⊆ ran R",
        vacuous: &[CLOSED],
        run: check_derk,
    },
    TheoremEntry {
        id: "cwsum_adjoint",
        summary: "(T⁺)⁺ = T and (V ∔ W)⁺ = V⁺ ∩ W⁺",
        vacuous: &["closure of V ∔ W", "closure of V⁺ ∔ W⁺"],
        run: check_cwsum_adjoint,
    },
    TheoremEntry {
        id: "torth",
        summary: "V(T)⁺ = V_#(T⁺); V⁻¹(V(T)) = T under ker V ⊆ T ⊆ dom V",
        vacuous: &["closure of V|_T equals closure-V restricted to closure-T", "(V): closure-T ∔ dom closure-V is closed"],
        run: check_torth,
    },
    TheoremEntry {
        id: "wie",
        summary: "V ⊆ V_#, T ⊆ dom V: V(T)⁺ ∩ ran V = V(T⁺ ∩ dom V) = V(T⁺)",
        vacuous: &["V closed", "closure of V|_T equals V restricted to the closure of T ∩ dom V"],
        run: check_wie,
    },
    TheoremEntry {
        id: "behrndt20",
        summary: "L ⊆ R: R = L ∔ N̂_z(R) ⇔ ran(R − z) = ran(L − z)",
        vacuous: &[CLOSED],
        run: check_behrndt20,
    },
    TheoremEntry {
        id: "projp1",
        summary: "L ⊆ L₁ ⊆ R with R = L ∔ N̂_z(R): L₁ = L ∔ N̂_z(L₁)",
        vacuous: &[CLOSED],
        run: check_projp1,
    },
    TheoremEntry {
        id: "rrz",
        summary: "M(z)* = M_{Γ#}(z̄) for unitary pairs",
        vacuous: &["closure of Γ equals Γ", "A_⋆ = A_*"],
        run: check_rrz,
    },
    TheoremEntry {
        id: "rrzz",
        summary: "z ∈ δ_Γ: ran(A_* − ω) full and M(ω)* = M_{Γ#}(ω̄) for ω = z, z̄",
        vacuous: &["closed ranges in Ω_Γ", "M(ω) closed"],
        run: check_rrzz,
    },
    TheoremEntry {
        id: "equivfNTh",
        summary: "T_Θ⁺ = T_{Θ*}; Θ ⊇ ran Γ gives A_*",
        vacuous: &["closure of Γ equals Γ", "essential unitarity equals unitarity"],
        run: check_equivfnth,
    },
    TheoremEntry {
        id: "mrTG_selfadjoint",
        summary: "𝒥(Γ) selfadjoint ⇔ Γ unitary; T-corner identity; σ_p(T) ⊆ σ_p(𝒥(Γ))",
        vacuous: &["closure of 𝒥(Γ)"],
        run: check_mrtg,
    },
    TheoremEntry {
        id: "lemma_r",
        summary: "Σ_Γ ⊆ res 𝒥(Γ)",
        vacuous: &["closed ranges in Ω_Γ", "boundedness of (M(z) + z)⁻¹"],
        run: check_lemma_r,
    },
    TheoremEntry {
        id: "lemma_r2",
        summary: "z ∈ B^ε_Γ with ε = |z|/2: M_ε(z) + z bijective",
        vacuous: &["boundedness of (M_ε(z) + z)⁻¹"],
        run: check_lemma_r2,
    },
    TheoremEntry {
        id: "resTG_pipeline",
        summary: "z ∈ δ_Γ, ε = |z|/2: z ∈ res 𝒥(Γ_ε) and Γ_ε determines Γ",
        vacuous: &["closed ranges in Ω_Γ"],
        run: check_restg,
    },
    TheoremEntry {
        id: "IUBP",
        summary: "Γ' = ΓV⁻¹ keeps the class; T' = V(T); M' = Γ(N̂^V_z(A_*))",
        vacuous: &["dom V closed"],
        run: check_iubp,
    },
    TheoremEntry {
        id: "IUBP3",
        summary: "M' = M + Δ^V_Γ on ρ_V",
        vacuous: &["density of dom T (replaced by the decomposition A_* = T₀ ∔ N̂_z(A_*))"],
        run: check_iubp3,
    },
    TheoremEntry {
        id: "delta0",
        summary: "Δ(z) = 0 ⇔ N_z(T⁺) ⊆ ker p_V(z)",
        vacuous: &["density of dom T"],
        run: check_delta0,
    },
    TheoremEntry {
        id: "delta0b",
        summary: "inside the disc: Δ(z) = 0 ⇔ W(A,B;z)N_z(T⁺) ⊆ N_z(φ_V(z))",
        vacuous: &["density of dom T"],
        run: check_delta0b,
    },
    TheoremEntry {
        id: "scaled_obt",
        summary: "Γ'₀ = κ⁻¹Γ₀, Γ'₁ = κΓ₁ gives M' = κ²M",
        vacuous: &[],
        run: check_scaled_obt,
    },
    TheoremEntry {
        id: "fTex",
        summary: "V = U_J: Δ = zΓ₁(JT₀ − z)⁻¹(I − J)γ",
        vacuous: &["density of dom T"],
        run: check_ftex,
    },
    TheoremEntry {
        id: "IBP0",
        summary: "Γ' = VΓ with dom V ⊇ ran Γ: class kept, T' = T, M' = V(M)",
        vacuous: &["dom V closed"],
        run: check_ibp0,
    },
    TheoremEntry {
        id: "IUBP2xxcor",
        summary: "unitary V with ker V ⊆ mul Γ: V⁻¹(VΓ) = Γ",
        vacuous: &["dom V closed"],
        run: check_iubp2xxcor,
    },
    TheoremEntry {
        id: "GunTp",
        summary: "V = I restricted to N^[⊥]: T' = Γ⁻¹(mul V⁺) symmetric, M' = V(M)",
        vacuous: &["dom V closed", "mul V⁺ closed"],
        run: check_guntp,
    },
    TheoremEntry {
        id: "VVV",
        summary: "QBT map on an ordinary triple: hypotheses (a)-(c) hold and T'₀ = T₀",
        vacuous: &["(b) dense range equals full range", "closure of G"],
        run: check_vvv,
    },
    TheoremEntry {
        id: "Vstar",
        summary: "dom V_* = {0}, Γ₁(T₀) ⊆ mul V_*, hence T'₀ = T₀",
        vacuous: &[],
        run: check_vstar,
    },
    TheoremEntry {
        id: "propVVV",
        summary: "QBT map: Γ' ordinary, T'₀ = T₀, M' = E + G*MG",
        vacuous: &["mul closure-G ⊆ closed range of G_E"],
        run: check_propvvv,
    },
    TheoremEntry {
        id: "QBTex",
        summary: "isometric Γ: ker Γ'⁺ = E₀* + G*Θ₀*G",
        vacuous: &["closure of G"],
        run: check_qbtex,
    },
    TheoremEntry {
        id: "thmVVV",
        summary: "ker Γ = T, T₀ selfadjoint: Γ' quasi boundary triple with M' = E₀ + G*MG",
        vacuous: &["closure of dom E₀ and dom Θ₀", "closure of G bounded"],
        run: check_thmvvv,
    },
    TheoremEntry {
        id: "pstan2_probe",
        summary: "generalized Nevanlinna probe: condition (1), (2), κ' ≤ κ₋",
        vacuous: &["closure of M(z)"],
        run: check_pstan2,
    },
];

pub fn theorem_ids() -> Vec<&'static str> {
    THEOREMS.iter().map(|t| t.id).collect()
}

pub fn lookup(id: &str) -> Result<&'static TheoremEntry> {
    THEOREMS
        .iter()
        .find(|t| t.id == id)
        .ok_or_else(|| Error::UnknownTheorem(id.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: u64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub theorem_id: String,
    pub trials: u64,
    pub failures: u64,
    /// Trials whose sampled instance did not meet the hypotheses.
    pub skipped: u64,
    pub worst_residual: f64,
    pub vacuous_clauses: Vec<String>,
    pub seed: u64,
    pub dims: DimRange,
    pub angle_tol: f64,
    /// First failures in trial order.
    pub failure_details: Vec<TrialFailure>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn exercised(&self) -> u64 {
        self.trials - self.skipped
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

const MAX_DETAILS: usize = 20;

pub fn check_theorem(id: &str, trials: u64, dims: DimRange, seed: u64, tol: Tolerance) -> Result<CheckReport> {
    check_theorem_with(id, trials, dims, seed, tol, Execution::Parallel)
}

pub fn check_theorem_with(
    id: &str,
    trials: u64,
    dims: DimRange,
    seed: u64,
    tol: Tolerance,
    exec: Execution,
) -> Result<CheckReport> {
    let entry = lookup(id)?;
    let idx: Vec<u64> = (0..trials).collect();
    let run = |&i: &u64| -> (u64, Result<Outcome>) {
        let mut t = Trial::new(seed, i, dims, tol);
        (i, (entry.run)(&mut t))
    };
    let mut results = match exec {
        Execution::Parallel => crate::exec::map_collect(&idx, run),
        Execution::Sequential => crate::exec::map_collect_seq(&idx, run),
    };
    results.sort_by_key(|(i, _)| *i);
    let mut failures = 0;
    let mut skipped = 0;
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for (i, r) in results {
        let (failed, msg) = match r {
            Ok(o) => {
                match o.status {
                    Status::Pass => {}
                    Status::Skip => skipped += 1,
                    Status::Fail => {}
                }
                if o.status != Status::Skip {
                    worst = worst.max(o.residual);
                }
                (o.status == Status::Fail, o.note.unwrap_or_default())
            }
            Err(e) => (true, format!("error: {e}")),
        };
        if failed {
            failures += 1;
            if details.len() < MAX_DETAILS {
                details.push(TrialFailure { trial: i, message: msg });
            }
        }
    }
    Ok(CheckReport {
        theorem_id: entry.id.to_string(),
        trials,
        failures,
        skipped,
        worst_residual: worst,
        vacuous_clauses: entry.vacuous.iter().map(|s| s.to_string()).collect(),
        seed,
        dims,
        angle_tol: tol.angle_tol,
        failure_details: details,
    })
}

/// Run one trial and return its outcome (used by tests to inspect notes).
pub fn run_trial(id: &str, seed: u64, trial: u64, dims: DimRange, tol: Tolerance) -> Result<Outcome> {
    let entry = lookup(id)?;
    let mut t = Trial::new(seed, trial, dims, tol);
    (entry.run)(&mut t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete_and_unique() {
        let ids = theorem_ids();
        assert_eq!(ids.len(), 29);
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 29);
        assert!(matches!(lookup("unknown_thm"), Err(Error::UnknownTheorem(_))));
    }

    #[test]
    fn dim_range_parsing() {
        assert_eq!("1..4".parse::<DimRange>().unwrap(), DimRange { lo: 1, hi: 4 });
        assert_eq!("2..=3".parse::<DimRange>().unwrap(), DimRange { lo: 2, hi: 3 });
        assert_eq!("3".parse::<DimRange>().unwrap(), DimRange { lo: 3, hi: 3 });
        assert!("4..1".parse::<DimRange>().is_err());
        assert!("0".parse::<DimRange>().is_err());
        assert!("x".parse::<DimRange>().is_err());
    }

    #[test]
    fn every_theorem_runs_a_few_trials() {
        for e in &THEOREMS {
            let r = check_theorem(e.id, 6, DimRange::new(1, 3).unwrap(), 1, Tolerance::default()).unwrap();
            assert_eq!(r.failures, 0, "{}: {:?}", e.id, r.failure_details);
        }
    }
}
