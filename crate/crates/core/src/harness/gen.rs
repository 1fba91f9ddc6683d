//! Seeded random instances.
//!
//! Every stream is ChaCha8 (RFC 7539 block function, 8 rounds) keyed by
//! `seed_from_u64(seed)` with the 64-bit stream id set to the trial index,
//! so trial `t` of seed `s` is reproducible on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryPair;
use crate::error::{Error, Result};
use crate::krein::{make_krein, BoundarySpace, KreinSpace};
use crate::numkernel::{
    block_diag, column_space, diag_real, identity, intersect, null_space_ref, CMatrix, Subspace, Tolerance, C64,
};
use crate::relcalc::{relation_in, LinearRelation};
use crate::transforms::{boundary_orth, make_std_unitary, neutral_graph, QbtMap, StdUnitaryOp};

pub type TrialRng = ChaCha8Rng;

pub const OBT_RETRY_CAP: usize = 64;
pub const SV_CLIP: (f64, f64) = (0.1, 10.0);

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial);
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    UnitaryBp,
    IsometricBp,
    Obt,
    SymmetricRel,
    StdUnitaryOp,
    QbtMap,
}

impl Flavor {
    pub const ALL: [Flavor; 6] = [
        Flavor::UnitaryBp,
        Flavor::IsometricBp,
        Flavor::Obt,
        Flavor::SymmetricRel,
        Flavor::StdUnitaryOp,
        Flavor::QbtMap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Flavor::UnitaryBp => "unitary_bp",
            Flavor::IsometricBp => "isometric_bp",
            Flavor::Obt => "obt",
            Flavor::SymmetricRel => "symmetric_rel",
            Flavor::StdUnitaryOp => "std_unitary_op",
            Flavor::QbtMap => "qbt_map",
        }
    }
}

impl std::str::FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Flavor::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown flavor {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub m: usize,
    pub kappa_minus: usize,
    pub seed: u64,
    pub flavor: Flavor,
}

impl InstanceSpec {
    pub fn new(n: usize, m: usize, kappa_minus: usize, seed: u64, flavor: Flavor) -> Result<Self> {
        if kappa_minus > n {
            return Err(Error::Precondition(format!("κ₋ = {kappa_minus} exceeds n = {n}")));
        }
        if n == 0 {
            return Err(Error::Precondition("state dimension must be positive".into()));
        }
        Ok(InstanceSpec {
            n,
            m,
            kappa_minus,
            seed,
            flavor,
        })
    }

    pub fn rng(&self) -> TrialRng {
        trial_rng(self.seed, 0)
    }
}

/// Complex Gaussian matrix with `E|x_ij|² = 1`.
pub fn gaussian(rng: &mut TrialRng, rows: usize, cols: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

/// Gaussian matrix with singular values clipped to `[0.1, 10]`.
pub fn conditioned(rng: &mut TrialRng, rows: usize, cols: usize) -> CMatrix {
    let g = gaussian(rng, rows, cols);
    if rows == 0 || cols == 0 {
        return g;
    }
    let svd = g.svd(true, true);
    let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let s = svd.singular_values.map(|x| C64::new(x.clamp(SV_CLIP.0, SV_CLIP.1), 0.0));
    u * CMatrix::from_diagonal(&s) * vt
}

/// Haar-distributed unitary via QR of a Gaussian matrix with phase correction.
pub fn random_unitary(rng: &mut TrialRng, k: usize) -> CMatrix {
    if k == 0 {
        return CMatrix::zeros(0, 0);
    }
    let qr = gaussian(rng, k, k).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for j in 0..k {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let col = q.column(j) * ph;
        q.set_column(j, &col);
    }
    q
}

pub fn random_hermitian(rng: &mut TrialRng, k: usize) -> CMatrix {
    let g = gaussian(rng, k, k);
    (&g + g.adjoint()).map(|x| x * 0.5)
}

pub fn random_subspace(rng: &mut TrialRng, ambient: usize, dim: usize) -> Subspace {
    let d = dim.min(ambient);
    if d == 0 {
        return Subspace::zero(ambient);
    }
    let q = random_unitary(rng, ambient);
    Subspace::from_orthonormal(q.columns(0, d).into_owned()).expect("columns of a unitary")
}

pub fn random_relation(rng: &mut TrialRng, from: usize, to: usize, dim: usize) -> LinearRelation {
    LinearRelation::new(from, to, random_subspace(rng, from + to, dim)).expect("matching ambient")
}

/// Fundamental symmetry with `κ₋ = kappa`, rotated by a random unitary.
pub fn random_krein(rng: &mut TrialRng, n: usize, kappa: usize) -> Result<KreinSpace> {
    let d: Vec<f64> = (0..n).map(|i| if i < n - kappa { 1.0 } else { -1.0 }).collect();
    let u = random_unitary(rng, n);
    let j = &u * diag_real(&d) * u.adjoint();
    make_krein((&j + j.adjoint()).map(|x| x * 0.5))
}

/// A relation from `(C^p, S1)` to `(C^q, S2)` whose graph is hypermaximal
/// neutral for `diag(S1, −S2)`; requires equal signatures of the two sides.
pub fn random_unitary_relation(rng: &mut TrialRng, s1: &CMatrix, s2: &CMatrix) -> Result<LinearRelation> {
    let (p, q) = (s1.nrows(), s2.nrows());
    let s = block_diag(s1, &s2.map(|x| -x));
    let tol = Tolerance::default();
    let ep = null_space_ref(&(&s - identity(p + q)), 1.0, tol)?;
    let em = null_space_ref(&(&s + identity(p + q)), 1.0, tol)?;
    if ep.dim() != em.dim() {
        return Err(Error::Precondition(format!(
            "no unitary relation between signatures: {} positive vs {} negative directions",
            ep.dim(),
            em.dim()
        )));
    }
    let w = random_unitary(rng, ep.dim());
    let g = ep.basis() + em.basis() * w;
    LinearRelation::new(p, q, column_space(&g, tol)?)
}

pub fn unitary_pair_with(rng: &mut TrialRng, n: usize, m: usize, kappa: usize) -> Result<BoundaryPair> {
    let h = random_krein(rng, n, kappa)?;
    let hat = h.doubled().j().clone();
    let hat_l = BoundarySpace::new(m).hat_circ;
    let g = random_unitary_relation(rng, &hat, &hat_l)?;
    BoundaryPair::new(h, m, g, Tolerance::default())
}

pub fn isometric_pair_with(rng: &mut TrialRng, n: usize, m: usize, kappa: usize, dim: usize) -> Result<BoundaryPair> {
    let u = unitary_pair_with(rng, n, m, kappa)?;
    let g = u.gamma();
    let coeffs = random_subspace(rng, g.dim(), dim);
    let sub = Subspace::from_orthonormal(g.graph().basis() * coeffs.basis())?;
    BoundaryPair::new(u.h().clone(), m, LinearRelation::new(g.from_dim(), g.to_dim(), sub)?, u.tol())
}

pub fn obt_with(rng: &mut TrialRng, n: usize, m: usize, kappa: usize) -> Result<BoundaryPair> {
    if m > n {
        return Err(Error::Precondition(format!("an ordinary boundary triple needs m ≤ n, got m = {m}, n = {n}")));
    }
    for _ in 0..OBT_RETRY_CAP {
        let bp = unitary_pair_with(rng, n, m, kappa)?;
        let f = bp.flags();
        if f.is_obt() && f.t0_selfadjoint && f.ran_gamma0_full {
            return Ok(bp);
        }
    }
    Err(Error::RetryExhausted(OBT_RETRY_CAP, "no surjective operator Γ was drawn".into()))
}

/// Isometric pair `Γ ∩ (C^{2n} × N^[⊥])` cut out of an ordinary boundary triple by a
/// random neutral `N` of dimension `k`; its `T = Γ⁻¹(N)` is symmetric by construction.
pub fn restricted_pair_with(rng: &mut TrialRng, n: usize, m: usize, kappa: usize, k: usize) -> Result<BoundaryPair> {
    if k == 0 || k > m {
        return Err(Error::Precondition(format!("neutral dimension must lie in 1..={m}, got {k}")));
    }
    let bp = obt_with(rng, n, m, kappa)?;
    let tol = bp.tol();
    let a = gaussian(rng, m, k);
    let h = random_hermitian(rng, m);
    let d = boundary_orth(&neutral_graph(&a, &h, tol)?, tol)?;
    let cut = Subspace::from_orthonormal(block_diag(&identity(2 * n), d.basis()))?;
    let g = bp.gamma();
    let graph = intersect(g.graph(), &cut, tol)?;
    BoundaryPair::new(bp.h().clone(), m, LinearRelation::new(g.from_dim(), g.to_dim(), graph)?, tol)
}

pub fn std_unitary_with(rng: &mut TrialRng, k: &KreinSpace) -> Result<StdUnitaryOp> {
    let hat = k.doubled().j().clone();
    let tol = Tolerance::default();
    for _ in 0..OBT_RETRY_CAP {
        let v = random_unitary_relation(rng, &hat, &hat)?;
        if v.is_operator() && v.dom().is_full() {
            if let Ok(op) = StdUnitaryOp::from_relation(&v, k.clone(), k.clone(), tol) {
                return Ok(op);
            }
        }
    }
    Err(Error::RetryExhausted(OBT_RETRY_CAP, "no standard unitary operator was drawn".into()))
}

/// Unitary operator on `(C^{2m}, Ĵ°)`.
pub fn boundary_unitary_with(rng: &mut TrialRng, m: usize) -> Result<CMatrix> {
    let h = KreinSpace::hilbert(m);
    Ok(std_unitary_with(rng, &h)?.matrix())
}

pub fn qbt_map_with(rng: &mut TrialRng, m: usize) -> Result<QbtMap> {
    let g = conditioned(rng, m, m);
    let e = random_hermitian(rng, m);
    QbtMap::new(g, e, Tolerance::default())
}

/// Output of `gen`: one of the instance kinds.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "flavor", content = "instance", rename_all = "snake_case")]
pub enum Instance {
    UnitaryBp(BoundaryPair),
    IsometricBp(BoundaryPair),
    Obt(BoundaryPair),
    SymmetricRel { space: KreinSpace, relation: LinearRelation },
    StdUnitaryOp(StdUnitaryOp),
    QbtMap(QbtMap),
}

impl Instance {
    pub fn flavor(&self) -> Flavor {
        match self {
            Instance::UnitaryBp(_) => Flavor::UnitaryBp,
            Instance::IsometricBp(_) => Flavor::IsometricBp,
            Instance::Obt(_) => Flavor::Obt,
            Instance::SymmetricRel { .. } => Flavor::SymmetricRel,
            Instance::StdUnitaryOp(_) => Flavor::StdUnitaryOp,
            Instance::QbtMap(_) => Flavor::QbtMap,
        }
    }

    pub fn boundary_pair(&self) -> Option<&BoundaryPair> {
        match self {
            Instance::UnitaryBp(b) | Instance::IsometricBp(b) | Instance::Obt(b) => Some(b),
            _ => None,
        }
    }
}

pub fn gen_unitary_boundary_pair(spec: &InstanceSpec) -> Result<BoundaryPair> {
    unitary_pair_with(&mut spec.rng(), spec.n, spec.m, spec.kappa_minus)
}

/// Random subspace of dimension `dim` (default half of `n + m`) of a unitary graph.
pub fn gen_isometric_boundary_pair(spec: &InstanceSpec, dim: Option<usize>) -> Result<BoundaryPair> {
    let d = dim.unwrap_or((spec.n + spec.m) / 2);
    isometric_pair_with(&mut spec.rng(), spec.n, spec.m, spec.kappa_minus, d)
}

pub fn gen_obt(spec: &InstanceSpec) -> Result<BoundaryPair> {
    obt_with(&mut spec.rng(), spec.n, spec.m, spec.kappa_minus)
}

pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
    let mut rng = spec.rng();
    let (n, m, k) = (spec.n, spec.m, spec.kappa_minus);
    Ok(match spec.flavor {
        Flavor::UnitaryBp => Instance::UnitaryBp(unitary_pair_with(&mut rng, n, m, k)?),
        Flavor::IsometricBp => Instance::IsometricBp(isometric_pair_with(&mut rng, n, m, k, (n + m) / 2)?),
        Flavor::Obt => Instance::Obt(obt_with(&mut rng, n, m, k)?),
        Flavor::SymmetricRel => {
            let bp = unitary_pair_with(&mut rng, n, m, k)?;
            let t = crate::boundary::underlying_t(&bp)?;
            Instance::SymmetricRel {
                space: bp.h().clone(),
                relation: relation_in(t.graph().clone())?,
            }
        }
        Flavor::StdUnitaryOp => {
            let h = random_krein(&mut rng, n, k)?;
            Instance::StdUnitaryOp(std_unitary_with(&mut rng, &h)?)
        }
        Flavor::QbtMap => Instance::QbtMap(qbt_map_with(&mut rng, m)?),
    })
}

/// `(X⁻¹, 0; 0, X⁺)` with `X = P + s(I − P)` and `P` the `J`-orthogonal
/// projection onto the span of `cols`; then `ker p_V(z) = ran P`.
pub fn projection_similarity(cols: &CMatrix, k: &KreinSpace, s: f64) -> Result<StdUnitaryOp> {
    let tol = Tolerance::default();
    let n = k.dim();
    let p = if cols.ncols() == 0 {
        CMatrix::zeros(n, n)
    } else {
        crate::transforms::j_projection(cols, k, tol)?
    };
    let x = &p + (identity(n) - &p).map(|v| v * s);
    let xi = crate::numkernel::inverse(&x, tol)?;
    let xp = k.j() * x.adjoint() * k.j();
    make_std_unitary(xi, CMatrix::zeros(n, n), CMatrix::zeros(n, n), xp, k.clone(), k.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{underlying_t, Classification};
    use crate::relcalc::is_symmetric;

    #[test]
    fn streams_are_reproducible() {
        let a = gaussian(&mut trial_rng(5, 3), 2, 2);
        let b = gaussian(&mut trial_rng(5, 3), 2, 2);
        let c = gaussian(&mut trial_rng(5, 4), 2, 2);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn conditioning_clips() {
        let g = conditioned(&mut trial_rng(1, 0), 4, 3);
        let s = crate::numkernel::singular_values(&g);
        assert!(s.iter().all(|&x| (0.1 - 1e-12..=10.0 + 1e-12).contains(&x)));
    }

    #[test]
    fn generated_pairs_are_sound() {
        for (n, m, k) in [(1, 1, 0), (2, 1, 1), (3, 2, 3), (2, 3, 1)] {
            let spec = InstanceSpec::new(n, m, k, 9, Flavor::UnitaryBp).unwrap();
            let bp = gen_unitary_boundary_pair(&spec).unwrap();
            assert_eq!(bp.classification(), Classification::Unitary);
            assert_eq!(bp.gamma().dim(), n + m);
            assert!(is_symmetric(&underlying_t(&bp).unwrap(), bp.h(), bp.tol()).unwrap());
        }
        let spec = InstanceSpec::new(3, 2, 1, 4, Flavor::IsometricBp).unwrap();
        let full = gen_isometric_boundary_pair(&spec, Some(5)).unwrap();
        assert_eq!(full.classification(), Classification::Unitary);
        let half = gen_isometric_boundary_pair(&spec, None).unwrap();
        assert_eq!(half.classification(), Classification::Isometric);
        let zero = gen_isometric_boundary_pair(&spec, Some(0)).unwrap();
        assert_eq!(zero.gamma().dim(), 0);
    }

    #[test]
    fn obts_for_every_signature() {
        for k in [0, 1, 3] {
            let spec = InstanceSpec::new(3, 2, k, 11, Flavor::Obt).unwrap();
            let bp = gen_obt(&spec).unwrap();
            let f = bp.flags();
            assert!(f.gamma_is_operator && f.gamma_surjective && f.t0_selfadjoint && f.ran_gamma0_full);
        }
        let spec = InstanceSpec::new(1, 2, 0, 1, Flavor::Obt).unwrap();
        assert!(gen_obt(&spec).is_err());
        assert!(InstanceSpec::new(1, 1, 2, 0, Flavor::Obt).is_err());
    }

    #[test]
    fn std_unitary_draws() {
        let mut rng = trial_rng(2, 0);
        let k = random_krein(&mut rng, 3, 1).unwrap();
        let v = std_unitary_with(&mut rng, &k).unwrap();
        let inv = v.inverse();
        assert!((inv.matrix() * v.matrix() - identity(6)).norm() < 1e-9);
        for f in Flavor::ALL {
            let spec = InstanceSpec::new(2, 1, 1, 3, f).unwrap();
            let inst = generate(&spec).unwrap();
            let s = serde_json::to_string(&inst).unwrap();
            let back: Instance = serde_json::from_str(&s).unwrap();
            let tol = Tolerance::default();
            match (&inst, &back) {
                (Instance::SymmetricRel { relation: a, .. }, Instance::SymmetricRel { relation: b, .. }) => {
                    assert!(crate::relcalc::rel_eq(a, b, tol))
                }
                _ => match (inst.boundary_pair(), back.boundary_pair()) {
                    (Some(a), Some(b)) => {
                        assert!(crate::relcalc::rel_eq(a.gamma(), b.gamma(), tol));
                        assert_eq!(a.classification(), b.classification());
                    }
                    (None, None) => assert_eq!(serde_json::to_string(&back).unwrap(), s),
                    _ => panic!("flavor changed in a round trip"),
                },
            }
        }
    }
}
