//! Sampled diagnostics for Weyl families: the symmetry `M(z)* = M_{Γ#}(z̄)`,
//! invertibility of `M_ε(z) + z` after scaling, and a negative-squares count.
//!
//! The Gram matrices come from the resolvent of the main transform:
//! `X(z) = P_H (𝒥(Γ) − z̄)⁻¹ E_L` and `G(z, w) = X(w)* J X(z)`. Since every
//! block Gram has the form `Y* J Y`, its negative eigenvalue count can never
//! exceed `κ₋`; a larger count therefore signals a numerical or logic error.

use serde::{Deserialize, Serialize};

use crate::boundary::{gamma_sharp, main_transform, nonreal, spectral_sets, weyl, weyl_of_relation, BoundaryPair};
use crate::error::{Error, Result};
use crate::numkernel::{hermitian_eigenvalues, hstack, op_norm, CMatrix, C64};
use crate::relcalc::{hilbert_adjoint, in_resolvent, rel_eq};
use crate::transforms::scale_eps;

const CONJ_TOL: f64 = 1e-12;

/// Relative threshold below which a Gram eigenvalue counts as negative.
pub const NEG_EIG_REL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct KernelSampleGrid {
    points: Vec<C64>,
    vectors: Option<Vec<Vec<C64>>>,
}

impl KernelSampleGrid {
    /// Validates that no point is real and that the set is closed under conjugation.
    pub fn new(points: Vec<C64>, vectors: Option<Vec<Vec<C64>>>) -> Result<Self> {
        for &z in &points {
            nonreal(z)?;
        }
        for &z in &points {
            let zc = z.conj();
            if !points.iter().any(|&w| (w - zc).norm() <= CONJ_TOL * zc.norm().max(1.0)) {
                return Err(Error::Precondition(format!("grid is not closed under conjugation: {z} has no partner")));
            }
        }
        if let Some(vs) = &vectors {
            if let Some(first) = vs.first() {
                if vs.iter().any(|v| v.len() != first.len()) {
                    return Err(Error::Precondition("probe vectors have different lengths".into()));
                }
            }
        }
        Ok(KernelSampleGrid { points, vectors })
    }

    /// Adds the conjugate of every point (upper half-plane points first).
    pub fn symmetric(points: &[C64]) -> Result<Self> {
        let mut all = Vec::with_capacity(2 * points.len());
        for &z in points {
            nonreal(z)?;
            let up = if z.im > 0.0 { z } else { z.conj() };
            if !all.contains(&up) {
                all.push(up);
            }
        }
        let lower: Vec<C64> = all.iter().map(|z| z.conj()).collect();
        all.extend(lower);
        KernelSampleGrid::new(all, None)
    }

    /// `nx × ny` lattice in `[re_lo, re_hi] × [im_lo, im_hi]` with `0 < im_lo`, plus conjugates.
    pub fn lattice(re: (f64, f64), im: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        if im.0 <= 0.0 || im.1 < im.0 {
            return Err(Error::Precondition("imaginary range must be positive".into()));
        }
        let step = |lo: f64, hi: f64, k: usize, i: usize| if k <= 1 { lo } else { lo + (hi - lo) * i as f64 / (k - 1) as f64 };
        let mut pts = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                pts.push(C64::new(step(re.0, re.1, nx, i), step(im.0, im.1, ny, j)));
            }
        }
        KernelSampleGrid::symmetric(&pts)
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn vectors(&self) -> Option<&[Vec<C64>]> {
        self.vectors.as_deref()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// FNV-1a over the IEEE bits of every coordinate.
    pub fn checksum(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: f64| {
            for b in x.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        for z in &self.points {
            eat(z.re);
            eat(z.im);
        }
        for v in self.vectors.iter().flatten() {
            for z in v {
                eat(z.re);
                eat(z.im);
            }
        }
        format!("{h:016x}")
    }

    fn probe_matrix(&self, m: usize) -> Result<CMatrix> {
        match &self.vectors {
            None => Ok(CMatrix::identity(m, m)),
            Some(vs) if vs.is_empty() => Ok(CMatrix::identity(m, m)),
            Some(vs) => {
                if vs[0].len() != m {
                    return Err(Error::Dimension {
                        context: "probe vector".into(),
                        expected: m,
                        found: vs[0].len(),
                    });
                }
                Ok(CMatrix::from_fn(m, vs.len(), |i, j| vs[j][i]))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct NegSquaresReport {
    pub kappa_prime: usize,
    pub kappa_bound: usize,
    pub grids_used: usize,
}

/// `hilbert_adjoint(M(z))` equals the Weyl family of `Γ_#` at `z̄`.
pub fn weyl_symmetry_check(bp: &BoundaryPair, z: C64) -> Result<bool> {
    nonreal(z)?;
    let tol = bp.tol();
    let lhs = hilbert_adjoint(&weyl(bp, z)?.m, tol)?;
    let sharp = gamma_sharp(bp.gamma(), bp.h(), bp.l_dim(), tol)?;
    let rhs = weyl_of_relation(&sharp, z.conj(), tol)?;
    Ok(rel_eq(&lhs, &rhs, tol))
}

fn check_invertible_shift(bp: &BoundaryPair, z: C64) -> Result<()> {
    let m = weyl(bp, z)?.m;
    if !in_resolvent(&m, -z, bp.tol())? {
        return Err(Error::Precondition(format!(
            "M({z}) + {z} is not invertible; rescale the pair with ε < |z| so that z lies in B^ε"
        )));
    }
    Ok(())
}

/// `X(z) = P_H (𝒥(Γ) − z̄)⁻¹ E_L`, an `n × m` matrix.
pub fn resolvent_column(bp: &BoundaryPair, z: C64) -> Result<CMatrix> {
    nonreal(z)?;
    check_invertible_shift(bp, z)?;
    let (n, m) = (bp.n(), bp.l_dim());
    let j = main_transform(bp);
    let r = j
        .shift(z.conj())?
        .inverse()
        .to_matrix(bp.tol())
        .map_err(|_| Error::Precondition(format!("{} is not in the resolvent set of the main transform", z.conj())))?;
    Ok(r.view((0, n), (n, m)).into_owned())
}

/// `G(z, w) = X(w)* J X(z)`; Hermitian in the sense `G(z, w)* = G(w, z)`.
pub fn nev_kernel(bp: &BoundaryPair, z: C64, w: C64) -> Result<CMatrix> {
    let xz = resolvent_column(bp, z)?;
    let xw = resolvent_column(bp, w)?;
    Ok(xw.adjoint() * bp.h().j() * xz)
}

fn count_negative(gram: &CMatrix) -> usize {
    let herm = (gram + gram.adjoint()).map(|x| x * 0.5);
    let cut = NEG_EIG_REL * op_norm(&herm);
    hermitian_eigenvalues(&herm).into_iter().filter(|&e| e < -cut).count()
}

/// Block Gram matrix `[G(z_j, z_i)]` over one grid and the probe vectors.
pub fn grid_gram(bp: &BoundaryPair, grid: &KernelSampleGrid) -> Result<CMatrix> {
    let probes = grid.probe_matrix(bp.l_dim())?;
    let cols: Vec<Result<CMatrix>> =
        crate::exec::map_collect(grid.points(), |&z| resolvent_column(bp, z).map(|x| x * &probes));
    let mut y = CMatrix::zeros(bp.n(), 0);
    for c in cols {
        y = hstack(&y, &c?);
    }
    Ok(y.adjoint() * bp.h().j() * y)
}

pub fn neg_squares_estimate(bp: &BoundaryPair, grids: &[KernelSampleGrid]) -> Result<NegSquaresReport> {
    if !bp.is_unitary() {
        return Err(Error::Precondition("negative squares are estimated for unitary pairs only".into()));
    }
    let mut kappa_prime = 0;
    for g in grids {
        kappa_prime = kappa_prime.max(count_negative(&grid_gram(bp, g)?));
    }
    Ok(NegSquaresReport {
        kappa_prime,
        kappa_bound: bp.h().neg_index(),
        grids_used: grids.len(),
    })
}

/// Outcome of probing the three generalized Nevanlinna conditions on one grid.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NevanlinnaProbe {
    pub condition1: bool,
    /// Points of the grid (upper half-plane) where the symmetry failed.
    pub condition1_failures: Vec<C64>,
    pub condition2: bool,
    /// Upper half-plane points of `B^ε` where `M_ε(z) + z` was singular.
    pub condition2_failures: Vec<C64>,
    /// The second point of condition (2) is taken equal to `z`.
    pub w_choice: String,
    pub condition3: bool,
    pub kappa_prime: usize,
    pub kappa_bound: usize,
    pub eps: f64,
    pub admissible_points: usize,
    pub no_admissible_z: bool,
    pub grid_checksum: String,
}

/// Probe the scaled pair `Γ_ε`. Nothing is asserted here; every outcome is reported.
pub fn gen_nevanlinna_probe(bp: &BoundaryPair, eps: f64, grid: &KernelSampleGrid) -> Result<NevanlinnaProbe> {
    if !bp.is_unitary() {
        return Err(Error::Precondition("the probe needs a unitary pair".into()));
    }
    let upper: Vec<C64> = grid.points().iter().copied().filter(|z| z.im > 0.0).collect();
    let sym: Vec<Result<bool>> = crate::exec::map_collect(&upper, |&z| weyl_symmetry_check(bp, z));
    let mut condition1_failures = Vec::new();
    for (z, ok) in upper.iter().zip(sym) {
        if !ok? {
            condition1_failures.push(*z);
        }
    }

    let scaled = scale_eps(bp, eps)?;
    let sets = spectral_sets(bp, eps, &upper)?;
    let mut admissible = Vec::new();
    let mut condition2_failures = Vec::new();
    for s in sets.samples.iter().filter(|s| s.in_b_eps) {
        if in_resolvent(&weyl(&scaled, s.z)?.m, -s.z, scaled.tol())? {
            admissible.push(s.z);
        } else {
            condition2_failures.push(s.z);
        }
    }
    let no_admissible_z = admissible.is_empty();
    let report = if no_admissible_z {
        NegSquaresReport {
            kappa_prime: 0,
            kappa_bound: bp.h().neg_index(),
            grids_used: 0,
        }
    } else {
        let g = KernelSampleGrid::symmetric(&admissible)?;
        neg_squares_estimate(&scaled, &[g])?
    };
    Ok(NevanlinnaProbe {
        condition1: condition1_failures.is_empty(),
        condition1_failures,
        condition2: condition2_failures.is_empty() && !no_admissible_z,
        condition2_failures,
        w_choice: "w = z".into(),
        condition3: report.kappa_prime <= report.kappa_bound,
        kappa_prime: report.kappa_prime,
        kappa_bound: report.kappa_bound,
        eps,
        admissible_points: admissible.len(),
        no_admissible_z,
        grid_checksum: grid.checksum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::c;
    use crate::transforms::scale_eps;

    #[test]
    fn grid_validation() {
        assert!(KernelSampleGrid::new(vec![c(1.0, 1.0)], None).is_err());
        assert!(KernelSampleGrid::new(vec![c(1.0, 0.0), c(1.0, -0.0)], None).is_err());
        let g = KernelSampleGrid::symmetric(&[c(1.0, 1.0), c(0.0, -2.0)]).unwrap();
        assert_eq!(g.points().len(), 4);
        let l = KernelSampleGrid::lattice((-1.0, 1.0), (0.5, 2.0), 3, 2).unwrap();
        assert_eq!(l.points().len(), 12);
        assert_eq!(l.checksum(), l.clone().checksum());
        assert_ne!(l.checksum(), g.checksum());
    }

    #[test]
    fn identity_triple() {
        let bp = BoundaryPair::identity_obt(1);
        assert!(weyl_symmetry_check(&bp, c(0.3, 1.0)).unwrap());
        let s = scale_eps(&bp, 0.5).unwrap();
        let g = KernelSampleGrid::lattice((-1.0, 1.0), (1.0, 2.0), 3, 3).unwrap();
        let r = neg_squares_estimate(&s, &[g.clone()]).unwrap();
        assert_eq!(r.kappa_prime, 0);
        let p = gen_nevanlinna_probe(&bp, 0.5, &g).unwrap();
        assert!(p.condition1 && p.condition2 && p.condition3);
        assert_eq!(p.kappa_prime, 0);
    }

    #[test]
    fn flip_has_one_negative_square() {
        let bp = BoundaryPair::flip_fixture(1);
        // Without scaling M(z) + z vanishes identically.
        assert!(nev_kernel(&bp, c(0.0, 1.0), c(0.0, 1.0)).is_err());
        let s = scale_eps(&bp, 0.25).unwrap();
        let z = c(0.5, 1.0);
        let g = nev_kernel(&s, z, z).unwrap();
        assert!(g[(0, 0)].im.abs() < 1e-14 && g[(0, 0)].re < 0.0);
        let w = c(-0.2, 2.0);
        assert!((nev_kernel(&s, z, w).unwrap().adjoint() - nev_kernel(&s, w, z).unwrap()).norm() < 1e-12);
        let grid = KernelSampleGrid::lattice((-1.0, 1.0), (1.0, 2.0), 3, 2).unwrap();
        let r = neg_squares_estimate(&s, &[grid]).unwrap();
        assert_eq!((r.kappa_prime, r.kappa_bound), (1, 1));
    }

    #[test]
    fn empty_grid_is_reported() {
        let bp = BoundaryPair::identity_obt(1);
        let g = KernelSampleGrid::new(Vec::new(), None).unwrap();
        let p = gen_nevanlinna_probe(&bp, 1.0, &g).unwrap();
        assert!(p.no_admissible_z && !p.condition2);
    }
}
