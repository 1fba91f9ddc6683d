//! Krein spaces `(C^n, J)` and the doubled-space symmetries.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, Error, Result};
use crate::numkernel::{blocks, hermitian_eigenvalues, identity, CMatrix, CVector, C64, I};

const SNAP_TOL: f64 = 1e-8;

/// `C^n` with fundamental symmetry `J` and metric `[x, y] = <x, J y>`.
#[derive(Clone, Debug)]
pub struct KreinSpace {
    dim: usize,
    j: CMatrix,
    neg_index: usize,
}

impl KreinSpace {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn j(&self) -> &CMatrix {
        &self.j
    }

    /// Number of `-1` eigenvalues of `J`.
    pub fn neg_index(&self) -> usize {
        self.neg_index
    }

    pub fn is_hilbert(&self) -> bool {
        self.neg_index == 0
    }

    pub fn hilbert(n: usize) -> Self {
        KreinSpace {
            dim: n,
            j: identity(n),
            neg_index: 0,
        }
    }

    /// `J = diag(1,..,1,-1,..,-1)` with `kappa` trailing minus signs.
    pub fn diagonal(n: usize, kappa: usize) -> Result<Self> {
        if kappa > n {
            return Err(Error::InvalidSymmetry(format!("kappa {kappa} exceeds dimension {n}")));
        }
        let d: Vec<f64> = (0..n).map(|i| if i + kappa >= n { -1.0 } else { 1.0 }).collect();
        make_krein(crate::numkernel::diag_real(&d))
    }

    /// The doubled space `(C^{2n}, Ĵ)` as a Krein space in its own right.
    pub fn doubled(&self) -> KreinSpace {
        let hat = hat_symmetry(self).hat;
        KreinSpace {
            dim: 2 * self.dim,
            j: hat,
            neg_index: self.dim,
        }
    }

    /// Direct sum `(C^{n+m}, J1 ⊕ J2)`.
    pub fn direct_sum(&self, other: &KreinSpace) -> KreinSpace {
        KreinSpace {
            dim: self.dim + other.dim,
            j: crate::numkernel::block_diag(&self.j, &other.j),
            neg_index: self.neg_index + other.neg_index,
        }
    }
}

/// Validate `J` (Hermitian and involutive) and count its negative eigenvalues.
pub fn make_krein(j: CMatrix) -> Result<KreinSpace> {
    check_dim("fundamental symmetry (square)", j.nrows(), j.ncols())?;
    if !crate::numkernel::is_finite(&j) {
        return Err(Error::NonFinite);
    }
    let n = j.nrows();
    let herm_defect = (&j - j.adjoint()).norm();
    if herm_defect > SNAP_TOL {
        return Err(Error::InvalidSymmetry(format!("J is not Hermitian (defect {herm_defect:.3e})")));
    }
    let mut neg = 0;
    for ev in hermitian_eigenvalues(&j) {
        if (ev - 1.0).abs() <= SNAP_TOL {
            continue;
        } else if (ev + 1.0).abs() <= SNAP_TOL {
            neg += 1;
        } else {
            return Err(Error::InvalidSymmetry(format!("eigenvalue {ev} is not +-1")));
        }
    }
    Ok(KreinSpace {
        dim: n,
        j,
        neg_index: neg,
    })
}

/// `[x, y] = <x, J y> = (J y)* x`.
pub fn indef_inner(x: &CVector, y: &CVector, k: &KreinSpace) -> Result<C64> {
    check_dim("indef_inner x", k.dim, x.len())?;
    check_dim("indef_inner y", k.dim, y.len())?;
    Ok((k.j() * y).dotc(x))
}

/// The symmetry `(0, -iJ; iJ, 0)` of the doubled space.
#[derive(Clone, Debug)]
pub struct DoubledSymmetry {
    pub base: KreinSpace,
    pub hat: CMatrix,
}

pub fn hat_symmetry(k: &KreinSpace) -> DoubledSymmetry {
    let n = k.dim;
    let z = CMatrix::zeros(n, n);
    let ij = k.j.map(|x| x * I);
    let hat = blocks(&z, &(-&ij), &ij, &z);
    DoubledSymmetry {
        base: k.clone(),
        hat,
    }
}

/// Boundary space `C^m` (always Hilbert) with its doubled symmetry `(0,-iI; iI,0)`.
#[derive(Clone, Debug)]
pub struct BoundarySpace {
    pub dim: usize,
    pub hat_circ: CMatrix,
}

impl BoundarySpace {
    pub fn new(m: usize) -> Self {
        BoundarySpace {
            dim: m,
            hat_circ: hat_symmetry(&KreinSpace::hilbert(m)).hat,
        }
    }

    pub fn doubled(&self) -> KreinSpace {
        KreinSpace::hilbert(self.dim).doubled()
    }
}

/// The `[⊥]`-complement `{h : [f, h] = 0 for all f in U}` of a subspace of `K`.
pub fn krein_orth_complement(
    u: &crate::numkernel::Subspace,
    k: &KreinSpace,
    tol: crate::numkernel::Tolerance,
) -> Result<crate::numkernel::Subspace> {
    check_dim("krein_orth_complement", k.dim, u.ambient_dim())?;
    if u.dim() == 0 {
        return Ok(crate::numkernel::Subspace::full(k.dim));
    }
    // [f, h] = (J h)* f = 0 for every basis vector f  <=>  U* J h = 0.
    crate::numkernel::null_space(&(u.basis().adjoint() * k.j()), tol)
}

/// Matrix Krein adjoint `X⁺ = J_from X* J_to`.
pub fn krein_adjoint_matrix(x: &CMatrix, from: &KreinSpace, to: &KreinSpace) -> Result<CMatrix> {
    check_dim("krein_adjoint_matrix rows", to.dim, x.nrows())?;
    check_dim("krein_adjoint_matrix cols", from.dim, x.ncols())?;
    Ok(from.j() * x.adjoint() * to.j())
}

#[derive(Serialize, Deserialize)]
struct KreinJson {
    dim: usize,
    #[serde(rename = "J", with = "crate::numkernel::cmatrix_serde")]
    j: CMatrix,
}

impl Serialize for KreinSpace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        KreinJson {
            dim: self.dim,
            j: self.j.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KreinSpace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = KreinJson::deserialize(d)?;
        if raw.j.nrows() != raw.dim {
            return Err(serde::de::Error::custom("J size differs from dim"));
        }
        make_krein(raw.j).map_err(serde::de::Error::custom)
    }
}
