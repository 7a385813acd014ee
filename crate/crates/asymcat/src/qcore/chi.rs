//! Process (χ) matrices in the elementary operator basis.
//!
//! A χ matrix represents `E(ρ) = Σ_{mn} χ[m,n] B_m ρ B_n†` over the matrix
//! units `B = |i⟩⟨j|`. Published tables rarely say how the units are
//! enumerated or whether the tabulated matrix is conjugated, so the basis
//! convention travels with the data and conversion to the Choi matrix is a
//! pure index reshuffle per convention. With column-major enumeration
//! (`B_{a·d+i} = |i⟩⟨a|`) the χ matrix coincides with the input-major Choi
//! matrix used throughout this crate.

use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Enumeration/conjugation convention of a tabulated process matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChiConvention {
    ElementaryRowMajor,
    ElementaryColMajor,
    ElementaryRowMajorConj,
    ElementaryColMajorConj,
}

impl ChiConvention {
    pub const ALL: [ChiConvention; 4] = [
        ChiConvention::ElementaryRowMajor,
        ChiConvention::ElementaryColMajor,
        ChiConvention::ElementaryRowMajorConj,
        ChiConvention::ElementaryColMajorConj,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "elementary-row-major" => Ok(Self::ElementaryRowMajor),
            "elementary-col-major" => Ok(Self::ElementaryColMajor),
            "elementary-row-major-conj" => Ok(Self::ElementaryRowMajorConj),
            "elementary-col-major-conj" => Ok(Self::ElementaryColMajorConj),
            other => Err(Error::UnknownConvention(other.into())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::ElementaryRowMajor => "elementary-row-major",
            Self::ElementaryColMajor => "elementary-col-major",
            Self::ElementaryRowMajorConj => "elementary-row-major-conj",
            Self::ElementaryColMajorConj => "elementary-col-major-conj",
        }
    }
}

/// Process matrix over the elementary operator basis.
#[derive(Debug, Clone)]
pub struct ChiMatrix {
    /// Operator-basis size d² (16 for the two-qubit composite).
    pub dim: usize,
    pub mat: ComplexMatrix,
    pub basis_convention: ChiConvention,
}

impl ChiMatrix {
    /// Wrap a d²×d² matrix, enforcing Hermiticity at measured-data tolerance.
    pub fn new(mat: ComplexMatrix, basis_convention: ChiConvention, tol: &Tolerances) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch("chi matrix must be square".into()));
        }
        let dim = mat.rows();
        let d = (dim as f64).sqrt().round() as usize;
        if d * d != dim {
            return Err(Error::DimensionMismatch(format!(
                "chi dimension {dim} is not a perfect square"
            )));
        }
        let dev = mat.hermiticity_deviation();
        if dev > tol.chi_hermitian * mat.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: tol.chi_hermitian,
            });
        }
        Ok(Self {
            dim,
            mat,
            basis_convention,
        })
    }

    /// Hilbert-space dimension d with dim = d².
    pub fn hilbert_dim(&self) -> usize {
        (self.dim as f64).sqrt().round() as usize
    }
}

/// Reshuffle a χ matrix into the input-major Choi matrix.
pub fn chi_to_choi(chi: &ChiMatrix) -> ComplexMatrix {
    let d = chi.hilbert_dim();
    let base = match chi.basis_convention {
        ChiConvention::ElementaryColMajor | ChiConvention::ElementaryRowMajor => chi.mat.clone(),
        ChiConvention::ElementaryColMajorConj | ChiConvention::ElementaryRowMajorConj => {
            chi.mat.conj()
        }
    };
    match chi.basis_convention {
        ChiConvention::ElementaryColMajor | ChiConvention::ElementaryColMajorConj => base,
        ChiConvention::ElementaryRowMajor | ChiConvention::ElementaryRowMajorConj => {
            ComplexMatrix::from_fn(chi.dim, chi.dim, |r, c| {
                let (a, i) = (r / d, r % d);
                let (b, k) = (c / d, c % d);
                base[(i * d + a, k * d + b)]
            })
        }
    }
}

/// Inverse of [`chi_to_choi`] for the declared convention.
pub fn choi_to_chi(choi: &ComplexMatrix, convention: ChiConvention, tol: &Tolerances) -> Result<ChiMatrix> {
    let dim = choi.rows();
    let d = (dim as f64).sqrt().round() as usize;
    if d * d != dim || !choi.is_square() {
        return Err(Error::DimensionMismatch(
            "Choi matrix dimension is not a perfect square".into(),
        ));
    }
    let unshuffled = match convention {
        ChiConvention::ElementaryColMajor | ChiConvention::ElementaryColMajorConj => choi.clone(),
        ChiConvention::ElementaryRowMajor | ChiConvention::ElementaryRowMajorConj => {
            ComplexMatrix::from_fn(dim, dim, |r, c| {
                let (i, a) = (r / d, r % d);
                let (k, b) = (c / d, c % d);
                choi[(a * d + i, b * d + k)]
            })
        }
    };
    let mat = match convention {
        ChiConvention::ElementaryColMajor | ChiConvention::ElementaryRowMajor => unshuffled,
        ChiConvention::ElementaryColMajorConj | ChiConvention::ElementaryRowMajorConj => {
            unshuffled.conj()
        }
    };
    ChiMatrix::new(mat, convention, tol)
}
