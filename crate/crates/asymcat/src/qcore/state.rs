//! Density matrices and the qubit Bloch picture.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::eig::{hermitian_eig, min_eigenvalue, sqrt_psd, trace_norm_hermitian};
use super::matrix::{pauli_x, pauli_y, pauli_z, ComplexMatrix, Keep};
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Hermitian, unit-trace, PSD matrix over a labeled Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate and wrap a matrix as a quantum state.
    pub fn new(mat: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidState("matrix is not square".into()));
        }
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = mat.hermiticity_deviation();
        if dev > tol.hermitian {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: tol.hermitian,
            });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidState(format!("trace {} is not 1", tr)));
        }
        let min = min_eigenvalue(&mat);
        if min < -tol.psd {
            return Err(Error::NotPsd(min));
        }
        Ok(Self {
            mat: mat.hermitize(),
        })
    }

    /// Pure state |ψ⟩⟨ψ| from (unnormalized) amplitudes.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(Error::InvalidState("zero or non-finite amplitudes".into()));
        }
        let d = amplitudes.len();
        let mat = ComplexMatrix::from_fn(d, d, |i, j| {
            amplitudes[i] * amplitudes[j].conj() / norm2
        });
        Ok(Self { mat })
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    /// Diagonal state from classical probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState("probabilities must be a distribution".into()));
        }
        let d = probs.len();
        let mut mat = ComplexMatrix::zeros(d, d);
        for (i, &p) in probs.iter().enumerate() {
            mat[(i, i)] = C64::new(p, 0.0);
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }

    /// ρ ⊗ σ with composite index `i = i_self * dim_other + i_other`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            mat: self.mat.kron(&other.mat),
        }
    }

    /// Marginal on one factor of a bipartite state.
    pub fn partial_trace(&self, dim_a: usize, dim_b: usize, keep: Keep) -> Result<Self> {
        let mat = super::matrix::partial_trace(&self.mat, dim_a, dim_b, keep)?;
        Ok(Self { mat })
    }

    /// ⟨0|ρ|1⟩, the coherence element of a qubit.
    pub fn coherence(&self) -> C64 {
        self.mat[(0, 1)]
    }

    /// Bloch components of a qubit state.
    pub fn bloch(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "Bloch view needs a qubit, got dim {}",
                self.dim()
            )));
        }
        Ok(BlochVector {
            x: 2.0 * self.mat[(0, 1)].re,
            y: -2.0 * self.mat[(0, 1)].im,
            z: self.mat[(0, 0)].re - self.mat[(1, 1)].re,
        })
    }

    /// Trace distance ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        0.5 * trace_norm_hermitian(&(&self.mat - &other.mat))
    }
}

/// Bloch vector of a qubit state, ρ = (I + xσx + yσy + zσz)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// In-plane coherence radius √(x²+y²); equals the qubit robustness of
    /// asymmetry 2|ρ01|.
    pub fn coherence(&self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    /// Inside the unit ball, with the same printed-precision slack that
    /// [`bloch_to_density`] grants reference states.
    pub fn is_valid(&self) -> bool {
        let n = self.norm();
        n.is_finite() && n <= 1.0 + 1e-4
    }

    /// Pure state at polar angle θ from +z in the xz-plane.
    pub fn pure_xz(theta: f64) -> Self {
        Self {
            x: theta.sin(),
            y: 0.0,
            z: theta.cos(),
        }
    }
}

/// ρ = (I + xσx + yσy + zσz)/2.
///
/// Reference states printed to four decimals can overshoot the unit ball by
/// a few 1e-5 in norm; vectors up to 1 + 1e-4 are accepted verbatim (the
/// matrix then fails positivity by the same sliver), anything further is
/// rejected.
pub fn bloch_to_density(b: &BlochVector) -> Result<DensityMatrix> {
    let n = b.norm();
    if !n.is_finite() || n > 1.0 + 1e-4 {
        return Err(Error::InvalidBloch(n));
    }
    let mut mat = ComplexMatrix::identity(2);
    let paulis = [(b.x, pauli_x()), (b.y, pauli_y()), (b.z, pauli_z())];
    for (c, p) in paulis {
        mat = &mat + &p.scale_re(c);
    }
    let tol = Tolerances {
        psd: 1e-4,
        ..Tolerances::default()
    };
    DensityMatrix::new(mat.scale_re(0.5), &tol)
}

/// Bloch components of a qubit density matrix.
pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    rho.bloch()
}

/// Uhlmann fidelity F(a, b) = (Tr √(√a b √a))².
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    fidelity_mats(a.mat(), b.mat())
}

/// Uhlmann fidelity on raw PSD unit-trace matrices (used for normalized Choi
/// states that may sit slightly outside strict density-matrix tolerances).
pub fn fidelity_mats(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity of {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let tol = Tolerances::measured();
    let ra = sqrt_psd(a, &tol)?;
    let m = &(&ra * b) * &ra;
    let (vals, _) = hermitian_eig(&m.hermitize(), &tol)?;
    let root_sum: f64 = vals.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).min(1.0 + 1e-9))
}
