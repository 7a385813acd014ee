//! Quantum channels with interchangeable Kraus and Choi views.
//!
//! The canonical representation is the Choi matrix in input-major block
//! layout: `J = Σ_{ab} |a⟩⟨b| ⊗ E(|a⟩⟨b|)`, so `J[(a,i),(b,k)] =
//! ⟨i|E(|a⟩⟨b|)|k⟩` with row index `a·dim_out + i`. Every constraint this
//! crate cares about (trace preservation, Bohr-frequency masks, catalyst
//! return) is linear in this matrix.

use num_complex::Complex64 as C64;

use super::eig::{hermitian_eig, min_eigenvalue};
use super::matrix::{partial_trace, ComplexMatrix, Keep};
use super::state::DensityMatrix;
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Completely positive trace-preserving map (or, when flagged, a mere
/// hermiticity-preserving map such as a difference of channels).
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    choi: ComplexMatrix,
    kraus: Option<Vec<ComplexMatrix>>,
    hermiticity_preserving_only: bool,
}

/// Outcome of a CPTP validation pass.
#[derive(Debug, Clone, Copy)]
pub struct CptpReport {
    /// Most negative Choi eigenvalue (0 if PSD).
    pub min_choi_eigenvalue: f64,
    /// ‖Tr_out J − I‖_F.
    pub tp_deviation: f64,
}

impl CptpReport {
    pub fn is_cptp(&self, tol: f64) -> bool {
        self.min_choi_eigenvalue > -tol && self.tp_deviation < tol
    }
}

impl QuantumChannel {
    /// Channel from a non-empty Kraus set. The Choi matrix is derived; no
    /// strict completeness check is applied here (printed operators are often
    /// only accurate to a few decimals), use [`cptp_report`] to validate.
    ///
    /// [`cptp_report`]: QuantumChannel::cptp_report
    pub fn from_kraus(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("empty Kraus list".into()))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        if kraus
            .iter()
            .any(|k| k.rows() != dim_out || k.cols() != dim_in)
        {
            return Err(Error::InvalidChannel("Kraus operators differ in shape".into()));
        }
        let choi = kraus_to_choi_impl(&kraus, dim_in, dim_out);
        Ok(Self {
            dim_in,
            dim_out,
            choi,
            kraus: Some(kraus),
            hermiticity_preserving_only: false,
        })
    }

    /// Channel from a Choi matrix, validated CPTP within `tol.choi`.
    pub fn from_choi(choi: ComplexMatrix, dim_in: usize, dim_out: usize, tol: &Tolerances) -> Result<Self> {
        let ch = Self::from_choi_unchecked(choi, dim_in, dim_out)?;
        let report = ch.cptp_report();
        if !report.is_cptp(tol.choi) {
            return Err(Error::InvalidChannel(format!(
                "Choi fails CPTP: min eigenvalue {:.3e}, TP deviation {:.3e}",
                report.min_choi_eigenvalue, report.tp_deviation
            )));
        }
        Ok(ch)
    }

    /// Wrap a Choi matrix without CPTP validation (solver output, measured
    /// data). Hermiticity is still required.
    pub fn from_choi_unchecked(choi: ComplexMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        if choi.rows() != dim_in * dim_out || !choi.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Choi must be {0}x{0}, got {1}x{2}",
                dim_in * dim_out,
                choi.rows(),
                choi.cols()
            )));
        }
        if !choi.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            dim_in,
            dim_out,
            choi: choi.hermitize(),
            kraus: None,
            hermiticity_preserving_only: false,
        })
    }

    /// Hermiticity-preserving map (e.g. a difference of channels) from its
    /// Choi matrix.
    pub fn hermiticity_preserving(choi: ComplexMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        let mut ch = Self::from_choi_unchecked(choi, dim_in, dim_out)?;
        ch.hermiticity_preserving_only = true;
        Ok(ch)
    }

    /// Identity channel on `dim`.
    pub fn identity(dim: usize) -> Self {
        Self::from_kraus(vec![ComplexMatrix::identity(dim)]).expect("identity Kraus")
    }

    /// Unitary conjugation ρ ↦ UρU†.
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::InvalidChannel("unitary must be square".into()));
        }
        Self::from_kraus(vec![u.clone()])
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn is_hermiticity_preserving_only(&self) -> bool {
        self.hermiticity_preserving_only
    }

    /// Kraus view, computed from the Choi matrix if not already present.
    pub fn kraus(&self, tol: &Tolerances) -> Result<Vec<ComplexMatrix>> {
        match &self.kraus {
            Some(k) => Ok(k.clone()),
            None => choi_to_kraus(&self.choi, self.dim_in, self.dim_out, tol),
        }
    }

    /// PSD and trace-preservation deviations of the Choi matrix.
    pub fn cptp_report(&self) -> CptpReport {
        let min = min_eigenvalue(&self.choi);
        let tr_out = partial_trace(&self.choi, self.dim_in, self.dim_out, Keep::A)
            .expect("choi dims are consistent");
        let tp_dev = tr_out.distance(&ComplexMatrix::identity(self.dim_in));
        CptpReport {
            min_choi_eigenvalue: min.min(0.0),
            tp_deviation: tp_dev,
        }
    }

    /// Apply to an arbitrary input matrix by linearity.
    pub fn apply_mat(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(x.rows(), self.dim_in, "input dimension mismatch");
        let d_out = self.dim_out;
        let mut out = ComplexMatrix::zeros(d_out, d_out);
        for a in 0..self.dim_in {
            for b in 0..self.dim_in {
                let w = x[(a, b)];
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..d_out {
                    for k in 0..d_out {
                        out[(i, k)] += w * self.choi[(a * d_out + i, b * d_out + k)];
                    }
                }
            }
        }
        out
    }

    /// Apply to a density matrix; the result is only a valid state when the
    /// channel is CPTP, so validation uses the loose measured tolerances.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_mat(rho.mat()), &Tolerances::measured())
    }

    /// Composition self ∘ inner (inner acts first).
    pub fn compose(&self, inner: &QuantumChannel) -> Result<QuantumChannel> {
        if inner.dim_out != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "compose: inner output {} vs outer input {}",
                inner.dim_out, self.dim_in
            )));
        }
        let d_in = inner.dim_in;
        let d_out = self.dim_out;
        let mut choi = ComplexMatrix::zeros(d_in * d_out, d_in * d_out);
        for a in 0..d_in {
            for b in 0..d_in {
                let block = self.apply_mat(&inner.block(a, b));
                for i in 0..d_out {
                    for k in 0..d_out {
                        choi[(a * d_out + i, b * d_out + k)] = block[(i, k)];
                    }
                }
            }
        }
        Ok(QuantumChannel {
            dim_in: d_in,
            dim_out: d_out,
            choi,
            kraus: None,
            hermiticity_preserving_only: self.hermiticity_preserving_only
                || inner.hermiticity_preserving_only,
        })
    }

    /// Hermiticity-preserving difference self − other.
    pub fn difference(&self, other: &QuantumChannel) -> Result<QuantumChannel> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::DimensionMismatch("channel difference".into()));
        }
        Self::hermiticity_preserving(&self.choi - &other.choi, self.dim_in, self.dim_out)
    }

    /// E(|a⟩⟨b|), the (a, b) block of the Choi matrix.
    pub fn block(&self, a: usize, b: usize) -> ComplexMatrix {
        let d = self.dim_out;
        ComplexMatrix::from_fn(d, d, |i, k| self.choi[(a * d + i, b * d + k)])
    }
}

fn kraus_to_choi_impl(kraus: &[ComplexMatrix], dim_in: usize, dim_out: usize) -> ComplexMatrix {
    let n = dim_in * dim_out;
    let mut choi = ComplexMatrix::zeros(n, n);
    for k in kraus {
        // w[a·dim_out + i] = K[i, a]
        let w: Vec<C64> = (0..n)
            .map(|idx| k[(idx % dim_out, idx / dim_out)])
            .collect();
        for r in 0..n {
            for c in 0..n {
                choi[(r, c)] += w[r] * w[c].conj();
            }
        }
    }
    choi
}

/// Choi matrix of a Kraus set.
pub fn kraus_to_choi(kraus: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::InvalidChannel("empty Kraus list".into()))?;
    Ok(kraus_to_choi_impl(kraus, first.cols(), first.rows()))
}

/// Kraus operators from a Choi matrix via its eigendecomposition; the number
/// of operators equals the numerical rank.
pub fn choi_to_kraus(
    choi: &ComplexMatrix,
    dim_in: usize,
    dim_out: usize,
    tol: &Tolerances,
) -> Result<Vec<ComplexMatrix>> {
    let (vals, vecs) = hermitian_eig(choi, tol)?;
    if let Some(&min) = vals.last() {
        if min < -tol.choi.max(1e-7) {
            return Err(Error::NotPsd(min));
        }
    }
    let mut kraus = Vec::new();
    let scale = vals.first().copied().unwrap_or(0.0).abs().max(1.0);
    for (m, &lambda) in vals.iter().enumerate() {
        if lambda <= 1e-12 * scale {
            continue;
        }
        let s = lambda.sqrt();
        let k = ComplexMatrix::from_fn(dim_out, dim_in, |i, a| vecs[(a * dim_out + i, m)] * s);
        kraus.push(k);
    }
    if kraus.is_empty() {
        kraus.push(ComplexMatrix::zeros(dim_out, dim_in));
    }
    Ok(kraus)
}
