//! Centralized numerical tolerances.
//!
//! Every validation threshold used across the crate lives here, so a tool
//! ingesting measured (rather than synthetic) data can relax them in one
//! place.

/// Tolerance bundle shared by state, channel and mask validation.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Hermiticity deviation allowed in a density matrix.
    pub hermitian: f64,
    /// Deviation of the trace from one allowed in a density matrix.
    pub trace: f64,
    /// Most negative eigenvalue allowed in a nominally PSD matrix.
    pub psd: f64,
    /// PSD / trace-preservation slack for a CPTP Choi matrix.
    pub choi: f64,
    /// Agreement required between channel representations (Kraus/Choi/chi).
    pub representation: f64,
    /// Hermiticity deviation allowed in a measured process matrix.
    pub chi_hermitian: f64,
    /// Bohr-frequency match tolerance when building TIO masks.
    pub mask: f64,
    /// Hermiticity deviation beyond which eigendecomposition refuses to
    /// symmetrize its input.
    pub eig_symmetrize: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            trace: 1e-10,
            psd: 1e-9,
            choi: 1e-9,
            representation: 1e-10,
            chi_hermitian: 1e-6,
            mask: 1e-12,
            eig_symmetrize: 1e-6,
        }
    }
}

impl Tolerances {
    /// Defaults loosened for matrices reconstructed from measured counts.
    pub fn measured() -> Self {
        Self {
            hermitian: 1e-6,
            trace: 1e-4,
            psd: 1e-6,
            choi: 1e-4,
            ..Self::default()
        }
    }

    /// Defaults for states traced back to published values printed at four
    /// decimals: such pure states overshoot the unit Bloch ball by a few
    /// 1e-5, and channel outputs inherit the same sliver of negativity.
    pub fn printed() -> Self {
        Self {
            hermitian: 1e-8,
            trace: 1e-6,
            psd: 1e-4,
            choi: 1e-4,
            ..Self::default()
        }
    }
}
