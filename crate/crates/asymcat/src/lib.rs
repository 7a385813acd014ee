//! Numerical toolkit for catalytic amplification of asymmetry.
//!
//! A qubit's asymmetry (coherence between energy eigenstates, measured by the
//! generalized robustness) cannot grow under translationally invariant
//! operations (TIO), but it can grow when a TIO acts jointly on the system and
//! a catalyst whose marginal is returned unchanged. This crate finds such
//! channels, quantifies how experimental noise erodes the effect, and
//! simulates the photon-counting experiment end to end:
//!
//! - [`qcore`]: dense complex linear algebra, density matrices, quantum
//!   channels in Kraus / Choi / process-matrix form.
//! - [`conic`]: a small dense SDP solver (ADMM over Hermitian PSD cones) plus
//!   the robustness-of-asymmetry and diamond-norm programs.
//! - [`tio`]: Bohr-frequency masks, TIO membership and projection, qubit
//!   reachability conditions.
//! - [`catalysis`]: the optimal-channel SDP for fixed states, the bi-level
//!   state search, and state-space scans.
//! - [`noise`]: subspace Pauli noise models, deviation-from-TIO error bounds,
//!   catalyst-correction region scans and noise thresholds.
//! - [`tomo`]: simulated state/process tomography with Poisson counting
//!   statistics and Monte-Carlo error bars.
//! - [`optics`]: a path-polarization interferometer simulator and the
//!   Kraus-to-waveplate angle solver.
//! - [`protocols`]: the reference protocol data (states, Kraus operators,
//!   measured process matrix ingestion points).
//!
//! With the default `parallel` feature, embarrassingly parallel workloads
//! (scans, multi-starts, Monte-Carlo runs) fan out over rayon; disabling the
//! feature gives a sequential build with identical results.

pub mod catalysis;
pub mod conic;
mod errors;
pub mod noise;
pub mod optics;
pub mod par;
pub mod protocols;
pub mod qcore;
pub mod tio;
pub mod tol;
pub mod tomo;

pub use errors::{Error, Result};
