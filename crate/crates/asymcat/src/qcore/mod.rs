//! Complex dense linear algebra and quantum state/channel representations
//! shared by every other module.

pub mod channel;
pub mod chi;
pub mod eig;
pub mod io;
pub mod matrix;
pub mod state;

pub use channel::{choi_to_kraus, kraus_to_choi, CptpReport, QuantumChannel};
pub use chi::{chi_to_choi, choi_to_chi, ChiConvention, ChiMatrix};
pub use eig::{hermitian_eig, min_eigenvalue, psd_project, trace_norm_hermitian};
pub use matrix::{partial_trace, pauli_x, pauli_y, pauli_z, tensor, ComplexMatrix, Keep, C64};
pub use state::{bloch_to_density, density_to_bloch, fidelity, BlochVector, DensityMatrix};
