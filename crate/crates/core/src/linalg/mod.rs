//! Dense numerical kernels: LU solves, a symmetric eigensolver
//! (Householder tridiagonalization + implicit QL), a Francis double-shift
//! QR for general real eigenvalues, and power/inverse iteration.
//!
//! These are the classic EISPACK-family routines, specialized to `f64` and
//! to the moderate sizes this crate targets (n up to a couple thousand).

mod hqr;
mod iterate;
mod lu;
mod sym;

pub use hqr::general_eigenvalues;
pub use iterate::{inverse_iteration, power_iteration, PowerOutcome};
pub use lu::{solve, LuFactors};
pub use sym::{symmetric_eigen, SymmetricEigen};
