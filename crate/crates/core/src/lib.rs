//! Construction, tensor-product extension and numerical certification of
//! bipartite entanglement witnesses, plus measurement-device-independent
//! evaluation of witnesses through joint click probabilities.
//!
//! Subsystems are always ordered `A', A, B, B'`. A [`SystemLayout`] records
//! the subsystem dimensions and the cut separating the two parties.

pub mod catalogue;
pub mod choi_demo;
mod error;
pub mod extension;
pub mod mdiew;
pub mod operator;
pub mod par;
pub mod sampling;
pub mod seed;
pub mod witness;

pub use error::{Error, Result};
pub use extension::ExtensionSpec;
pub use operator::{Eigh, HermitianOperator, ProductVector, SeparableEnsemble, SystemLayout};
pub use par::Execution;
pub use witness::{SeeSawOptions, SeeSawReport, Witness, ZeroSet};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Default tolerance for positivity checks on unit-normalized operators.
pub const PSD_TOL: f64 = 1e-9;
