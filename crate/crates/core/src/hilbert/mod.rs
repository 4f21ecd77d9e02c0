//! Labeled finite-dimensional complex linear algebra.
//!
//! Operator-level tolerances use the Frobenius norm throughout. The spectral
//! norm is available where a caller needs it explicitly
//! ([`Operator::spectral_norm`], [`commutator_spectral_norm`]).

mod label;
mod operator;
mod projector;
mod space;
mod state;

pub use label::{BasisLabel, IntoLabel, SEPARATOR};
pub(crate) use operator::unitarity_residual;
pub use operator::{apply, Operator};
pub use projector::{
    commutator_norm, commutator_spectral_norm, lift_vectors, orthonormalize,
    projector_from_vectors, Projector,
};
pub use space::{DetectorTokens, Factor, HilbertSpace};
pub use state::{inner_product, superpose, StateVector};

/// Complex scalar used for every amplitude and matrix entry.
pub type C64 = num_complex::Complex64;

#[cfg(test)]
pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}
