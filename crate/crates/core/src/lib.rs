//! Geometric measure of entanglement for small multipartite pure states.
//!
//! The maximal overlap `Lambda(psi) = max |<a_1 ... a_N|psi>|` over product
//! states (the injective tensor norm of the coefficient tensor) is computed
//! by alternating see-saw optimization, and `E(psi) = 1 - Lambda^2`.
//! Around that core the crate provides upper bounds (bipartite Schmidt
//! coefficients, a PPT relaxation), tensor eigenpair searches, a search for
//! maximally entangled states, two-qubit mixed-state formulas and Haar
//! sampling statistics.
//!
//! With the default `parallel` feature, restarts and samples run on rayon;
//! results are identical with the feature disabled.

pub mod eigen;
pub mod error;
pub mod geometric;
pub mod hermitian;
pub mod io;
pub mod mixed;
pub mod named;
pub mod par;
pub mod relax;
pub mod rng;
pub mod sampling;
pub mod schmidt;
pub mod search;
pub mod svd;
pub mod tensor;

pub use num_complex;

pub use error::{Error, Result};
pub use geometric::{
    geometric_measure, log_measure, max_overlap, seesaw, symmetric_power, w_rank_two_overlap,
    SeeSawConfig, SeeSawResult,
};
pub use named::NamedState;
pub use schmidt::{bipartite_bound, schmidt, SchmidtDecomposition};
pub use tensor::{sym_dim, Bipartition, ComplexTensor, ProductState, PureState, Shape};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
