//! Dense complex linear algebra and entropy primitives.

mod eig;
mod entropy;
mod matrix;

pub use eig::{hermitian_eig, psd_sqrt, Spectrum, DEGENERACY_TOL, HERMITICITY_TOL};
pub use entropy::{shannon_entropy, von_neumann_entropy, EIGENVALUE_FLOOR};
pub use matrix::{
    max_dim, partial_trace, tensor_product, tensor_vec, ComplexMatrix, DEFAULT_MAX_DIM,
};
