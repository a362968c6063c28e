//! chancap-core: quantum-channel information toolkit.
//!
//! Computes entropic capacity functionals (coherent information, quantum
//! mutual information, Holevo information) by numerical optimization over
//! input states, checks the dephasing-register decomposition identity, and
//! evaluates resource-assisted capacity bounds into trade-off curves.

pub mod channels;
pub mod error;
pub mod information;
pub mod numerics;
pub mod optimize;
pub mod random;
pub mod tradeoff;

pub use channels::{DensityMatrix, PureState, QuantumChannel};
pub use error::{Error, Result};
pub use numerics::ComplexMatrix;
