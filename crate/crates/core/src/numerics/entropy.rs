//! Entropy primitives. All entropies are reported in base-`d` dits; the
//! internal computation uses natural logarithms with a single final rescale.

use crate::error::{Error, Result};
use crate::numerics::eig::hermitian_eig;
use crate::numerics::matrix::ComplexMatrix;

/// Eigenvalues in [-EIGENVALUE_FLOOR, 0] are clipped to zero before the
/// logarithm; anything more negative is an error.
pub const EIGENVALUE_FLOOR: f64 = 1e-9;
/// Probabilities down to -1e-12 are clipped to zero.
const PROB_FLOOR: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-9;

fn base_log(base_dim: usize) -> Result<f64> {
    if base_dim < 2 {
        return Err(Error::InvalidDistribution {
            context: format!("entropy base must be >= 2, got {base_dim}"),
        });
    }
    Ok((base_dim as f64).ln())
}

/// -sum lambda ln(lambda) / ln(d) over eigenvalues that are already known to
/// be a distribution up to clip-level noise.
fn entropy_of_clipped(values: &[f64], log_base: f64) -> f64 {
    let mut s = 0.0;
    for &l in values {
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    (s / log_base).max(0.0)
}

/// Shannon entropy H(p) in base-`base_dim` dits. Entries may carry clip-level
/// negative noise; the sum must be within 1e-9 of one.
pub fn shannon_entropy(probs: &[f64], base_dim: usize) -> Result<f64> {
    let log_base = base_log(base_dim)?;
    let mut clipped = Vec::with_capacity(probs.len());
    for &p in probs {
        if p < -PROB_FLOOR {
            return Err(Error::InvalidDistribution {
                context: format!("negative probability {p:.3e}"),
            });
        }
        clipped.push(p.max(0.0));
    }
    let sum: f64 = clipped.iter().sum();
    if (sum - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidDistribution {
            context: format!("probabilities sum to {sum}, expected 1"),
        });
    }
    Ok(entropy_of_clipped(&clipped, log_base))
}

/// Von Neumann entropy S(rho) = -Tr[rho log_d rho] of a Hermitian unit-trace
/// matrix, in base-`base_dim` dits.
pub fn von_neumann_entropy(rho: &ComplexMatrix, base_dim: usize) -> Result<f64> {
    let log_base = base_log(base_dim)?;
    if !rho.is_square() {
        return Err(Error::dimension_mismatch("entropy of a non-square matrix"));
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
        return Err(Error::invalid_state(format!(
            "trace {:.12} deviates from 1",
            trace.re
        )));
    }
    let spec = hermitian_eig(rho)?;
    entropy_from_eigenvalues(&spec.eigenvalues, log_base)
}

fn entropy_from_eigenvalues(eigenvalues: &[f64], log_base: f64) -> Result<f64> {
    let mut clipped = Vec::with_capacity(eigenvalues.len());
    for &l in eigenvalues {
        if l < -EIGENVALUE_FLOOR {
            return Err(Error::invalid_state(format!(
                "eigenvalue {l:.3e} below -{EIGENVALUE_FLOOR:.0e}"
            )));
        }
        clipped.push(l.max(0.0));
    }
    Ok(entropy_of_clipped(&clipped, log_base))
}
