//! Entropic functionals of (channel, state) pairs and the dephasing-register
//! decomposition identity as an executable check.

use crate::channels::{
    entropy_exchange, extend_with_dephasing, register_blocks, DensityMatrix, QuantumChannel,
};
use crate::error::{Error, Result};
use crate::numerics::{shannon_entropy, von_neumann_entropy};

/// Weight below which a conditional state is treated as absent: it is replaced
/// by the maximally mixed state and excluded from convex sums.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Coherent information S(M(rho)) - S_exchange(M, rho) in base-`base_dim`
/// dits.
pub fn coherent_information(
    ch: &QuantumChannel,
    rho: &DensityMatrix,
    base_dim: usize,
) -> Result<f64> {
    let output_entropy = ch.apply(rho)?.entropy(base_dim)?;
    let exchange = entropy_exchange(ch, rho, base_dim)?;
    Ok(output_entropy - exchange)
}

/// Quantum mutual information S(rho) + S(M(rho)) - S_exchange(M, rho).
pub fn quantum_mutual_information(
    ch: &QuantumChannel,
    rho: &DensityMatrix,
    base_dim: usize,
) -> Result<f64> {
    let input_entropy = rho.entropy(base_dim)?;
    Ok(input_entropy + coherent_information(ch, rho, base_dim)?)
}

/// Holevo information chi = S(sum p_i M(rho_i)) - sum p_i S(M(rho_i)).
pub fn holevo_information(
    ch: &QuantumChannel,
    ensemble: &[(f64, DensityMatrix)],
    base_dim: usize,
) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(Error::InvalidDistribution {
            context: "empty ensemble".into(),
        });
    }
    let probs: Vec<f64> = ensemble.iter().map(|(p, _)| *p).collect();
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || probs.iter().any(|&p| p < -1e-12) {
        return Err(Error::InvalidDistribution {
            context: format!("ensemble probabilities sum to {sum}"),
        });
    }

    let outputs: Vec<DensityMatrix> = ensemble
        .iter()
        .map(|(_, rho)| ch.apply(rho))
        .collect::<Result<_>>()?;

    let mut average = crate::numerics::ComplexMatrix::zeros(ch.d_out(), ch.d_out());
    for (p, out) in probs.iter().zip(&outputs) {
        if *p > 0.0 {
            average = average.add(&out.matrix().scale_real(*p));
        }
    }
    let avg_entropy = von_neumann_entropy(&average, base_dim)?;
    let mut member_term = 0.0;
    for (p, out) in probs.iter().zip(&outputs) {
        if *p > WEIGHT_FLOOR {
            member_term += p * out.entropy(base_dim)?;
        }
    }
    Ok(avg_entropy - member_term)
}

/// Convex decomposition of a state over the dephasing-register basis:
/// weights lambda_w and conditional system states rho_w.
#[derive(Debug, Clone)]
pub struct DephasedDecomposition {
    pub weights: Vec<f64>,
    pub conditional_states: Vec<DensityMatrix>,
}

/// Projects a state of (H_d (x) H_Delta)^(x n) onto the register basis:
/// lambda_w rho_w = <w|R|w>. Zero-weight blocks are replaced by the maximally
/// mixed state.
pub fn project_dephased(
    r: &DensityMatrix,
    system_dims: (usize, usize),
    n: usize,
) -> Result<DephasedDecomposition> {
    let (d, delta) = system_dims;
    let blocks = register_blocks(r.matrix(), d, delta, n)?;
    let sys_dim = d.pow(n as u32);

    let mut weights = Vec::with_capacity(blocks.len());
    let mut conditional_states = Vec::with_capacity(blocks.len());
    for (weight, block) in blocks {
        if weight > WEIGHT_FLOOR {
            let state = DensityMatrix::new(block.scale_real(1.0 / weight))?;
            weights.push(weight);
            conditional_states.push(state);
        } else {
            weights.push(weight.max(0.0));
            conditional_states.push(DensityMatrix::maximally_mixed(sys_dim));
        }
    }
    Ok(DephasedDecomposition {
        weights,
        conditional_states,
    })
}

/// Result of the decomposition identity check: the coherent information of the
/// register-extended channel computed on two independent routes.
#[derive(Debug, Clone, Copy)]
pub struct DecompositionCheck {
    /// Coherent information of the extended channel at R.
    pub lhs: f64,
    /// Convex combination sum_w lambda_w I_c(M^n, rho_w).
    pub rhs: f64,
    /// |lhs - rhs|.
    pub residual: f64,
    /// Residual of the intermediate entropy split
    /// S(Mbar^n(R)) = H(lambda) + sum_w lambda_w S(M^n(rho_w)).
    pub entropy_split_residual: f64,
}

/// Checks that the coherent information of the register-extended channel at R
/// equals the weighted coherent information of the base channel over the
/// dephased decomposition, and that the output entropy splits accordingly.
pub fn decomposition_identity_check(
    m: &QuantumChannel,
    delta: usize,
    r: &DensityMatrix,
    n: usize,
    base_dim: usize,
) -> Result<DecompositionCheck> {
    if m.d_in() != m.d_out() {
        return Err(Error::dimension_mismatch(
            "register extension needs d_in = d_out",
        ));
    }
    let mbar = extend_with_dephasing(m, delta)?;
    let mbar_n = mbar.tensor_power(n)?;
    let lhs = coherent_information(&mbar_n, r, base_dim)?;

    let m_n = m.tensor_power(n)?;
    let decomp = project_dephased(r, (m.d_in(), delta), n)?;

    let mut rhs = 0.0;
    let mut conditional_output_entropy = 0.0;
    for (w, rho_w) in decomp.weights.iter().zip(&decomp.conditional_states) {
        if *w <= WEIGHT_FLOOR {
            continue;
        }
        rhs += w * coherent_information(&m_n, rho_w, base_dim)?;
        conditional_output_entropy += w * m_n.apply(rho_w)?.entropy(base_dim)?;
    }

    let weight_entropy = shannon_entropy(&decomp.weights, base_dim)?;
    let joint_output_entropy = mbar_n.apply(r)?.entropy(base_dim)?;
    let entropy_split_residual =
        (joint_output_entropy - weight_entropy - conditional_output_entropy).abs();

    Ok(DecompositionCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        entropy_split_residual,
    })
}
