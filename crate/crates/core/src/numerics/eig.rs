//! Hermitian eigendecomposition via cyclic Jacobi rotations.
//!
//! Deterministic and dependency-free; adequate for the dense, small-to-medium
//! matrices this toolkit works with.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::matrix::ComplexMatrix;

/// Max tolerated |m[i][j] - conj(m[j][i])| before a matrix is rejected.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Off-diagonal Frobenius norm (relative to max(1, ||A||_F)) at convergence.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
/// Sweep cap factor: at most 100 * dim sweeps.
const SWEEP_CAP_FACTOR: usize = 100;
/// Eigenvalues closer than this are treated as degenerate when ordering.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Full spectrum of a Hermitian matrix: eigenvalues sorted descending with
/// matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Column k is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// V diag(lambda) V^dagger.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let d = ComplexMatrix::from_diagonal(&self.eigenvalues);
        v.mul(&d).mul(&v.adjoint())
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must be Hermitian within [`HERMITICITY_TOL`]; it is symmetrized
/// before iteration so that the tolerated asymmetry cannot bias the result.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::dimension_mismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::NonHermitian {
            deviation: dev,
            tolerance: HERMITICITY_TOL,
        });
    }

    let n = m.rows();
    // Symmetrize: a <- (m + m^dagger)/2
    let mut a = m.add(&m.adjoint()).scale_real(0.5);
    let mut v = ComplexMatrix::identity(n);

    if n == 1 {
        return Ok(Spectrum {
            eigenvalues: vec![a.get(0, 0).re],
            eigenvectors: v,
        });
    }

    let threshold = OFF_DIAGONAL_TOL * f64::max(1.0, a.frobenius_norm());
    // Rotations on pivots far below threshold are skipped; the residual they
    // leave behind stays under threshold/10.
    let pivot_floor = threshold / (10.0 * n as f64);
    let max_sweeps = SWEEP_CAP_FACTOR * n;

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s += a.get(r, c).norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps >= max_sweeps {
            return Err(Error::NonConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;

        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= pivot_floor {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let phase = apq / r; // e^{i phi}

                // Real 2x2 rotation angle after phasing the pivot real.
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Unitary J: J[p][p] = c*phase, J[p][q] = s*phase,
                //            J[q][p] = -s,      J[q][q] = c.
                // Update A <- J^dagger A J, touching only rows/cols p and q.
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    let new_kp = akp * phase * c - akq * s;
                    let new_kq = akp * phase * s + akq * c;
                    a.set(k, p, new_kp);
                    a.set(k, q, new_kq);
                    a.set(p, k, new_kp.conj());
                    a.set(q, k, new_kq.conj());
                }
                let new_pp = app * c * c + aqq * s * s - 2.0 * r * c * s;
                let new_qq = app * s * s + aqq * c * c + 2.0 * r * c * s;
                a.set(p, p, Complex64::new(new_pp, 0.0));
                a.set(q, q, Complex64::new(new_qq, 0.0));
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));

                // Accumulate V <- V J.
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * phase * c - vkq * s);
                    v.set(k, q, vkp * phase * s + vkq * c);
                }
            }
        }
    }

    // Sort eigenpairs: descending eigenvalue, then lexicographic eigenvector
    // order inside degenerate groups so purification output is reproducible.
    let mut order: Vec<usize> = (0..n).collect();
    let evs: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| evs[j].partial_cmp(&evs[i]).expect("eigenvalues are finite"));

    let vec_lex_less = |i: usize, j: usize| -> bool {
        for k in 0..n {
            let a_ = v.get(k, i);
            let b_ = v.get(k, j);
            if a_.re != b_.re {
                return a_.re < b_.re;
            }
            if a_.im != b_.im {
                return a_.im < b_.im;
            }
        }
        false
    };
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (evs[order[end - 1]] - evs[order[end]]).abs() <= DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by(|&i, &j| {
                if vec_lex_less(i, j) {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            });
        }
        start = end;
    }

    let eigenvalues: Vec<f64> = order.iter().map(|&i| evs[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        for k in 0..n {
            eigenvectors.set(k, col, v.get(k, i));
        }
    }

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Hermitian square root of a positive semidefinite matrix; eigenvalues in
/// [-1e-9, 0] are clipped to zero before the root.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(m)?;
    let roots: Vec<f64> = spec
        .eigenvalues
        .iter()
        .map(|&l| if l > 0.0 { l.sqrt() } else { 0.0 })
        .collect();
    let v = &spec.eigenvectors;
    Ok(v.mul(&ComplexMatrix::from_diagonal(&roots)).mul(&v.adjoint()))
}
