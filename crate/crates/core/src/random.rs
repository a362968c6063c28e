//! Seeded generators for random states and channels, used by the randomized
//! verification suites and tests.

use num_complex::Complex64;
use rand::Rng;

use crate::channels::{DensityMatrix, QuantumChannel};
use crate::numerics::ComplexMatrix;

/// Standard normal via Box-Muller; keeps the dependency surface small and the
/// byte stream reproducible across platforms.
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng))
}

/// Complex Ginibre matrix with i.i.d. standard normal entries.
pub fn random_gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let entries = (0..rows * cols).map(|_| gaussian_complex(rng)).collect();
    ComplexMatrix::from_vec(rows, cols, entries).expect("sized by construction")
}

/// Random Hermitian matrix (G + G^dagger)/2.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_gaussian_matrix(dim, dim, rng);
    g.add(&g.adjoint()).scale_real(0.5)
}

/// Random full-rank density matrix G G^dagger / Tr.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = random_gaussian_matrix(dim, dim, rng);
    let p = g.mul(&g.adjoint());
    let tr = p.trace().re;
    DensityMatrix::new(p.scale_real(1.0 / tr)).expect("Gram matrix is a valid state")
}

/// Random unit vector in C^dim.
pub fn random_pure_vector(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.iter().map(|c| c / norm).collect();
        }
    }
}

/// Random channel with `kraus_count` Kraus operators, drawn by orthonormalizing
/// the columns of a Ginibre matrix into an isometry from C^{d_in} to
/// C^{kraus_count * d_out}; requires kraus_count * d_out >= d_in.
#[allow(clippy::needless_range_loop)]
pub fn random_channel(
    d_in: usize,
    d_out: usize,
    kraus_count: usize,
    rng: &mut impl Rng,
) -> QuantumChannel {
    assert!(
        kraus_count * d_out >= d_in,
        "isometry needs kraus_count * d_out >= d_in"
    );
    let stacked_rows = kraus_count * d_out;
    let g = random_gaussian_matrix(stacked_rows, d_in, rng);

    // Modified Gram-Schmidt, run twice for orthogonality near machine epsilon.
    let mut cols: Vec<Vec<Complex64>> = (0..d_in).map(|c| g.column(c)).collect();
    for _pass in 0..2 {
        for j in 0..d_in {
            for i in 0..j {
                let proj: Complex64 = cols[i]
                    .iter()
                    .zip(&cols[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for k in 0..stacked_rows {
                    let v = cols[j][k] - proj * cols[i][k];
                    cols[j][k] = v;
                }
            }
            let norm = cols[j].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!(norm > 1e-12, "Ginibre columns are independent a.s.");
            for k in 0..stacked_rows {
                cols[j][k] /= norm;
            }
        }
    }

    let kraus: Vec<ComplexMatrix> = (0..kraus_count)
        .map(|i| {
            let mut k = ComplexMatrix::zeros(d_out, d_in);
            for r in 0..d_out {
                for c in 0..d_in {
                    k.set(r, c, cols[c][i * d_out + r]);
                }
            }
            k
        })
        .collect();
    QuantumChannel::new(kraus, "random").expect("isometry blocks form a CPT family")
}
