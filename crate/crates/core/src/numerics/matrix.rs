//! Dense complex matrices in row-major order.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on any matrix dimension produced by tensor products.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Dimension cap for tensor constructions. Overridable through the
/// `CHANCAP_MAX_DIM` environment variable (read once per process).
pub fn max_dim() -> usize {
    static CAP: std::sync::OnceLock<usize> = std::sync::OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("CHANCAP_MAX_DIM")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&v| v >= 1)
            .unwrap_or(DEFAULT_MAX_DIM)
    })
}

/// Dense complex matrix, entries stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from a row-major entry vector. Length must equal rows*cols.
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::dimension_mismatch(format!(
                "expected {}x{} = {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Square diagonal matrix from real diagonal entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        m
    }

    /// Rank-one projector |v><v| (v need not be normalized).
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, v[i] * v[j].conj());
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Largest |m[i][j] - conj(m[j][i])| over all entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        dev
    }

    /// Frobenius inner product <self, other> = Tr[self^dagger other].
    pub fn frobenius_inner(&self, other: &Self) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Returns column `c` as a vector.
    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }
}

/// Kronecker product a (x) b. Fails when either output dimension exceeds the
/// configured cap (checked before allocation).
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let cap = max_dim();
    let rows = a
        .rows()
        .checked_mul(b.rows())
        .filter(|&r| r <= cap)
        .ok_or(Error::DimensionOverflow {
            dim: a.rows().saturating_mul(b.rows()),
            cap,
        })?;
    let cols = a
        .cols()
        .checked_mul(b.cols())
        .filter(|&c| c <= cap)
        .ok_or(Error::DimensionOverflow {
            dim: a.cols().saturating_mul(b.cols()),
            cap,
        })?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows() {
        for ac in 0..a.cols() {
            let av = a.get(ar, ac);
            if av.norm_sqr() == 0.0 {
                continue;
            }
            for br in 0..b.rows() {
                for bc in 0..b.cols() {
                    out.set(ar * b.rows() + br, ac * b.cols() + bc, av * b.get(br, bc));
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a sequence of vectors.
pub fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// Partial trace of a square matrix over the factors NOT listed in `keep`.
///
/// `dims` lists the tensor-factor dimensions whose product must equal the
/// matrix dimension; `keep` holds the (strictly increasing) indices of the
/// factors retained in the output.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::dimension_mismatch("partial_trace needs a square matrix"));
    }
    let total: usize = dims.iter().product();
    if total != m.rows() {
        return Err(Error::dimension_mismatch(format!(
            "factor dims {:?} give {}, matrix is {}x{}",
            dims,
            total,
            m.rows(),
            m.cols()
        )));
    }
    if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::dimension_mismatch(
            "keep set must be nonempty and strictly increasing",
        ));
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::dimension_mismatch("keep index out of range"));
    }

    let kept_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let traced_dim: usize = traced.iter().map(|&t| dims[t]).product();

    let flat_of = |digits: &[usize]| -> usize {
        let mut flat = 0usize;
        for (i, &d) in digits.iter().enumerate() {
            flat = flat * dims[i] + d;
        }
        flat
    };

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    // enumerate kept row/col indices and sum over shared traced digits
    let kept_digits = |mut idx: usize| -> Vec<usize> {
        let mut out = vec![0usize; keep.len()];
        for i in (0..keep.len()).rev() {
            out[i] = idx % dims[keep[i]];
            idx /= dims[keep[i]];
        }
        out
    };
    let traced_digits = |mut idx: usize| -> Vec<usize> {
        let mut out = vec![0usize; traced.len()];
        for i in (0..traced.len()).rev() {
            out[i] = idx % dims[traced[i]];
            idx /= dims[traced[i]];
        }
        out
    };

    let mut row_digits = vec![0usize; dims.len()];
    let mut col_digits = vec![0usize; dims.len()];
    for kr in 0..kept_dim {
        let krd = kept_digits(kr);
        for kc in 0..kept_dim {
            let kcd = kept_digits(kc);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..traced_dim {
                let td = traced_digits(t);
                for (pos, &f) in keep.iter().enumerate() {
                    row_digits[f] = krd[pos];
                    col_digits[f] = kcd[pos];
                }
                for (pos, &f) in traced.iter().enumerate() {
                    row_digits[f] = td[pos];
                    col_digits[f] = td[pos];
                }
                acc += m.get(flat_of(&row_digits), flat_of(&col_digits));
            }
            out.set(kr, kc, acc);
        }
    }
    Ok(out)
}
