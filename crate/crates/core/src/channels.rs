//! CPT maps as Kraus families: construction, validation, composition, tensor
//! powers, dephasing registers, purification and entropy exchange.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, max_dim, tensor_product, von_neumann_entropy, ComplexMatrix};

/// Max abs entry deviation tolerated in the CPT condition sum K^dagger K = I.
pub const CPT_TOL: f64 = 1e-9;
/// Hermiticity tolerance for density matrices.
pub const STATE_HERMITICITY_TOL: f64 = 1e-10;
/// Trace tolerance for density matrices.
pub const STATE_TRACE_TOL: f64 = 1e-9;
/// Most negative admissible eigenvalue of a density matrix.
pub const STATE_EIGENVALUE_TOL: f64 = 1e-9;
/// Unit-norm tolerance for pure states.
pub const PURE_NORM_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// Hermitian, positive-semidefinite, unit-trace complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dim: usize,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::invalid_state("density matrix must be square"));
        }
        let dev = mat.hermiticity_deviation();
        if dev > STATE_HERMITICITY_TOL {
            return Err(Error::invalid_state(format!(
                "hermiticity deviation {dev:.3e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TRACE_TOL || tr.im.abs() > STATE_TRACE_TOL {
            return Err(Error::invalid_state(format!(
                "trace {:.12} deviates from 1",
                tr.re
            )));
        }
        let spec = hermitian_eig(&mat)?;
        let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -STATE_EIGENVALUE_TOL {
            return Err(Error::invalid_state(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        let dim = mat.rows();
        Ok(Self { mat, dim })
    }

    /// Positivity holds by construction for callers that build Gram matrices;
    /// hermiticity and trace are still asserted in debug builds.
    pub(crate) fn from_gram_normalized(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.hermiticity_deviation() <= STATE_HERMITICITY_TOL);
        debug_assert!((mat.trace().re - 1.0).abs() <= STATE_TRACE_TOL);
        let dim = mat.rows();
        Self { mat, dim }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
            dim,
        }
    }

    /// |v><v| for a (not necessarily normalized) nonzero vector.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq < 1e-24 {
            return Err(Error::invalid_state("zero vector for pure state"));
        }
        let normed: Vec<Complex64> = v.iter().map(|c| c / norm_sq.sqrt()).collect();
        Ok(Self {
            mat: ComplexMatrix::outer(&normed),
            dim: v.len(),
        })
    }

    /// Computational basis state |k><k|.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[k] = Complex64::new(1.0, 0.0);
        Self::pure(&v).expect("basis vector is unit")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entropy(&self, base_dim: usize) -> Result<f64> {
        von_neumann_entropy(&self.mat, base_dim)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let spec = hermitian_eig(&self.mat)?;
        Ok(spec.eigenvalues.last().copied().unwrap_or(0.0))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let mat = tensor_product(&self.mat, &other.mat)?;
        Ok(DensityMatrix::from_gram_normalized(mat))
    }
}

/// Pure state vector over an explicit tensor-factor layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vec: Vec<Complex64>,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(vec: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != vec.len() || dims.is_empty() {
            return Err(Error::dimension_mismatch(format!(
                "factor dims {:?} do not match vector length {}",
                dims,
                vec.len()
            )));
        }
        let norm = vec.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::invalid_state(format!("norm {norm} deviates from 1")));
        }
        Ok(Self { vec, dims })
    }

    pub fn vec(&self) -> &[Complex64] {
        &self.vec
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vec)
    }
}

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

/// CPT map represented by a Kraus family of d_out x d_in operators.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    kraus: Vec<ComplexMatrix>,
    d_in: usize,
    d_out: usize,
    label: String,
}

impl QuantumChannel {
    /// Validates the family and the CPT condition sum K^dagger K = I.
    pub fn new(kraus: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::malformed("channel needs at least one Kraus operator"))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        if kraus
            .iter()
            .any(|k| k.rows() != d_out || k.cols() != d_in)
        {
            return Err(Error::dimension_mismatch(
                "all Kraus operators must share dimensions",
            ));
        }
        let mut sum = ComplexMatrix::zeros(d_in, d_in);
        for k in &kraus {
            sum = sum.add(&k.adjoint().mul(k));
        }
        let dev = sum.sub(&ComplexMatrix::identity(d_in)).max_abs_entry();
        if dev > CPT_TOL {
            return Err(Error::NotTracePreserving { deviation: dev });
        }
        Ok(Self {
            kraus,
            d_in,
            d_out,
            label: label.into(),
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::new(vec![ComplexMatrix::identity(d)], "identity").expect("identity is CPT")
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Kraus sum on an arbitrary matrix (no state validation).
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out = out.add(&k.mul(m).mul(&k.adjoint()));
        }
        out
    }

    /// Channel action on a density matrix; the output state invariants are
    /// re-checked.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.d_in {
            return Err(Error::dimension_mismatch(format!(
                "channel expects dimension {}, state has {}",
                self.d_in,
                rho.dim()
            )));
        }
        DensityMatrix::new(self.apply_matrix(rho.matrix()))
    }

    /// Tensor product channel with Kraus family {A_i (x) B_j}.
    pub fn tensor(a: &QuantumChannel, b: &QuantumChannel) -> Result<QuantumChannel> {
        let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
        for ka in &a.kraus {
            for kb in &b.kraus {
                kraus.push(tensor_product(ka, kb)?);
            }
        }
        QuantumChannel::new(kraus, format!("{}(x){}", a.label, b.label))
    }

    /// n-fold tensor power; dimensions are checked against the cap before any
    /// Kraus matrices are materialized.
    pub fn tensor_power(&self, n: usize) -> Result<QuantumChannel> {
        if n == 0 {
            return Err(Error::malformed("tensor power needs n >= 1"));
        }
        let cap = max_dim();
        let mut din = 1usize;
        let mut dout = 1usize;
        for _ in 0..n {
            din = din
                .checked_mul(self.d_in)
                .filter(|&d| d <= cap)
                .ok_or(Error::DimensionOverflow {
                    dim: din.saturating_mul(self.d_in),
                    cap,
                })?;
            dout = dout
                .checked_mul(self.d_out)
                .filter(|&d| d <= cap)
                .ok_or(Error::DimensionOverflow {
                    dim: dout.saturating_mul(self.d_out),
                    cap,
                })?;
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = QuantumChannel::tensor(&out, self)?;
        }
        out.label = format!("{}^{}", self.label, n);
        Ok(out)
    }
}

/// Complete decoherence in the computational basis of a Delta-dimensional
/// register: Kraus family {|w><w|}.
pub fn complete_dephasing(delta: usize) -> Result<QuantumChannel> {
    if delta < 2 {
        return Err(Error::UnsupportedDimension {
            family: "complete_dephasing".into(),
            dim: delta,
        });
    }
    let kraus = (0..delta)
        .map(|w| {
            let mut k = ComplexMatrix::zeros(delta, delta);
            k.set(w, w, Complex64::new(1.0, 0.0));
            k
        })
        .collect();
    QuantumChannel::new(kraus, format!("dephasing_register({delta})"))
}

/// Extends a channel with a fully dephasing register:
/// the map rho (x) sigma -> M(rho) (x) diag(sigma).
pub fn extend_with_dephasing(m: &QuantumChannel, delta: usize) -> Result<QuantumChannel> {
    let t = complete_dephasing(delta)?;
    let mut out = QuantumChannel::tensor(m, &t)?;
    out.label = format!("{}+register({})", m.label, delta);
    Ok(out)
}

/// Canonical purification sum_i sqrt(lambda_i) |v_i> (x) |i> with eigenpairs in
/// the deterministic descending order of [`hermitian_eig`]. The ancilla
/// dimension equals dim(rho).
pub fn purify(rho: &DensityMatrix) -> Result<PureState> {
    let spec = hermitian_eig(rho.matrix())?;
    let d = rho.dim();
    let mut vec = vec![Complex64::new(0.0, 0.0); d * d];
    for (i, &l) in spec.eigenvalues.iter().enumerate() {
        if l <= 0.0 {
            continue;
        }
        let w = l.sqrt();
        for a in 0..d {
            // |v_i> (x) |i| component: index a*d + i
            vec[a * d + i] += spec.eigenvectors.get(a, i) * w;
        }
    }
    let norm = vec.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(Error::invalid_state("cannot purify a zero state"));
    }
    for c in &mut vec {
        *c /= norm;
    }
    PureState::new(vec, vec![d, d])
}

/// Exchange matrix W with W[i][j] = Tr[K_i rho K_j^dagger]; Hermitian, PSD,
/// unit trace for a valid input state.
pub fn exchange_matrix(ch: &QuantumChannel, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    if rho.dim() != ch.d_in() {
        return Err(Error::dimension_mismatch(format!(
            "channel expects dimension {}, state has {}",
            ch.d_in(),
            rho.dim()
        )));
    }
    let k = ch.kraus().len();
    let products: Vec<ComplexMatrix> = ch.kraus().iter().map(|ki| ki.mul(rho.matrix())).collect();
    let mut w = ComplexMatrix::zeros(k, k);
    for (i, prod) in products.iter().enumerate() {
        for j in 0..k {
            // Tr[K_i rho K_j^dagger] = <K_j, K_i rho>_F
            w.set(i, j, ch.kraus()[j].frobenius_inner(prod));
        }
    }
    Ok(w)
}

/// Entropy exchange computed from the exchange matrix W.
pub fn entropy_exchange(ch: &QuantumChannel, rho: &DensityMatrix, base_dim: usize) -> Result<f64> {
    von_neumann_entropy(&exchange_matrix(ch, rho)?, base_dim)
}

/// Entropy exchange computed through the purification route
/// S((M (x) 1_anc)(Phi_rho)); agrees with [`entropy_exchange`] within 1e-8 and
/// serves as its independent cross-check.
pub fn entropy_exchange_via_purification(
    ch: &QuantumChannel,
    rho: &DensityMatrix,
    base_dim: usize,
) -> Result<f64> {
    if rho.dim() != ch.d_in() {
        return Err(Error::dimension_mismatch(format!(
            "channel expects dimension {}, state has {}",
            ch.d_in(),
            rho.dim()
        )));
    }
    let phi = purify(rho)?;
    let extended = QuantumChannel::tensor(ch, &QuantumChannel::identity(rho.dim()))?;
    let out = extended.apply_matrix(&phi.projector());
    von_neumann_entropy(&out, base_dim)
}

/// True when the two channels act identically on the matrix-unit basis within
/// `tol` (Kraus freedom makes syntactic comparison meaningless).
pub fn maps_equal(a: &QuantumChannel, b: &QuantumChannel, tol: f64) -> bool {
    if a.d_in() != b.d_in() || a.d_out() != b.d_out() {
        return false;
    }
    let d = a.d_in();
    for r in 0..d {
        for c in 0..d {
            let mut unit = ComplexMatrix::zeros(d, d);
            unit.set(r, c, Complex64::new(1.0, 0.0));
            let diff = a.apply_matrix(&unit).sub(&b.apply_matrix(&unit));
            if diff.max_abs_entry() > tol {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Standard channels
// ---------------------------------------------------------------------------

/// Named channel families. Probabilities are in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StandardChannel {
    Identity,
    Dephasing(f64),
    Depolarizing(f64),
    Erasure(f64),
    AmplitudeDamping(f64),
}

impl StandardChannel {
    pub fn parse(name: &str, prob: Option<f64>) -> Result<Self> {
        let p = prob.unwrap_or(0.0);
        match name {
            "identity" => Ok(Self::Identity),
            "dephasing" => Ok(Self::Dephasing(p)),
            "depolarizing" => Ok(Self::Depolarizing(p)),
            "erasure" => Ok(Self::Erasure(p)),
            "amplitude_damping" => Ok(Self::AmplitudeDamping(p)),
            other => Err(Error::malformed(format!("unknown channel family '{other}'"))),
        }
    }
}

fn check_prob(p: f64, family: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::malformed(format!(
            "{family} probability {p} outside [0, 1]"
        )));
    }
    Ok(())
}

fn require_qubit(d: usize, family: &str) -> Result<()> {
    if d != 2 {
        return Err(Error::UnsupportedDimension {
            family: family.into(),
            dim: d,
        });
    }
    Ok(())
}

/// Builds one of the named Kraus families on a d-dimensional input space.
/// The erasure family enlarges the output to d+1 (flag state); capacities are
/// still reported in base-d dits.
pub fn standard_channel(kind: StandardChannel, d: usize) -> Result<QuantumChannel> {
    if d < 2 {
        return Err(Error::UnsupportedDimension {
            family: "standard_channel".into(),
            dim: d,
        });
    }
    let one = Complex64::new(1.0, 0.0);
    match kind {
        StandardChannel::Identity => {
            let mut ch = QuantumChannel::identity(d);
            ch.label = "identity".into();
            Ok(ch)
        }
        StandardChannel::Dephasing(p) => {
            check_prob(p, "dephasing")?;
            require_qubit(d, "dephasing")?;
            let k0 = ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt());
            let mut z = ComplexMatrix::from_diagonal(&[1.0, -1.0]);
            z = z.scale_real(p.sqrt());
            QuantumChannel::new(vec![k0, z], format!("dephasing({p})"))
        }
        StandardChannel::Depolarizing(p) => {
            check_prob(p, "depolarizing")?;
            require_qubit(d, "depolarizing")?;
            let mut x = ComplexMatrix::zeros(2, 2);
            x.set(0, 1, one);
            x.set(1, 0, one);
            let mut y = ComplexMatrix::zeros(2, 2);
            y.set(0, 1, Complex64::new(0.0, -1.0));
            y.set(1, 0, Complex64::new(0.0, 1.0));
            let z = ComplexMatrix::from_diagonal(&[1.0, -1.0]);
            let kraus = vec![
                ComplexMatrix::identity(2).scale_real((1.0 - 0.75 * p).sqrt()),
                x.scale_real((p / 4.0).sqrt()),
                y.scale_real((p / 4.0).sqrt()),
                z.scale_real((p / 4.0).sqrt()),
            ];
            QuantumChannel::new(kraus, format!("depolarizing({p})"))
        }
        StandardChannel::Erasure(p) => {
            check_prob(p, "erasure")?;
            // K0 keeps the input (scaled), K_i flag it into |e> = |d>.
            let mut k0 = ComplexMatrix::zeros(d + 1, d);
            for i in 0..d {
                k0.set(i, i, one * (1.0 - p).sqrt());
            }
            let mut kraus = vec![k0];
            for i in 0..d {
                let mut k = ComplexMatrix::zeros(d + 1, d);
                k.set(d, i, one * p.sqrt());
                kraus.push(k);
            }
            QuantumChannel::new(kraus, format!("erasure({p})"))
        }
        StandardChannel::AmplitudeDamping(g) => {
            check_prob(g, "amplitude_damping")?;
            require_qubit(d, "amplitude_damping")?;
            let k0 = ComplexMatrix::from_diagonal(&[1.0, (1.0 - g).sqrt()]);
            let mut k1 = ComplexMatrix::zeros(2, 2);
            k1.set(0, 1, one * g.sqrt());
            QuantumChannel::new(vec![k0, k1], format!("amplitude_damping({g})"))
        }
    }
}

// ---------------------------------------------------------------------------
// JSON interface
// ---------------------------------------------------------------------------

/// On-disk channel description. Either an explicit Kraus family or a named
/// standard family with parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_in: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_out: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Map<String, serde_json::Value>>,
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| {
                    let v = m.get(r, c);
                    [v.re, v.im]
                })
                .collect()
        })
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let r = rows.len();
    let c = rows
        .first()
        .map(|row| row.len())
        .ok_or_else(|| Error::malformed("empty matrix"))?;
    if rows.iter().any(|row| row.len() != c) || c == 0 {
        return Err(Error::malformed("ragged matrix rows"));
    }
    let mut entries = Vec::with_capacity(r * c);
    for row in rows {
        for &[re, im] in row {
            entries.push(Complex64::new(re, im));
        }
    }
    ComplexMatrix::from_vec(r, c, entries)
}

pub fn channel_to_json(ch: &QuantumChannel) -> ChannelJson {
    ChannelJson {
        d_in: Some(ch.d_in()),
        d_out: Some(ch.d_out()),
        kraus: Some(ch.kraus().iter().map(matrix_to_rows).collect()),
        name: Some(ch.label().to_string()),
        params: None,
    }
}

pub fn channel_from_json(json: &ChannelJson) -> Result<QuantumChannel> {
    if let Some(kraus_rows) = &json.kraus {
        let kraus = kraus_rows
            .iter()
            .map(|m| matrix_from_rows(m))
            .collect::<Result<Vec<_>>>()?;
        let first = kraus
            .first()
            .ok_or_else(|| Error::malformed("empty Kraus list"))?;
        if let Some(d_in) = json.d_in {
            if d_in != first.cols() {
                return Err(Error::malformed(format!(
                    "declared d_in {} does not match Kraus columns {}",
                    d_in,
                    first.cols()
                )));
            }
        }
        if let Some(d_out) = json.d_out {
            if d_out != first.rows() {
                return Err(Error::malformed(format!(
                    "declared d_out {} does not match Kraus rows {}",
                    d_out,
                    first.rows()
                )));
            }
        }
        let label = json.name.clone().unwrap_or_else(|| "custom".into());
        QuantumChannel::new(kraus, label)
    } else if let Some(name) = &json.name {
        let params = json.params.clone().unwrap_or_default();
        let prob = params.get("prob").and_then(|v| v.as_f64());
        let d = params
            .get("d")
            .and_then(|v| v.as_u64())
            .map(|v| v as usize)
            .or(json.d_in)
            .unwrap_or(2);
        standard_channel(StandardChannel::parse(name, prob)?, d)
    } else {
        Err(Error::malformed(
            "channel JSON needs either a kraus list or a name",
        ))
    }
}

/// Serializes a density matrix in the same nested [re, im] row format used for
/// Kraus operators.
pub fn state_to_rows(rho: &DensityMatrix) -> Vec<Vec<[f64; 2]>> {
    matrix_to_rows(rho.matrix())
}

// ---------------------------------------------------------------------------

/// Dephased block decomposition used by tests and the information module:
/// lambda_w and rho_w with lambda_w rho_w = <w|R|w> on the register factors.
/// Lives here so channel tests can cross-check the register extension without
/// depending on higher layers.
pub(crate) fn register_blocks(
    r: &ComplexMatrix,
    d: usize,
    delta: usize,
    n: usize,
) -> Result<Vec<(f64, ComplexMatrix)>> {
    let step = d * delta;
    let total: usize = step.pow(n as u32);
    if r.rows() != total || !r.is_square() {
        return Err(Error::dimension_mismatch(format!(
            "state dim {} does not match (d*delta)^n = {}",
            r.rows(),
            total
        )));
    }
    let sys_dim = d.pow(n as u32);
    let reg_dim = delta.pow(n as u32);

    // flat index for (system digits a, register digits w), use-major layout
    let flat = |a: usize, w: usize| -> usize {
        let mut idx = 0usize;
        let mut a_rest = a;
        let mut w_rest = w;
        let mut parts = vec![(0usize, 0usize); n];
        for j in (0..n).rev() {
            parts[j] = (a_rest % d, w_rest % delta);
            a_rest /= d;
            w_rest /= delta;
        }
        for &(aj, wj) in &parts {
            idx = idx * step + aj * delta + wj;
        }
        idx
    };

    let mut blocks = Vec::with_capacity(reg_dim);
    for w in 0..reg_dim {
        let mut block = ComplexMatrix::zeros(sys_dim, sys_dim);
        for a in 0..sys_dim {
            for b in 0..sys_dim {
                block.set(a, b, r.get(flat(a, w), flat(b, w)));
            }
        }
        let weight = block.trace().re;
        blocks.push((weight, block));
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::partial_trace;
    use crate::random::{random_channel, random_density};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus_state() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[c(s, 0.0), c(s, 0.0)]).unwrap()
    }

    #[test]
    fn cpt_validation_rejects_lossy_family() {
        let k = ComplexMatrix::identity(2).scale_real(0.9);
        match QuantumChannel::new(vec![k], "broken") {
            Err(Error::NotTracePreserving { .. }) => {}
            other => panic!("expected CPT failure, got {other:?}"),
        }
    }

    #[test]
    fn identity_apply_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density(3, &mut rng);
        let out = QuantumChannel::identity(3).apply(&rho).unwrap();
        assert!(out.matrix().sub(rho.matrix()).max_abs_entry() < 1e-14);
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let qutrit = random_density(3, &mut rng);
        let ch = QuantumChannel::identity(2);
        assert!(matches!(ch.apply(&qutrit), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            entropy_exchange(&ch, &qutrit, 2),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            complete_dephasing(1),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn dephasing_register_erases_off_diagonals() {
        let t = complete_dephasing(2).unwrap();
        let out = t.apply(&plus_state()).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(out.matrix().sub(&half).max_abs_entry() < 1e-12);

        // diagonal states are fixed points
        let diag = DensityMatrix::new(ComplexMatrix::from_diagonal(&[0.3, 0.7])).unwrap();
        let fixed = t.apply(&diag).unwrap();
        assert!(fixed.matrix().sub(diag.matrix()).max_abs_entry() < 1e-14);
    }

    #[test]
    fn dephasing_register_is_idempotent() {
        let t = complete_dephasing(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let rho = random_density(3, &mut rng);
            let once = t.apply(&rho).unwrap();
            let twice = t.apply(&once).unwrap();
            assert!(twice.matrix().sub(once.matrix()).max_abs_entry() < 1e-12);
        }
    }

    #[test]
    fn depolarizing_matches_bloch_contraction() {
        // Bloch oracle: the depolarizing map contracts the Bloch vector by
        // (1 - q); on |0><0| that gives diag(1 - q/2, q/2).
        let q = 0.3;
        let ch = standard_channel(StandardChannel::Depolarizing(q), 2).unwrap();
        let out = ch.apply(&DensityMatrix::basis(2, 0)).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[1.0 - q / 2.0, q / 2.0]);
        assert!(out.matrix().sub(&expected).max_abs_entry() < 1e-12);

        let fully = standard_channel(StandardChannel::Depolarizing(1.0), 2).unwrap();
        let mixed = fully.apply(&plus_state()).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(mixed.matrix().sub(&half).max_abs_entry() < 1e-12);
    }

    #[test]
    fn tensor_factorizes_on_product_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_channel(2, 2, 2, &mut rng);
        let b = random_channel(2, 2, 3, &mut rng);
        let rho = random_density(2, &mut rng);
        let sigma = random_density(2, &mut rng);

        let joint = QuantumChannel::tensor(&a, &b).unwrap();
        let lhs = joint.apply(&rho.tensor(&sigma).unwrap()).unwrap();
        let rhs = a
            .apply(&rho)
            .unwrap()
            .tensor(&b.apply(&sigma).unwrap())
            .unwrap();
        assert!(lhs.matrix().sub(rhs.matrix()).max_abs_entry() < 1e-10);

        // tensor with identity leaves the second factor untouched
        let with_id = QuantumChannel::tensor(&a, &QuantumChannel::identity(2)).unwrap();
        let lhs2 = with_id.apply(&rho.tensor(&sigma).unwrap()).unwrap();
        let rhs2 = a.apply(&rho).unwrap().tensor(&sigma).unwrap();
        assert!(lhs2.matrix().sub(rhs2.matrix()).max_abs_entry() < 1e-10);
    }

    #[test]
    fn tensor_power_shapes() {
        let ch = standard_channel(StandardChannel::Dephasing(0.25), 2).unwrap();
        let p1 = ch.tensor_power(1).unwrap();
        assert!(maps_equal(&ch, &p1, 1e-12));

        let id2 = QuantumChannel::identity(2).tensor_power(2).unwrap();
        assert!(maps_equal(&id2, &QuantumChannel::identity(4), 1e-12));

        let p2 = ch.tensor_power(2).unwrap();
        assert_eq!(p2.kraus().len(), ch.kraus().len().pow(2));
        assert_eq!(p2.d_in(), 4);
    }

    #[test]
    fn tensor_power_overflow() {
        let ch = QuantumChannel::identity(2);
        match ch.tensor_power(13) {
            Err(Error::DimensionOverflow { .. }) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn register_extension_matches_block_form() {
        // For R on H_d (x) H_Delta the extended map must produce
        // sum_w lambda_w M(rho_w) (x) |w><w|.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_channel(2, 2, 2, &mut rng);
        let mbar = extend_with_dephasing(&m, 2).unwrap();
        for _ in 0..5 {
            let r = random_density(4, &mut rng);
            let out = mbar.apply(&r).unwrap();

            let blocks = register_blocks(r.matrix(), 2, 2, 1).unwrap();
            let weight_sum: f64 = blocks.iter().map(|(w, _)| w).sum();
            assert!((weight_sum - 1.0).abs() < 1e-10);

            let mut assembled = ComplexMatrix::zeros(4, 4);
            for (w, (_, block)) in blocks.iter().enumerate() {
                let mapped = m.apply_matrix(block);
                let mut unit = ComplexMatrix::zeros(2, 2);
                unit.set(w, w, c(1.0, 0.0));
                assembled = assembled.add(&tensor_product(&mapped, &unit).unwrap());
            }
            assert!(out.matrix().sub(&assembled).max_abs_entry() < 1e-10);

            // off-diagonal register blocks vanish
            for a in 0..4usize {
                for b in 0..4usize {
                    if a % 2 != b % 2 {
                        assert!(out.matrix().get(a, b).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn purify_round_trip() {
        // rank-1 case
        let pure = DensityMatrix::basis(2, 0);
        let phi = purify(&pure).unwrap();
        assert!((phi.vec()[0].norm() - 1.0).abs() < 1e-12);

        // maximally mixed: Schmidt coefficients 1/sqrt(2)
        let phi = purify(&DensityMatrix::maximally_mixed(2)).unwrap();
        let weights: Vec<f64> = phi.vec().iter().map(|v| v.norm_sqr()).collect();
        let nonzero: Vec<f64> = weights.into_iter().filter(|&w| w > 1e-12).collect();
        assert_eq!(nonzero.len(), 2);
        for w in nonzero {
            assert!((w - 0.5).abs() < 1e-12);
        }

        // generic round trip through the partial trace
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in [2usize, 3] {
            let rho = random_density(dim, &mut rng);
            let phi = purify(&rho).unwrap();
            let reduced = partial_trace(&phi.projector(), &[dim, dim], &[0]).unwrap();
            assert!(reduced.sub(rho.matrix()).max_abs_entry() < 1e-9);
        }
    }

    #[test]
    fn entropy_exchange_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for dim in [2usize, 3] {
            for _ in 0..10 {
                let ch = random_channel(dim, dim, 2, &mut rng);
                let rho = random_density(dim, &mut rng);
                let w_route = entropy_exchange(&ch, &rho, dim).unwrap();
                let p_route = entropy_exchange_via_purification(&ch, &rho, dim).unwrap();
                assert!(
                    (w_route - p_route).abs() < 1e-8,
                    "routes disagree: {w_route} vs {p_route}"
                );
            }
        }
    }

    #[test]
    fn entropy_exchange_known_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let id = QuantumChannel::identity(2);
        let rho = random_density(2, &mut rng);
        assert!(entropy_exchange(&id, &rho, 2).unwrap().abs() < 1e-12);

        let t = complete_dephasing(2).unwrap();
        let exch = entropy_exchange(&t, &DensityMatrix::maximally_mixed(2), 2).unwrap();
        assert!((exch - 1.0).abs() < 1e-12);
        // direct evaluation: W = diag(1/2, 1/2)
        let w = exchange_matrix(&t, &DensityMatrix::maximally_mixed(2)).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(w.sub(&half).max_abs_entry() < 1e-12);
    }

    #[test]
    fn entropy_exchange_on_pure_input_equals_output_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let ch = random_channel(2, 2, 3, &mut rng);
            let psi = crate::random::random_pure_vector(2, &mut rng);
            let rho = DensityMatrix::pure(&psi).unwrap();
            let exch = entropy_exchange(&ch, &rho, 2).unwrap();
            let out = ch.apply(&rho).unwrap().entropy(2).unwrap();
            assert!((exch - out).abs() < 1e-8);
        }
    }

    #[test]
    fn standard_channel_cases() {
        let noiseless = standard_channel(StandardChannel::Dephasing(0.0), 2).unwrap();
        assert!(maps_equal(&noiseless, &QuantumChannel::identity(2), 1e-12));

        // half-strength phase flip is the complete decoherence map in a
        // different Kraus presentation
        let half = standard_channel(StandardChannel::Dephasing(0.5), 2).unwrap();
        assert!(maps_equal(&half, &complete_dephasing(2).unwrap(), 1e-12));

        let erase = standard_channel(StandardChannel::Erasure(0.25), 2).unwrap();
        assert_eq!(erase.d_out(), 3);
        let out = erase.apply(&DensityMatrix::basis(2, 0)).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[0.75, 0.0, 0.25]);
        assert!(out.matrix().sub(&expected).max_abs_entry() < 1e-12);

        match standard_channel(StandardChannel::Depolarizing(0.5), 3) {
            Err(Error::UnsupportedDimension { .. }) => {}
            other => panic!("expected UnsupportedDimension, got {other:?}"),
        }
        assert!(standard_channel(StandardChannel::Dephasing(1.5), 2).is_err());
    }

    #[test]
    fn channel_json_round_trip() {
        let ch = standard_channel(StandardChannel::AmplitudeDamping(0.3), 2).unwrap();
        let json = channel_to_json(&ch);
        let text = serde_json::to_string(&json).unwrap();
        let parsed: ChannelJson = serde_json::from_str(&text).unwrap();
        let back = channel_from_json(&parsed).unwrap();
        assert!(maps_equal(&ch, &back, 1e-12));

        let named: ChannelJson = serde_json::from_str(
            r#"{"name": "erasure", "params": {"prob": 0.25, "d": 2}}"#,
        )
        .unwrap();
        let built = channel_from_json(&named).unwrap();
        assert_eq!(built.d_out(), 3);
    }

    #[test]
    fn density_matrix_rejects_invalid_inputs() {
        // trace != 1
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        // negative eigenvalue
        let neg = ComplexMatrix::from_diagonal(&[1.5, -0.5]);
        assert!(DensityMatrix::new(neg).is_err());
        // non-hermitian
        let mut nh = ComplexMatrix::identity(2).scale_real(0.5);
        nh.set(0, 1, c(0.1, 0.0));
        assert!(DensityMatrix::new(nh).is_err());
    }
}
