//! Maximization of entropic functionals over input states.
//!
//! States are parameterized as A A^dagger / Tr(A A^dagger) with A an
//! unconstrained complex square factor, which turns the constrained problem
//! into plain gradient ascent. Gradients come from central finite differences;
//! the step doubles on improvement and halves on failure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{DensityMatrix, QuantumChannel};
use crate::error::{Error, Result};
use crate::information::{coherent_information, holevo_information, quantum_mutual_information};
use crate::numerics::{psd_sqrt, ComplexMatrix};
use crate::random::standard_normal;

/// Step floor below which a line search is considered stalled.
const STEP_FLOOR: f64 = 1e-12;
/// Argmax states with an eigenvalue below this are reported as lying on the
/// boundary of the state set (rank deficient).
const BOUNDARY_EIG_TOL: f64 = 1e-6;
/// Objective value substituted when an evaluation fails; never selected.
const FAILED_EVAL: f64 = -1e18;

/// Ascent configuration. Identical seeds and configs give bit-identical
/// results.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub grad_eps: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 2000,
            step_init: 0.1,
            grad_eps: 1e-6,
            tol: 1e-7,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0
            || self.max_iters == 0
            || self.step_init <= 0.0
            || self.grad_eps <= 0.0
            || self.tol <= 0.0
        {
            return Err(Error::malformed(
                "optimizer config fields must be positive and restarts >= 1",
            ));
        }
        Ok(())
    }
}

/// Which functional an estimate maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Coherent,
    Qmi,
    Holevo,
}

impl Objective {
    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::Coherent => "coherent",
            Objective::Qmi => "qmi",
            Objective::Holevo => "holevo",
        }
    }
}

/// Best value found together with convergence diagnostics. Values are per
/// channel use, in base-d dits of the single-use input space, and are lower
/// bounds on the corresponding capacity by construction.
#[derive(Debug, Clone)]
pub struct CapacityEstimate {
    pub value: f64,
    pub argmax_state: DensityMatrix,
    pub n_uses: usize,
    pub converged_restarts: usize,
    pub objective: Objective,
    /// Spread max-min of the per-restart best values.
    pub restart_spread: f64,
    /// False when a concave objective saw restarts disagree beyond 10*tol.
    pub restarts_agree: bool,
    /// Finite-difference gradient norm at the argmax, per channel use.
    pub gradient_norm: f64,
    /// True when the argmax is rank deficient (state-set boundary), where the
    /// stationarity check does not apply.
    pub boundary_rank_deficient: bool,
}

/// rho = A A^dagger / Tr(A A^dagger) from 2*dim^2 reals (real block, then
/// imaginary block, each row-major).
pub fn parameterize_state(params: &[f64], dim: usize) -> Result<DensityMatrix> {
    let n = dim * dim;
    if params.len() != 2 * n {
        return Err(Error::dimension_mismatch(format!(
            "factor parameterization needs {} reals for dim {}, got {}",
            2 * n,
            dim,
            params.len()
        )));
    }
    let mut a = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let idx = r * dim + c;
            a.set(r, c, num_complex::Complex64::new(params[idx], params[n + idx]));
        }
    }
    let gram = a.mul(&a.adjoint());
    let tr = gram.trace().re;
    if tr < 1e-12 {
        return Err(Error::DegenerateFactor { trace: tr });
    }
    Ok(DensityMatrix::from_gram_normalized(
        gram.scale_real(1.0 / tr),
    ))
}

fn factor_params_of(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let a = psd_sqrt(rho.matrix())?;
    let dim = rho.dim();
    let n = dim * dim;
    let mut params = vec![0.0; 2 * n];
    for r in 0..dim {
        for c in 0..dim {
            let v = a.get(r, c);
            params[r * dim + c] = v.re;
            params[n + r * dim + c] = v.im;
        }
    }
    Ok(params)
}

struct AscentOutcome {
    params: Vec<f64>,
    value: f64,
    converged: bool,
}

fn finite_diff_gradient<F: Fn(&[f64]) -> f64>(
    f: &F,
    x: &mut [f64],
    eps: f64,
    grad: &mut [f64],
) -> f64 {
    let mut norm_sq = 0.0;
    for i in 0..x.len() {
        let orig = x[i];
        x[i] = orig + eps;
        let fp = f(x);
        x[i] = orig - eps;
        let fm = f(x);
        x[i] = orig;
        grad[i] = (fp - fm) / (2.0 * eps);
        norm_sq += grad[i] * grad[i];
    }
    norm_sq.sqrt()
}

/// Looks for ascent along coordinate directions when the gradient vanishes.
/// The factor parameterization is even in rank-raising directions, so central
/// differences are exactly zero at rank-deficient saddles while finite moves
/// still gain quadratically; true local maxima admit no improving move.
fn coordinate_escape<F: Fn(&[f64]) -> f64>(
    f: &F,
    x: &mut [f64],
    fx: &mut f64,
    step: f64,
) -> bool {
    let mut probe = step;
    while probe >= STEP_FLOOR {
        for i in 0..x.len() {
            for sign in [1.0, -1.0] {
                let orig = x[i];
                x[i] = orig + sign * probe;
                let ft = f(x);
                if ft > *fx {
                    *fx = ft;
                    return true;
                }
                x[i] = orig;
            }
        }
        probe *= 0.5;
    }
    false
}

fn ascend<F: Fn(&[f64]) -> f64>(f: &F, init: Vec<f64>, cfg: &OptimizerConfig) -> AscentOutcome {
    let mut x = init;
    let mut fx = f(&x);
    let mut step = cfg.step_init;
    let mut grad = vec![0.0; x.len()];
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        let gnorm = finite_diff_gradient(f, &mut x, cfg.grad_eps, &mut grad);
        let mut gain = 0.0;
        let mut moved = false;
        if gnorm >= 1e-12 {
            while step >= STEP_FLOOR {
                let trial: Vec<f64> =
                    x.iter().zip(&grad).map(|(xi, gi)| xi + step * gi).collect();
                let ft = f(&trial);
                if ft > fx {
                    gain = ft - fx;
                    x = trial;
                    fx = ft;
                    step = (step * 2.0).min(1e6);
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
        }
        if moved && gain >= cfg.tol {
            continue;
        }
        // Candidate convergence: the gradient step produced less than tol.
        // Probe coordinates before stopping, so rank-deficient saddles (where
        // central differences cancel) are escaped rather than reported.
        let before = fx;
        let escaped = coordinate_escape(f, &mut x, &mut fx, step.max(cfg.step_init));
        if escaped && fx - before >= cfg.tol {
            step = cfg.step_init;
            continue;
        }
        converged = true;
        break;
    }
    AscentOutcome {
        params: x,
        value: fx,
        converged,
    }
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64 + 1);
    rng
}

fn gaussian_params(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..len).map(|_| standard_normal(rng)).collect()
}

/// Restart initializations for density-matrix objectives: maximally mixed,
/// one random pure state, optionally a caller-provided seed state, then
/// Gaussian factors.
fn density_init(
    restart: usize,
    dim: usize,
    seed_state: Option<&DensityMatrix>,
    cfg: &OptimizerConfig,
) -> Vec<f64> {
    let n = dim * dim;
    match restart {
        0 => {
            // A = I -> maximally mixed
            let mut p = vec![0.0; 2 * n];
            for i in 0..dim {
                p[i * dim + i] = 1.0;
            }
            p
        }
        1 => {
            // single nonzero column -> random pure state
            let mut rng = restart_rng(cfg.seed, restart);
            let psi = crate::random::random_pure_vector(dim, &mut rng);
            let mut p = vec![0.0; 2 * n];
            for (r, amp) in psi.iter().enumerate() {
                p[r * dim] = amp.re;
                p[n + r * dim] = amp.im;
            }
            p
        }
        2 if seed_state.is_some() => factor_params_of(seed_state.expect("checked"))
            .unwrap_or_else(|_| gaussian_params(2 * n, &mut restart_rng(cfg.seed, restart))),
        r => gaussian_params(2 * n, &mut restart_rng(cfg.seed, r)),
    }
}

struct StateSearch {
    best_params: Vec<f64>,
    best_value: f64,
    converged_restarts: usize,
    spread: f64,
}

fn search_states<F: Fn(&[f64]) -> f64>(
    objective: &F,
    dim: usize,
    seed_state: Option<&DensityMatrix>,
    cfg: &OptimizerConfig,
) -> StateSearch {
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut converged = 0usize;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in 0..cfg.restarts {
        let init = density_init(r, dim, seed_state, cfg);
        let out = ascend(objective, init, cfg);
        if out.converged {
            converged += 1;
        }
        lo = lo.min(out.value);
        hi = hi.max(out.value);
        // strict improvement keeps the lowest restart index on ties
        if best.as_ref().is_none_or(|(_, v)| out.value > *v) {
            best = Some((out.params, out.value));
        }
    }
    let (best_params, best_value) = best.expect("restarts >= 1");
    StateSearch {
        best_params,
        best_value,
        converged_restarts: converged,
        spread: hi - lo,
    }
}

fn finish_state_estimate<F: Fn(&[f64]) -> f64>(
    objective: &F,
    search: StateSearch,
    dim: usize,
    n_uses: usize,
    kind: Objective,
    cfg: &OptimizerConfig,
) -> Result<CapacityEstimate> {
    let mut params = search.best_params;
    let mut grad = vec![0.0; params.len()];
    let gradient_norm =
        finite_diff_gradient(objective, &mut params, cfg.grad_eps, &mut grad) / n_uses as f64;
    let argmax_state = parameterize_state(&params, dim)?;
    let boundary = argmax_state.min_eigenvalue()? < BOUNDARY_EIG_TOL;
    let agree = search.spread <= 10.0 * cfg.tol;
    Ok(CapacityEstimate {
        value: search.best_value / n_uses as f64,
        argmax_state,
        n_uses,
        converged_restarts: search.converged_restarts,
        objective: kind,
        restart_spread: search.spread,
        restarts_agree: agree,
        gradient_norm,
        boundary_rank_deficient: boundary,
    })
}

/// Best coherent information of ch^(x n) over input states, divided by n
/// (per-use dits in base d_in of the single use). A lower bound on Q_n/n.
///
/// For n > 1 one restart is seeded with the n = 1 argmax tensored with
/// itself, so the product strategy is always recovered.
pub fn maximize_coherent_information(
    ch: &QuantumChannel,
    n: usize,
    cfg: &OptimizerConfig,
) -> Result<CapacityEstimate> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::malformed("n must be >= 1"));
    }
    let base = ch.d_in();
    let channel_n = ch.tensor_power(n)?;
    let dim = channel_n.d_in();

    let seed_state = if n > 1 {
        let single = maximize_coherent_information(ch, 1, cfg)?;
        let mut product = single.argmax_state.clone();
        for _ in 1..n {
            product = product.tensor(&single.argmax_state)?;
        }
        Some(product)
    } else {
        None
    };

    let objective = move |params: &[f64]| -> f64 {
        parameterize_state(params, dim)
            .and_then(|rho| coherent_information(&channel_n, &rho, base))
            .unwrap_or(FAILED_EVAL)
    };
    let search = search_states(&objective, dim, seed_state.as_ref(), cfg);
    finish_state_estimate(&objective, search, dim, n, Objective::Coherent, cfg)
}

/// Maximum quantum mutual information over input states (the objective is
/// concave, so all restarts are expected to agree; disagreement beyond
/// 10*tol is flagged through `restarts_agree`).
pub fn maximize_qmi(ch: &QuantumChannel, cfg: &OptimizerConfig) -> Result<CapacityEstimate> {
    cfg.validate()?;
    let base = ch.d_in();
    let dim = ch.d_in();
    let channel = ch.clone();
    let objective = move |params: &[f64]| -> f64 {
        parameterize_state(params, dim)
            .and_then(|rho| quantum_mutual_information(&channel, &rho, base))
            .unwrap_or(FAILED_EVAL)
    };
    let search = search_states(&objective, dim, None, cfg);
    finish_state_estimate(&objective, search, dim, 1, Objective::Qmi, cfg)
}

// Holevo parameterization: m weight reals (squared and normalized) followed by
// m pure-state blocks of 2*d reals each.
fn holevo_ensemble(params: &[f64], m: usize, d: usize) -> Vec<(f64, DensityMatrix)> {
    let weight_sq: Vec<f64> = params[..m].iter().map(|w| w * w).collect();
    let total: f64 = weight_sq.iter().sum();
    let probs: Vec<f64> = if total < 1e-12 {
        vec![1.0 / m as f64; m]
    } else {
        weight_sq.iter().map(|w| w / total).collect()
    };

    let mut ensemble = Vec::with_capacity(m);
    for i in 0..m {
        let block = &params[m + i * 2 * d..m + (i + 1) * 2 * d];
        let vec: Vec<num_complex::Complex64> = (0..d)
            .map(|k| num_complex::Complex64::new(block[k], block[d + k]))
            .collect();
        let norm_sq: f64 = vec.iter().map(|c| c.norm_sqr()).sum();
        let state = if norm_sq < 1e-18 {
            DensityMatrix::basis(d, i % d)
        } else {
            DensityMatrix::pure(&vec).expect("nonzero vector")
        };
        ensemble.push((probs[i], state));
    }
    ensemble
}

fn holevo_init(restart: usize, m: usize, d: usize, cfg: &OptimizerConfig) -> Vec<f64> {
    let len = m + m * 2 * d;
    match restart {
        0 => {
            // uniform weights over computational basis states
            let mut p = vec![0.0; len];
            for w in p.iter_mut().take(m) {
                *w = 1.0;
            }
            for i in 0..m {
                p[m + i * 2 * d + (i % d)] = 1.0;
            }
            p
        }
        1 => {
            let mut rng = restart_rng(cfg.seed, restart);
            let mut p = vec![0.0; len];
            for w in p.iter_mut().take(m) {
                *w = 1.0;
            }
            for i in 0..m {
                let psi = crate::random::random_pure_vector(d, &mut rng);
                for (k, amp) in psi.iter().enumerate() {
                    p[m + i * 2 * d + k] = amp.re;
                    p[m + i * 2 * d + d + k] = amp.im;
                }
            }
            p
        }
        r => gaussian_params(len, &mut restart_rng(cfg.seed, r)),
    }
}

/// Best Holevo information over jointly parameterized probabilities and
/// pure-state ensemble members; a lower bound on the one-shot classical
/// capacity. The reported argmax state is the average ensemble input.
pub fn maximize_holevo(
    ch: &QuantumChannel,
    ensemble_size: usize,
    cfg: &OptimizerConfig,
) -> Result<CapacityEstimate> {
    cfg.validate()?;
    if ensemble_size < 2 {
        return Err(Error::malformed("ensemble size must be >= 2"));
    }
    let d = ch.d_in();
    let base = ch.d_in();
    let channel = ch.clone();
    let m = ensemble_size;
    let objective = move |params: &[f64]| -> f64 {
        let ensemble = holevo_ensemble(params, m, d);
        holevo_information(&channel, &ensemble, base).unwrap_or(FAILED_EVAL)
    };

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut converged = 0usize;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in 0..cfg.restarts {
        let out = ascend(&objective, holevo_init(r, m, d, cfg), cfg);
        if out.converged {
            converged += 1;
        }
        lo = lo.min(out.value);
        hi = hi.max(out.value);
        if best.as_ref().is_none_or(|(_, v)| out.value > *v) {
            best = Some((out.params, out.value));
        }
    }
    let (mut best_params, best_value) = best.expect("restarts >= 1");

    let mut grad = vec![0.0; best_params.len()];
    let gradient_norm = finite_diff_gradient(&objective, &mut best_params, cfg.grad_eps, &mut grad);

    let ensemble = holevo_ensemble(&best_params, m, d);
    let mut avg = ComplexMatrix::zeros(d, d);
    for (p, rho) in &ensemble {
        avg = avg.add(&rho.matrix().scale_real(*p));
    }
    let argmax_state = DensityMatrix::from_gram_normalized(avg);
    let boundary = argmax_state.min_eigenvalue()? < BOUNDARY_EIG_TOL;
    let spread = hi - lo;

    Ok(CapacityEstimate {
        value: best_value,
        argmax_state,
        n_uses: 1,
        converged_restarts: converged,
        objective: Objective::Holevo,
        restart_spread: spread,
        restarts_agree: spread <= 10.0 * cfg.tol,
        gradient_norm,
        boundary_rank_deficient: boundary,
    })
}
