//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use chancap_core::channels::{channel_from_json, ChannelJson, QuantumChannel};
use chancap_core::information::decomposition_identity_check;
use chancap_core::optimize::{
    maximize_coherent_information, maximize_holevo, maximize_qmi, CapacityEstimate,
    OptimizerConfig,
};
use chancap_core::random::{random_channel, random_density};
use chancap_core::tradeoff::{
    check_concavity, profile_from_json, profile_to_json, quantum_lower, quantum_upper,
    sample_consistent_profile, sweep, validate_profile, Axis, ChannelProfile, CurveSeries,
    Resource, ResourceTriple, SweepRange, Violation,
};
use crate::report::{emit_json, emit_text, num, state_value};
use crate::{CliFailure, OptArgs};

fn load_channel(path: &Path) -> Result<QuantumChannel, CliFailure> {
    let text = std::fs::read_to_string(path)?;
    let json: ChannelJson = serde_json::from_str(&text)
        .map_err(|e| CliFailure::new(2, format!("malformed channel JSON: {e}")))?;
    Ok(channel_from_json(&json)?)
}

fn load_profile(path: &Path) -> Result<ChannelProfile, CliFailure> {
    let text = std::fs::read_to_string(path)?;
    let json = serde_json::from_str(&text)
        .map_err(|e| CliFailure::new(2, format!("malformed profile JSON: {e}")))?;
    Ok(profile_from_json(&json)?)
}

fn optimizer_config(opt: &OptArgs) -> OptimizerConfig {
    OptimizerConfig {
        restarts: opt.restarts,
        max_iters: opt.max_iters,
        seed: opt.seed,
        ..OptimizerConfig::default()
    }
}

fn violations_value(violations: &[Violation]) -> Value {
    Value::Array(
        violations
            .iter()
            .map(|v| {
                json!({
                    "tag": v.tag,
                    "residual": num(v.residual),
                    "detail": v.detail,
                })
            })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// capacity
// ---------------------------------------------------------------------------

pub fn capacity(
    channel_path: &Path,
    objective: &str,
    n: usize,
    ensemble_size: Option<usize>,
    opt: &OptArgs,
    out: Option<&Path>,
) -> Result<(), CliFailure> {
    let ch = load_channel(channel_path)?;
    let cfg = optimizer_config(opt);
    let started = Instant::now();
    let est: CapacityEstimate = match objective {
        "coherent" => maximize_coherent_information(&ch, n, &cfg)?,
        "qmi" => maximize_qmi(&ch, &cfg)?,
        "holevo" => {
            let size = ensemble_size.unwrap_or(ch.d_in() * ch.d_in());
            maximize_holevo(&ch, size, &cfg)?
        }
        other => {
            return Err(CliFailure::new(
                2,
                format!("unknown objective '{other}' (coherent, qmi, holevo)"),
            ))
        }
    };
    // wall time stays off the deterministic report
    eprintln!("wall_time_s={:.3}", started.elapsed().as_secs_f64());

    let report = json!({
        "objective": est.objective.as_str(),
        "channel": ch.label(),
        "d_in": ch.d_in(),
        "d_out": ch.d_out(),
        "value_dits": num(est.value),
        "n_uses": est.n_uses,
        "restarts_converged": est.converged_restarts,
        "restart_spread": num(est.restart_spread),
        "restarts_agree": est.restarts_agree,
        "gradient_norm": num(est.gradient_norm),
        "boundary_rank_deficient": est.boundary_rank_deficient,
        "seed": opt.seed,
        "argmax_state": state_value(&est.argmax_state),
    });
    emit_json(&report, out)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
pub fn verify(
    suite: &str,
    d: usize,
    delta: usize,
    n: usize,
    trials: usize,
    seed: u64,
    channel_path: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliFailure> {
    let fixed_channel = channel_path.map(load_channel).transpose()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (max_residual, tolerance) = match suite {
        "decomposition" => {
            let mut max_res: f64 = 0.0;
            for _ in 0..trials {
                let m = match &fixed_channel {
                    Some(ch) => ch.clone(),
                    None => random_channel(d, d, rng.gen_range(2..4), &mut rng),
                };
                if m.d_in() != d || m.d_out() != d {
                    return Err(CliFailure::new(
                        2,
                        format!("decomposition suite needs a {d}-dimensional channel"),
                    ));
                }
                let joint_dim = (d * delta).pow(n as u32);
                let r = random_density(joint_dim, &mut rng);
                let check = decomposition_identity_check(&m, delta, &r, n, d)?;
                max_res = max_res.max(check.residual).max(check.entropy_split_residual);
            }
            (max_res, 1e-8)
        }
        "entropy-exchange-dual" => {
            let mut max_res: f64 = 0.0;
            for _ in 0..trials {
                let ch = match &fixed_channel {
                    Some(ch) => ch.clone(),
                    None => random_channel(d, d, rng.gen_range(2..5), &mut rng),
                };
                let rho = random_density(ch.d_in(), &mut rng);
                let w = chancap_core::channels::entropy_exchange(&ch, &rho, d)?;
                let p = chancap_core::channels::entropy_exchange_via_purification(&ch, &rho, d)?;
                max_res = max_res.max((w - p).abs());
            }
            (max_res, 1e-8)
        }
        "concavity" => {
            let mut max_res: f64 = 0.0;
            for trial in 0..trials {
                let no_feedback = trial % 2 == 0;
                let pr = sample_consistent_profile(&mut rng, no_feedback);
                let y: f64 = rng.gen_range(0.0..2.0);
                let x = if no_feedback { 0.0 } else { 1.0 };
                let fixed = ResourceTriple::new(
                    Resource::Finite(x),
                    Resource::Finite(y),
                    Resource::Finite(0.0),
                );
                let range = SweepRange::new(0.0, y / 2.0 + pr.e_q + 1.0, 17);
                let curve = sweep(&pr, Axis::P, &fixed, &range)?;
                curve.validate()?;
                let (ok, first) = check_concavity(&curve, CurveSeries::Lower)?;
                if !ok {
                    max_res = max_res.max(first.map(|(_, r)| r).unwrap_or(f64::INFINITY));
                }
            }
            (max_res, 1e-9)
        }
        other => {
            return Err(CliFailure::new(
                2,
                format!(
                    "unknown suite '{other}' (decomposition, entropy-exchange-dual, concavity)"
                ),
            ))
        }
    };

    let pass = max_residual < tolerance;
    let report = json!({
        "suite": suite,
        "trials": trials,
        "d": d,
        "delta": delta,
        "n": n,
        "seed": seed,
        "max_residual": num(max_residual),
        "tolerance": num(tolerance),
        "pass": pass,
    });
    emit_json(&report, out)?;
    if !pass {
        return Err(CliFailure::new(
            4,
            format!("suite {suite} failed: max residual {max_residual:.3e} >= {tolerance:.0e}"),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// region
// ---------------------------------------------------------------------------

fn parse_range(text: &str) -> Result<(f64, f64, usize), CliFailure> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliFailure::new(2, format!("range must be LO:HI:STEPS, got '{text}'")));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CliFailure::new(2, format!("bad range lo '{}'", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CliFailure::new(2, format!("bad range hi '{}'", parts[1])))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| CliFailure::new(2, format!("bad range steps '{}'", parts[2])))?;
    Ok((lo, hi, steps))
}

/// Scans a tag sequence along the grid and lists the coordinates where the
/// active tag changes.
fn transitions(coords: &[f64], tags: &[String]) -> Value {
    let mut out = Vec::new();
    for i in 1..tags.len() {
        if tags[i] != tags[i - 1] {
            out.push(json!({
                "from": tags[i - 1],
                "to": tags[i],
                "at": num(coords[i]),
            }));
        }
    }
    Value::Array(out)
}

#[allow(clippy::too_many_arguments)]
pub fn region(
    profile_path: &Path,
    axis: &str,
    x: &str,
    y: &str,
    p: &str,
    range: &str,
    end_inf: bool,
    force: bool,
    bowen: bool,
    out: Option<&Path>,
) -> Result<(), CliFailure> {
    let mut pr = load_profile(profile_path)?;
    if bowen {
        pr.bowen_conjecture = true;
    }
    let violations = validate_profile(&pr);
    if !violations.is_empty() && !force {
        let report = json!({ "violations": violations_value(&violations), "pass": false });
        eprintln!("{}", serde_json::to_string_pretty(&report).expect("valid json"));
        return Err(CliFailure::new(
            2,
            "profile failed validation (use --force to sweep in bounds-only mode)",
        ));
    }

    let axis = Axis::parse(axis)?;
    let fixed = ResourceTriple::new(Resource::parse(x)?, Resource::parse(y)?, Resource::parse(p)?);
    let (lo, hi, steps) = parse_range(range)?;
    let range = SweepRange {
        lo,
        hi,
        steps,
        hi_infinite: end_inf,
    };

    let curve = sweep(&pr, axis, &fixed, &range)?;
    curve.validate()?;
    let csv = curve.to_csv();
    emit_text(&csv, out)?;

    // Raw bound-evaluator transitions along the finite grid; the curve's own
    // tags additionally show where exact values took over.
    let coords: Vec<f64> = curve
        .samples
        .iter()
        .filter_map(|s| s.coord.as_finite())
        .collect();
    let mut raw_upper = Vec::new();
    let mut raw_lower = Vec::new();
    for &c in &coords {
        let mut t = fixed;
        match axis {
            Axis::P => t.p = Resource::Finite(c),
            Axis::Y => t.y = Resource::Finite(c),
        }
        raw_upper.push(quantum_upper(&pr, &t)?.1.as_str().to_string());
        raw_lower.push(quantum_lower(&pr, &t)?.1.as_str().to_string());
    }
    let curve_upper: Vec<String> = curve
        .samples
        .iter()
        .filter(|s| !s.coord.is_infinite())
        .map(|s| s.active_upper.clone())
        .collect();
    let curve_lower: Vec<String> = curve
        .samples
        .iter()
        .filter(|s| !s.coord.is_infinite())
        .map(|s| s.active_lower.clone())
        .collect();

    let summary = json!({
        "axis": axis.as_str(),
        "fixed": { "x": fixed.x.to_string(), "y": fixed.y.to_string(), "p": fixed.p.to_string() },
        "samples": curve.samples.len(),
        "violations": violations_value(&violations),
        "upper_bound_transitions": transitions(&coords, &raw_upper),
        "lower_bound_transitions": transitions(&coords, &raw_lower),
        "curve_upper_transitions": transitions(&coords, &curve_upper),
        "curve_lower_transitions": transitions(&coords, &curve_lower),
    });
    let summary_text = format!(
        "{}\n",
        serde_json::to_string_pretty(&summary).expect("valid json")
    );
    if out.is_some() {
        // CSV went to the file; the summary goes to stdout
        print!("{summary_text}");
    } else {
        eprint!("{summary_text}");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// profile-derive
// ---------------------------------------------------------------------------

pub fn profile_derive(
    channel_path: &Path,
    n_cap: usize,
    opt: &OptArgs,
    out: Option<&Path>,
) -> Result<(), CliFailure> {
    let ch = load_channel(channel_path)?;
    let cfg = optimizer_config(opt);
    if n_cap == 0 {
        return Err(CliFailure::new(2, "n-cap must be >= 1"));
    }

    let mut q = f64::NEG_INFINITY;
    for n in 1..=n_cap {
        let est = maximize_coherent_information(&ch, n, &cfg)?;
        eprintln!(
            "coherent n={n}: {} dits/use ({} restarts converged)",
            est.value, est.converged_restarts
        );
        q = q.max(est.value);
    }
    let q = q.max(0.0);

    let qmi = maximize_qmi(&ch, &cfg)?;
    eprintln!(
        "qmi: {} dits ({} restarts converged, spread {})",
        qmi.value, qmi.converged_restarts, qmi.restart_spread
    );
    let chi = maximize_holevo(&ch, ch.d_in() * ch.d_in(), &cfg)?;
    eprintln!(
        "holevo: {} dits ({} restarts converged)",
        chi.value, chi.converged_restarts
    );

    // Lower-bound composition: every capacity estimate is a lower bound, and
    // C >= Q, C_E >= C, C_E >= 2Q are identities, so the max of the available
    // lower bounds is still a lower bound for each field.
    let c = chi.value.max(q).max(0.0);
    let c_e = qmi.value.max(c).max(2.0 * q);
    let q_e = c_e / 2.0;

    let mut provenance = BTreeMap::new();
    for field in ["Q", "C", "C_E", "Q_E"] {
        provenance.insert(field.to_string(), "measured".to_string());
    }
    for field in ["E_Q", "E_C", "D0", "Q_xy0"] {
        provenance.insert(field.to_string(), "default".to_string());
    }

    let pr = ChannelProfile {
        q,
        c,
        q_e,
        c_e,
        // saturation thresholds default to their lower bounds
        e_q: q_e - q,
        e_c: c_e - c,
        // no-feedback context: D(0,y,0) = Q and Q(0,y,0) = Q
        d0: Some(q),
        q_xy0: q,
        c_x0p: None,
        q_x0p: None,
        bowen_conjecture: false,
        provenance,
    };

    let violations = validate_profile(&pr);
    if !violations.is_empty() {
        let report = json!({ "violations": violations_value(&violations), "pass": false });
        emit_json(&report, None)?;
        return Err(CliFailure::new(4, "derived profile failed validation"));
    }

    let mut json_profile = profile_to_json(&pr);
    json_profile.q = chancap_core::tradeoff::round_sig12(json_profile.q);
    json_profile.c = chancap_core::tradeoff::round_sig12(json_profile.c);
    json_profile.q_e = chancap_core::tradeoff::round_sig12(json_profile.q_e);
    json_profile.c_e = chancap_core::tradeoff::round_sig12(json_profile.c_e);
    json_profile.e_q = chancap_core::tradeoff::round_sig12(json_profile.e_q);
    json_profile.e_c = chancap_core::tradeoff::round_sig12(json_profile.e_c);
    json_profile.d0 = json_profile.d0.map(chancap_core::tradeoff::round_sig12);
    json_profile.q_xy0 = chancap_core::tradeoff::round_sig12(json_profile.q_xy0);
    let value = serde_json::to_value(&json_profile).expect("valid json");
    emit_json(&value, out)
}

// ---------------------------------------------------------------------------
// profile-validate
// ---------------------------------------------------------------------------

pub fn profile_validate(
    profile_path: &Path,
    bowen: bool,
    out: Option<&Path>,
) -> Result<(), CliFailure> {
    let mut pr = load_profile(profile_path)?;
    if bowen {
        pr.bowen_conjecture = true;
    }
    let violations = validate_profile(&pr);
    let pass = violations.is_empty();
    let report = json!({
        "pass": pass,
        "violations": violations_value(&violations),
    });
    emit_json(&report, out)?;
    if !pass {
        return Err(CliFailure::new(
            4,
            format!("profile has {} violation(s)", violations.len()),
        ));
    }
    Ok(())
}
