//! Resource-assisted capacity bounds, identities and trade-off curves over a
//! channel profile.

mod bounds;
mod curve;

pub use bounds::{
    classical_capacity, distillability, quantum_exact, quantum_lower, quantum_upper, BoundTag,
    CapacityValue, ClassicalCapacity, DistillabilityValue,
};
pub use curve::{
    check_concavity, sweep, upper_concave_envelope, Axis, BoundCurve, CurveSample, CurveSeries,
    SweepRange,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for profile identity and inequality checks.
pub const VALIDATE_TOL: f64 = 1e-9;
/// Tolerance for derived cross-constraints between bound families; laxer so
/// optimizer-derived profiles do not trip on float noise.
pub const CROSS_TOL: f64 = 1e-6;

// ---------------------------------------------------------------------------
// Resources
// ---------------------------------------------------------------------------

/// A resource rate: a finite nonnegative value or an explicit infinity.
/// Infinities are flagged values, never large floats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resource {
    Finite(f64),
    Infinite,
}

impl Resource {
    pub fn finite(v: f64) -> Self {
        Resource::Finite(v)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Resource::Infinite)
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            Resource::Finite(v) => Some(*v),
            Resource::Infinite => None,
        }
    }

    /// self >= threshold (an infinity dominates every finite threshold).
    pub fn at_least(&self, threshold: f64) -> bool {
        match self {
            Resource::Finite(v) => *v >= threshold,
            Resource::Infinite => true,
        }
    }

    /// self <= threshold; false for infinity.
    pub fn at_most(&self, threshold: f64) -> bool {
        match self {
            Resource::Finite(v) => *v <= threshold,
            Resource::Infinite => false,
        }
    }

    /// Addition: an infinite summand makes the sum infinite.
    pub fn add(&self, rhs: Resource) -> Resource {
        match (self, rhs) {
            (Resource::Finite(a), Resource::Finite(b)) => Resource::Finite(a + b),
            _ => Resource::Infinite,
        }
    }

    pub fn add_f64(&self, rhs: f64) -> Resource {
        self.add(Resource::Finite(rhs))
    }

    /// Scaling by a finite factor; scaling an infinity by zero is undefined.
    pub fn scale(&self, factor: f64) -> Result<Resource> {
        match self {
            Resource::Finite(v) => Ok(Resource::Finite(v * factor)),
            Resource::Infinite if factor > 0.0 => Ok(Resource::Infinite),
            Resource::Infinite => Err(Error::UndefinedResourceArithmetic {
                context: format!("{factor} * infinity"),
            }),
        }
    }

    pub fn parse(text: &str) -> Result<Resource> {
        if text.eq_ignore_ascii_case("inf") || text.eq_ignore_ascii_case("infinity") {
            return Ok(Resource::Infinite);
        }
        let v: f64 = text
            .parse()
            .map_err(|_| Error::malformed(format!("cannot parse resource value '{text}'")))?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::malformed(format!(
                "resource value must be finite and nonnegative, got {v}"
            )));
        }
        Ok(Resource::Finite(v))
    }
}

impl std::fmt::Display for Resource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Resource::Finite(v) => write!(f, "{}", format_value(*v)),
            Resource::Infinite => write!(f, "inf"),
        }
    }
}

/// The assistance parameters (x, y, p): feedback dits, forward dits and
/// shared e-dits per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceTriple {
    pub x: Resource,
    pub y: Resource,
    pub p: Resource,
}

impl ResourceTriple {
    pub fn new(x: Resource, y: Resource, p: Resource) -> Self {
        Self { x, y, p }
    }

    pub fn zero() -> Self {
        Self {
            x: Resource::Finite(0.0),
            y: Resource::Finite(0.0),
            p: Resource::Finite(0.0),
        }
    }

    pub fn no_feedback(&self) -> bool {
        matches!(self.x, Resource::Finite(v) if v == 0.0)
    }
}

impl std::fmt::Display for ResourceTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(x={}, y={}, p={})", self.x, self.y, self.p)
    }
}

/// Formats a value with twelve significant digits, '.' decimal separator.
pub fn format_value(v: f64) -> String {
    format!("{}", round_sig12(v))
}

/// Rounds to twelve significant digits so serialized output is reproducible.
pub fn round_sig12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let magnitude = v.abs().log10().floor() as i32;
    let factor = 10f64.powi(11 - magnitude);
    (v * factor).round() / factor
}

// ---------------------------------------------------------------------------
// Sampled profile curves
// ---------------------------------------------------------------------------

/// Piecewise-linear interpolant over (p, value) knots, clamped to a saturation
/// value beyond a threshold. Queries outside the knot span clamp to the
/// nearest knot until the saturation threshold takes over.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    knots: Vec<(f64, f64)>,
}

impl SampledCurve {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::malformed("sampled curve needs at least one knot"));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::malformed(
                    "sampled curve knots must have strictly increasing coordinates",
                ));
            }
            if w[1].1 < w[0].1 - VALIDATE_TOL {
                return Err(Error::malformed(
                    "sampled capacities must be non-decreasing in the resource",
                ));
            }
        }
        if knots.iter().any(|(p, v)| *p < 0.0 || !v.is_finite()) {
            return Err(Error::malformed("sampled curve knots must be finite, p >= 0"));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Interpolated value with the saturation clamp applied for
    /// p >= saturation_at.
    pub fn eval(&self, p: f64, saturation_at: f64, saturation_value: f64) -> f64 {
        if p >= saturation_at {
            return saturation_value;
        }
        let first = self.knots[0];
        if p <= first.0 {
            return first.1;
        }
        for w in self.knots.windows(2) {
            let (p0, v0) = w[0];
            let (p1, v1) = w[1];
            if p <= p1 {
                return v0 + (v1 - v0) * (p - p0) / (p1 - p0);
            }
        }
        self.knots.last().expect("nonempty").1
    }
}

// ---------------------------------------------------------------------------
// Channel profile
// ---------------------------------------------------------------------------

/// Scalar capacity summary of a fixed channel under the resource context
/// being studied. `q`, `c` are the unassisted capacities; `q_e`, `c_e` the
/// entanglement-assisted ones; `e_q`, `e_c` the saturation thresholds;
/// `d0` = D(x,y,0) and `q_xy0` = Q(x,y,0) for the context's x and y.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    pub q: f64,
    pub c: f64,
    pub q_e: f64,
    pub c_e: f64,
    pub e_q: f64,
    pub e_c: f64,
    pub d0: Option<f64>,
    pub q_xy0: f64,
    pub c_x0p: Option<SampledCurve>,
    pub q_x0p: Option<SampledCurve>,
    pub bowen_conjecture: bool,
    /// Per-field provenance: "measured", "default" or "user".
    pub provenance: BTreeMap<String, String>,
}

impl ChannelProfile {
    /// Bare profile from the six core scalars plus context fields; sampled
    /// curves absent, flag off.
    #[allow(clippy::too_many_arguments)]
    pub fn from_scalars(
        q: f64,
        c: f64,
        q_e: f64,
        c_e: f64,
        e_q: f64,
        e_c: f64,
        d0: Option<f64>,
        q_xy0: f64,
    ) -> Self {
        Self {
            q,
            c,
            q_e,
            c_e,
            e_q,
            e_c,
            d0,
            q_xy0,
            c_x0p: None,
            q_x0p: None,
            bowen_conjecture: false,
            provenance: BTreeMap::new(),
        }
    }
}

/// Draws a profile that satisfies every constraint family by construction,
/// used by the randomized concavity suite. In a no-feedback context the
/// identities pin Q(x,y,0) = D(x,y,0) = Q; otherwise both are sampled with
/// D0 = Q_xy0, which keeps the conversion bound compatible with the
/// concavity chord at every forward rate.
pub fn sample_consistent_profile(
    rng: &mut impl rand::Rng,
    no_feedback_context: bool,
) -> ChannelProfile {
    let q: f64 = rng.gen_range(0.05..1.0);
    let q_e: f64 = q + rng.gen_range(0.0..1.0);
    let margin_cap = (q_e + q).min(1.0);
    let margin = rng.gen_range(0.0..margin_cap);
    let e_q = (q_e - q) + margin;
    let (q_xy0, d0) = if no_feedback_context {
        (q, q)
    } else {
        let q_xy0 = rng.gen_range(q..=q_e);
        (q_xy0, q_xy0)
    };
    let c = q_e;
    let c_e = 2.0 * q_e;
    let e_c = c_e - c;
    ChannelProfile::from_scalars(q, c, q_e, c_e, e_q, e_c, Some(d0), q_xy0)
}

/// One failed profile constraint: the equation-family tag, the violation
/// magnitude and a human-readable description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub tag: String,
    pub residual: f64,
    pub detail: String,
}

fn violation(tag: &str, residual: f64, detail: String) -> Violation {
    Violation {
        tag: tag.into(),
        residual,
        detail,
    }
}

/// Checks every profile constraint family; the returned list is empty exactly
/// when the profile is consistent. Violations are data, not errors.
pub fn validate_profile(pr: &ChannelProfile) -> Vec<Violation> {
    let mut out = Vec::new();
    let tol = VALIDATE_TOL;

    let mut named = vec![
        ("Q", pr.q),
        ("C", pr.c),
        ("Q_E", pr.q_e),
        ("C_E", pr.c_e),
        ("E_Q", pr.e_q),
        ("E_C", pr.e_c),
        ("Q_xy0", pr.q_xy0),
    ];
    if let Some(d0) = pr.d0 {
        named.push(("D0", d0));
    }
    for (name, v) in &named {
        if *v < -tol || !v.is_finite() {
            out.push(violation(
                "nonneg",
                -*v,
                format!("{name} = {v} must be nonnegative and finite"),
            ));
        }
    }

    // trivial upper bounds
    if pr.c < pr.q - tol {
        out.push(violation(
            "distillato1",
            pr.q - pr.c,
            format!("C = {} below Q = {}", pr.c, pr.q),
        ));
    }
    if let Some(d0) = pr.d0 {
        if d0 < pr.q_xy0 - tol {
            out.push(violation(
                "distillato1",
                pr.q_xy0 - d0,
                format!("D(x,y,0) = {} below Q(x,y,0) = {}", d0, pr.q_xy0),
            ));
        }
    }

    // teleportation / superdense-coding identity
    let utile_res = (pr.q_e - pr.c_e / 2.0).abs();
    if utile_res > tol {
        out.push(violation(
            "utile",
            utile_res,
            format!("Q_E = {} is not C_E/2 = {}", pr.q_e, pr.c_e / 2.0),
        ));
    }

    // saturation-threshold band
    if pr.e_q > pr.e_c + pr.q_e + tol {
        out.push(violation(
            "bowenin1",
            pr.e_q - (pr.e_c + pr.q_e),
            format!("E_Q = {} above E_C + Q_E = {}", pr.e_q, pr.e_c + pr.q_e),
        ));
    }
    if pr.e_q < pr.e_c - pr.q_e - tol {
        out.push(violation(
            "bowenin1",
            (pr.e_c - pr.q_e) - pr.e_q,
            format!("E_Q = {} below E_C - Q_E = {}", pr.e_q, pr.e_c - pr.q_e),
        ));
    }

    // saturation thresholds against capacity gaps
    if pr.e_q < pr.q_e - pr.q - tol {
        out.push(violation(
            "bowenin2",
            (pr.q_e - pr.q) - pr.e_q,
            format!("E_Q = {} below Q_E - Q = {}", pr.e_q, pr.q_e - pr.q),
        ));
    }
    if pr.e_c < pr.c_e - pr.c - tol {
        out.push(violation(
            "bowenin2",
            (pr.c_e - pr.c) - pr.e_c,
            format!("E_C = {} below C_E - C = {}", pr.e_c, pr.c_e - pr.c),
        ));
    }

    // monotonicity in the entanglement resource
    if pr.q_e < pr.q - tol {
        out.push(violation(
            "monotonicity",
            pr.q - pr.q_e,
            format!("Q_E = {} below Q = {}", pr.q_e, pr.q),
        ));
    }
    if pr.c_e < pr.c - tol {
        out.push(violation(
            "monotonicity",
            pr.c - pr.c_e,
            format!("C_E = {} below C = {}", pr.c_e, pr.c),
        ));
    }
    if pr.q_xy0 < pr.q - tol {
        out.push(violation(
            "monotonicity",
            pr.q - pr.q_xy0,
            format!("Q(x,y,0) = {} below Q = {}", pr.q_xy0, pr.q),
        ));
    }

    // conjecture mode pins the quantum saturation threshold
    if pr.bowen_conjecture {
        let res = (pr.e_q - (pr.q_e - pr.q)).abs();
        if res > tol {
            out.push(violation(
                "conj",
                res,
                format!(
                    "conjecture mode requires E_Q = Q_E - Q = {}, got {}",
                    pr.q_e - pr.q,
                    pr.e_q
                ),
            ));
        }
    }

    // classical cross-consistency: the concavity lower bound slope must not
    // exceed the distillability-derived upper bound slope, else the classical
    // bounds cross before saturation
    if let Some(d0) = pr.d0 {
        if pr.e_c > 1e-12 && d0 > 1e-12 {
            let lower_slope = (pr.c_e - pr.c) / pr.e_c;
            let upper_slope = pr.c / d0;
            if lower_slope > upper_slope + CROSS_TOL {
                out.push(violation(
                    "cross-classical",
                    lower_slope - upper_slope,
                    format!(
                        "classical lower-bound slope {} exceeds upper-bound slope {}",
                        lower_slope, upper_slope
                    ),
                ));
            }
        }
    }

    out
}

// ---------------------------------------------------------------------------
// Profile JSON
// ---------------------------------------------------------------------------

/// On-disk profile layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileJson {
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "Q_E")]
    pub q_e: f64,
    #[serde(rename = "C_E")]
    pub c_e: f64,
    #[serde(rename = "E_Q")]
    pub e_q: f64,
    #[serde(rename = "E_C")]
    pub e_c: f64,
    #[serde(rename = "D0", skip_serializing_if = "Option::is_none")]
    pub d0: Option<f64>,
    #[serde(rename = "Q_xy0")]
    pub q_xy0: f64,
    #[serde(rename = "C_x0p", skip_serializing_if = "Option::is_none")]
    pub c_x0p: Option<Vec<[f64; 2]>>,
    #[serde(rename = "Q_x0p", skip_serializing_if = "Option::is_none")]
    pub q_x0p: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub bowen_conjecture: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub provenance: BTreeMap<String, String>,
}

pub fn profile_from_json(json: &ProfileJson) -> Result<ChannelProfile> {
    let curve = |knots: &Option<Vec<[f64; 2]>>| -> Result<Option<SampledCurve>> {
        match knots {
            None => Ok(None),
            Some(list) => Ok(Some(SampledCurve::new(
                list.iter().map(|&[p, v]| (p, v)).collect(),
            )?)),
        }
    };
    Ok(ChannelProfile {
        q: json.q,
        c: json.c,
        q_e: json.q_e,
        c_e: json.c_e,
        e_q: json.e_q,
        e_c: json.e_c,
        d0: json.d0,
        q_xy0: json.q_xy0,
        c_x0p: curve(&json.c_x0p)?,
        q_x0p: curve(&json.q_x0p)?,
        bowen_conjecture: json.bowen_conjecture,
        provenance: json.provenance.clone(),
    })
}

pub fn profile_to_json(pr: &ChannelProfile) -> ProfileJson {
    let knots = |c: &Option<SampledCurve>| -> Option<Vec<[f64; 2]>> {
        c.as_ref()
            .map(|c| c.knots().iter().map(|&(p, v)| [p, v]).collect())
    };
    ProfileJson {
        q: pr.q,
        c: pr.c,
        q_e: pr.q_e,
        c_e: pr.c_e,
        e_q: pr.e_q,
        e_c: pr.e_c,
        d0: pr.d0,
        q_xy0: pr.q_xy0,
        c_x0p: knots(&pr.c_x0p),
        q_x0p: knots(&pr.q_x0p),
        bowen_conjecture: pr.bowen_conjecture,
        provenance: pr.provenance.clone(),
    }
}
