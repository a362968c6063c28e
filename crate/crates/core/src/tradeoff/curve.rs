//! Trade-off curve assembly: sweeps along one resource axis, lower-envelope
//! concavification and the concavity validator.

use crate::error::{Error, Result};
use crate::tradeoff::bounds::{
    quantum_exact, quantum_lower_candidates, quantum_upper, BoundTag,
};
use crate::tradeoff::{format_value, ChannelProfile, Resource, ResourceTriple};

/// Axis being swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    P,
    Y,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::P => "p",
            Axis::Y => "y",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "p" => Ok(Axis::P),
            "y" => Ok(Axis::Y),
            other => Err(Error::malformed(format!("axis must be p or y, got {other}"))),
        }
    }
}

/// One sampled point of a trade-off curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub coord: Resource,
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
    pub active_lower: String,
    pub active_upper: String,
}

/// Sampled piecewise curve of capacity bounds along one resource axis.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub axis: Axis,
    pub samples: Vec<CurveSample>,
}

/// Sweep grid: `steps` evenly spaced samples on [lo, hi]; when `hi_infinite`
/// is set, one extra sample at the infinite end of the axis is appended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub hi_infinite: bool,
}

impl SweepRange {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Self {
        Self {
            lo,
            hi,
            steps,
            hi_infinite: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::malformed("sweep needs at least 2 steps"));
        }
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo < 0.0 || self.hi < self.lo {
            return Err(Error::malformed(format!(
                "sweep range must satisfy 0 <= lo <= hi, got {}..{}",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

fn with_axis(fixed: &ResourceTriple, axis: Axis, coord: Resource) -> ResourceTriple {
    let mut t = *fixed;
    match axis {
        Axis::P => t.p = coord,
        Axis::Y => t.y = coord,
    }
    t
}

fn infeasible(coord: Resource, lower: f64, upper: f64, lt: &str, ut: &str) -> Error {
    Error::InfeasibleProfile {
        coord: coord.to_string(),
        lower,
        upper,
        lower_tag: lt.to_string(),
        upper_tag: ut.to_string(),
    }
}

/// Upper concave envelope of (x, v) points with strictly increasing x,
/// evaluated back on the same grid. Plain monotone-chain upper hull.
pub fn upper_concave_envelope(points: &[(f64, f64)]) -> Vec<f64> {
    let n = points.len();
    if n <= 2 {
        return points.iter().map(|&(_, v)| v).collect();
    }
    // upper hull: keep turns clockwise (cross <= 0)
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| -> f64 {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        while hull.len() >= 2 {
            let o = points[hull[hull.len() - 2]];
            let a = points[hull[hull.len() - 1]];
            if cross(o, a, points[i]) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    // interpolate hull segments back onto the grid
    let mut out = Vec::with_capacity(n);
    let mut seg = 0usize;
    for (i, &(x, v)) in points.iter().enumerate() {
        while seg + 1 < hull.len() && points[hull[seg + 1]].0 < x {
            seg += 1;
        }
        if hull.contains(&i) {
            out.push(v);
            continue;
        }
        let (x0, v0) = points[hull[seg]];
        let (x1, v1) = points[hull[seg + 1]];
        out.push(v0 + (v1 - v0) * (x - x0) / (x1 - x0));
    }
    out
}

/// Sweeps the quantum-capacity bounds along one axis. Per sample the exact
/// value (where pinned) must sit inside [lower, upper]; afterwards the lower
/// curve is replaced by its upper concave envelope (time-sharing closure).
/// Any sample where the bounds cross fails with `InfeasibleProfile`, except
/// that the Q7 stand-in (a substitution, not a theorem) is discarded rather
/// than allowed to contradict sound bounds.
pub fn sweep(
    pr: &ChannelProfile,
    axis: Axis,
    fixed: &ResourceTriple,
    range: &SweepRange,
) -> Result<BoundCurve> {
    range.validate()?;
    let mut coords: Vec<Resource> = (0..range.steps)
        .map(|i| {
            let t = i as f64 / (range.steps - 1) as f64;
            Resource::Finite(range.lo + t * (range.hi - range.lo))
        })
        .collect();
    if range.hi_infinite {
        coords.push(Resource::Infinite);
    }

    let pick = |cands: &[(f64, BoundTag)]| -> Option<(f64, BoundTag)> {
        cands
            .iter()
            .copied()
            .reduce(|best, cand| if cand.0 > best.0 { cand } else { best })
    };

    let mut samples = Vec::with_capacity(coords.len());
    for coord in coords {
        let t = with_axis(fixed, axis, coord);
        let candidates = quantum_lower_candidates(pr, &t);
        let (up, up_tag) = quantum_upper(pr, &t)?;
        let exact = quantum_exact(pr, &t);

        let (mut lo, mut lo_tag) = pick(&candidates).ok_or(Error::MissingProfileField {
            field: format!("no lower bound applies at {t}"),
        })?;
        let cap = exact.map(|(e, _)| e).unwrap_or(up);
        if lo > cap + 1e-9 && lo_tag == BoundTag::Q7Standin {
            let sound: Vec<(f64, BoundTag)> = candidates
                .into_iter()
                .filter(|(_, tag)| *tag != BoundTag::Q7Standin)
                .collect();
            if let Some((l2, t2)) = pick(&sound) {
                lo = l2;
                lo_tag = t2;
            }
        }

        let sample = match exact {
            Some((e, etag)) => {
                if e < lo - 1e-9 {
                    return Err(infeasible(coord, lo, e, lo_tag.as_str(), etag.as_str()));
                }
                if e > up + 1e-9 {
                    return Err(infeasible(coord, e, up, etag.as_str(), up_tag.as_str()));
                }
                CurveSample {
                    coord,
                    lower: e,
                    upper: e,
                    exact: Some(e),
                    active_lower: etag.as_str().to_string(),
                    active_upper: etag.as_str().to_string(),
                }
            }
            None => {
                if lo > up + 1e-9 {
                    return Err(infeasible(coord, lo, up, lo_tag.as_str(), up_tag.as_str()));
                }
                CurveSample {
                    coord,
                    lower: lo,
                    upper: up,
                    exact: None,
                    active_lower: lo_tag.as_str().to_string(),
                    active_upper: up_tag.as_str().to_string(),
                }
            }
        };
        samples.push(sample);
    }

    // concavify the lower curve over the finite part of the grid
    let finite: Vec<(usize, (f64, f64))> = samples
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.coord.as_finite().map(|x| (i, (x, s.lower))))
        .collect();
    let points: Vec<(f64, f64)> = finite.iter().map(|&(_, p)| p).collect();
    let envelope = upper_concave_envelope(&points);
    for ((idx, _), env) in finite.iter().zip(envelope) {
        let s = &mut samples[*idx];
        if env > s.lower + 1e-12 {
            s.lower = env;
            s.active_lower = BoundTag::Envelope.as_str().to_string();
        }
        if s.lower > s.upper + 1e-9 {
            return Err(infeasible(
                s.coord,
                s.lower,
                s.upper,
                &s.active_lower,
                &s.active_upper,
            ));
        }
    }

    Ok(BoundCurve { axis, samples })
}

impl BoundCurve {
    /// Structural invariants: lower <= upper, exact inside the interval, both
    /// curves non-decreasing along the axis.
    pub fn validate(&self) -> Result<()> {
        for s in &self.samples {
            if s.lower > s.upper + 1e-12 {
                return Err(Error::malformed(format!(
                    "curve sample at {} has lower {} above upper {}",
                    s.coord, s.lower, s.upper
                )));
            }
            if let Some(e) = s.exact {
                if e < s.lower - 1e-9 || e > s.upper + 1e-9 {
                    return Err(Error::malformed(format!(
                        "exact value {} outside [{}, {}] at {}",
                        e, s.lower, s.upper, s.coord
                    )));
                }
            }
        }
        for w in self.samples.windows(2) {
            if w[1].lower < w[0].lower - 1e-9 || w[1].upper < w[0].upper - 1e-9 {
                return Err(Error::malformed(format!(
                    "curve decreases between {} and {}",
                    w[0].coord, w[1].coord
                )));
            }
        }
        Ok(())
    }

    /// CSV rendering: `coord,lower,upper,exact,active_lower,active_upper` with
    /// twelve-significant-digit values and an empty exact column where the
    /// value is not pinned.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("coord,lower,upper,exact,active_lower,active_upper\n");
        for s in &self.samples {
            let exact = s.exact.map(format_value).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.coord,
                format_value(s.lower),
                format_value(s.upper),
                exact,
                s.active_lower,
                s.active_upper
            ));
        }
        out
    }

    /// Parses the CSV format written by [`BoundCurve::to_csv`].
    pub fn from_csv(text: &str, axis: Axis) -> Result<BoundCurve> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::malformed("empty curve CSV"))?;
        if header.trim() != "coord,lower,upper,exact,active_lower,active_upper" {
            return Err(Error::malformed(format!("unexpected CSV header '{header}'")));
        }
        let mut samples = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 6 {
                return Err(Error::malformed(format!(
                    "line {}: expected 6 fields, got {}",
                    lineno + 2,
                    parts.len()
                )));
            }
            let coord = Resource::parse(parts[0])?;
            let parse_num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| Error::malformed(format!("bad number '{s}'")))
            };
            let exact = if parts[3].is_empty() {
                None
            } else {
                Some(parse_num(parts[3])?)
            };
            samples.push(CurveSample {
                coord,
                lower: parse_num(parts[1])?,
                upper: parse_num(parts[2])?,
                exact,
                active_lower: parts[4].to_string(),
                active_upper: parts[5].to_string(),
            });
        }
        Ok(BoundCurve { axis, samples })
    }

    fn series(&self, which: CurveSeries) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .filter_map(|s| {
                let x = s.coord.as_finite()?;
                let v = match which {
                    CurveSeries::Lower => Some(s.lower),
                    CurveSeries::Upper => Some(s.upper),
                    CurveSeries::Exact => s.exact,
                }?;
                Some((x, v))
            })
            .collect()
    }
}

/// Which of the three curve series a concavity check inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveSeries {
    Lower,
    Upper,
    Exact,
}

/// Discrete concavity check over finite-coordinate samples: true when every
/// interior second difference is at most 1e-9. Returns the first violating
/// sample index and its residual otherwise.
pub fn check_concavity(
    curve: &BoundCurve,
    which: CurveSeries,
) -> Result<(bool, Option<(usize, f64)>)> {
    let pts = curve.series(which);
    if pts.len() < 3 {
        return Err(Error::malformed(
            "concavity check needs at least 3 samples",
        ));
    }
    for i in 1..pts.len() - 1 {
        let (x0, v0) = pts[i - 1];
        let (x1, v1) = pts[i];
        let (x2, v2) = pts[i + 1];
        // slope must not increase; scaled by the step so uniform grids reduce
        // to the plain second difference v0 - 2 v1 + v2
        let s01 = (v1 - v0) / (x1 - x0);
        let s12 = (v2 - v1) / (x2 - x1);
        let residual = (s12 - s01) * (x1 - x0).min(x2 - x1);
        if residual > 1e-9 {
            return Ok((false, Some((i, residual))));
        }
    }
    Ok((true, None))
}
