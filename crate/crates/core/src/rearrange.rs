//! Decreasing rearrangements and rearrangement-invariant norms on (-1, 1).
//!
//! A [`RearrangementProfile`] is a step function on `(0, 2)`:
//! `f*(t) = levels[i]` for `t ∈ (t_i, t_{i+1}]`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::func::{integrate_abs_pow, ScalarFn};
use crate::quad::{integrate, Breakpoint, Grade, QuadConfig};

/// Total measure of (-1, 1).
pub const MEASURE: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RearrangementProfile {
    pub breakpoints: Vec<f64>,
    pub levels: Vec<f64>,
}

impl RearrangementProfile {
    /// Profile of a step function taking `|values[i]|` on a set of measure `weights[i]`.
    pub fn from_weighted(values: &[f64], weights: &[f64]) -> Result<Self> {
        if values.len() != weights.len() || values.is_empty() {
            return Err(Error::Precondition("values and weights must be non-empty and equal length".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite value in rearrangement input".into()));
        }
        let mut pairs: Vec<(f64, f64)> = values.iter().map(|v| v.abs()).zip(weights.iter().copied()).collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let total: f64 = weights.iter().sum();
        let mut breakpoints = Vec::with_capacity(pairs.len() + 1);
        breakpoints.push(0.0);
        let mut acc = 0.0;
        for (_, w) in &pairs {
            acc += w;
            breakpoints.push(acc * MEASURE / total);
        }
        *breakpoints.last_mut().expect("non-empty") = MEASURE;
        Ok(Self { breakpoints, levels: pairs.into_iter().map(|p| p.0).collect() })
    }

    /// Profile of `|values|` on equal cells covering (-1, 1).
    pub fn from_cells(values: &[f64]) -> Result<Self> {
        let w = vec![MEASURE / values.len().max(1) as f64; values.len()];
        Self::from_weighted(values, &w)
    }

    pub fn constant(level: f64) -> Self {
        Self { breakpoints: vec![0.0, MEASURE], levels: vec![level.abs()] }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { breakpoints: self.breakpoints.clone(), levels: self.levels.iter().map(|l| l * c.abs()).collect() }
    }

    /// `f*(t)`, right-closed steps; zero beyond the profile.
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.levels.first().copied().unwrap_or(0.0);
        }
        let i = self.breakpoints.partition_point(|&b| b < t);
        if i == 0 || i > self.levels.len() {
            return 0.0;
        }
        self.levels[i - 1]
    }

    /// `∫_0^t f*`.
    pub fn integral_to(&self, t: f64) -> f64 {
        let mut s = 0.0;
        for (i, &l) in self.levels.iter().enumerate() {
            let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
            if a >= t {
                break;
            }
            s += l * (b.min(t) - a);
        }
        s
    }

    pub fn l1(&self) -> f64 {
        self.integral_to(MEASURE)
    }

    /// `‖f‖_{L log L} = ∫_0^2 f*(t) log(2e/t) dt`, exact on steps.
    pub fn llogl(&self) -> f64 {
        self.weighted_sum(phi1)
    }

    /// `∫_0^2 f*(t) log^α(2e/t) dt`, `α ≥ 1`.
    ///
    /// Integer `α` uses the antiderivative recurrence
    /// `Φ_α(t) = t L^α + α Φ_{α-1}(t)`, `L = log(2e/t)`; other `α` integrate each step numerically.
    pub fn llogl_alpha(&self, alpha: f64) -> Result<f64> {
        if alpha.is_nan() || alpha < 1.0 {
            return Err(Error::Precondition(format!("log exponent must be at least 1, got {alpha}")));
        }
        if alpha.fract() == 0.0 && alpha <= 64.0 {
            let k = alpha as u32;
            return Ok(self.weighted_sum(|t| phi_int(k, t)));
        }
        let cfg = QuadConfig::default();
        let mut s = 0.0;
        for (i, &l) in self.levels.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
            let grade = if a == 0.0 { Grade::Singular } else { Grade::Smooth };
            let f = |anchor: f64, off: f64| (2.0 * std::f64::consts::E / (anchor + off)).ln().powf(alpha);
            s += l * integrate(&f, &[Breakpoint::new(a, grade), Breakpoint::new(b, Grade::Smooth)], &cfg);
        }
        Ok(s)
    }

    pub fn lp(&self, p: f64) -> Result<f64> {
        check_p(p)?;
        let s: f64 = self.levels.iter().zip(self.breakpoints.windows(2)).map(|(l, w)| l.powf(p) * (w[1] - w[0])).sum();
        Ok(s.powf(1.0 / p))
    }

    /// `sup_t t^{1/p} f*(t)`, attained at right ends of steps.
    pub fn weak_quasi(&self, p: f64) -> Result<f64> {
        check_p(p)?;
        Ok(self
            .levels
            .iter()
            .zip(&self.breakpoints[1..])
            .map(|(l, t)| t.powf(1.0 / p) * l)
            .fold(0.0, f64::max))
    }

    /// Calderón operator `S(f*)(t) = (1/t)∫_0^t f* + ∫_t^2 f*(s)/s ds`.
    pub fn calderon(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < MEASURE) {
            return Err(Error::Domain(format!("Calderón argument {t} is not in (0, 2)")));
        }
        let mut tail = 0.0;
        for (i, &l) in self.levels.iter().enumerate() {
            let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
            if b <= t {
                continue;
            }
            tail += l * (b / a.max(t)).ln();
        }
        Ok(self.integral_to(t) / t + tail)
    }

    fn weighted_sum(&self, phi: impl Fn(f64) -> f64) -> f64 {
        let mut prev = 0.0;
        let mut s = 0.0;
        for (i, &l) in self.levels.iter().enumerate() {
            let next = phi(self.breakpoints[i + 1]);
            s += l * (next - prev);
            prev = next;
        }
        s
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("exponent p must be at least 1, got {p}")))
    }
}

/// `Φ(t) = ∫_0^t log(2e/s) ds = t log(2e/t) + t`.
pub fn phi1(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * (2.0 * std::f64::consts::E / t).ln() + t
    }
}

fn phi_int(k: u32, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let l = (2.0 * std::f64::consts::E / t).ln();
    let mut phi = t;
    for j in 1..=k {
        phi = t * l.powi(j as i32) + j as f64 * phi;
    }
    phi
}

/// Cell-mean rearrangement of `|f|` on `resolution` equal cells.
///
/// Cell means are integrated with grading toward singular features, so the
/// profile is the exact rearrangement of the conditional expectation of `|f|`
/// on the cells and preserves `∫|f|`.
pub fn rearrangement<F: ScalarFn + ?Sized>(f: &F, resolution: usize) -> Result<RearrangementProfile> {
    check_resolution(resolution)?;
    let h = MEASURE / resolution as f64;
    let cfg = QuadConfig::default();
    let means: Vec<f64> = (0..resolution)
        .into_par_iter()
        .map(|i| {
            let a = -1.0 + i as f64 * h;
            let b = if i + 1 == resolution { 1.0 } else { -1.0 + (i + 1) as f64 * h };
            integrate_abs_pow(f, 1.0, a, b, &cfg) / (b - a)
        })
        .collect();
    if let Some(i) = means.iter().position(|m| !m.is_finite()) {
        return Err(Error::Data(format!("cell {i} has a non-finite mean")));
    }
    RearrangementProfile::from_cells(&means)
}

/// Rearrangement from cell-midpoint samples of `|f|`.
pub fn rearrangement_sampled<F: ScalarFn + ?Sized>(f: &F, resolution: usize) -> Result<RearrangementProfile> {
    check_resolution(resolution)?;
    let values = midpoint_samples(f, resolution);
    if let Some(i) = values.iter().position(|m| !m.is_finite()) {
        return Err(Error::Data(format!("sample {i} is not finite")));
    }
    RearrangementProfile::from_cells(&values)
}

/// Values at the midpoints of `n` equal cells of (-1, 1).
pub fn midpoint_samples<F: ScalarFn + ?Sized>(f: &F, n: usize) -> Vec<f64> {
    let h = MEASURE / n as f64;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (-1.0 + i as f64 * h, -1.0 + (i + 1) as f64 * h);
            if i < n / 2 {
                f.value_near(-1.0, (a + 1.0) + 0.5 * h)
            } else {
                f.value_near(1.0, (b - 1.0) - 0.5 * h)
            }
        })
        .collect()
}

fn check_resolution(n: usize) -> Result<()> {
    if n >= 8 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("resolution must be at least 8, got {n}")))
    }
}

/// A rearrangement-invariant functional.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Space {
    L1,
    /// `L (log L)^α`.
    LLogL(f64),
    Lp(f64),
    Weak(f64),
}

impl Space {
    pub fn key(&self) -> String {
        match self {
            Space::L1 => "l1".into(),
            Space::LLogL(a) if *a == 1.0 => "llogl".into(),
            Space::LLogL(a) if *a == 2.0 => "lloglsq".into(),
            Space::LLogL(a) => format!("llogl:{a}"),
            Space::Lp(p) => format!("lp:{p}"),
            Space::Weak(p) => format!("weak:{p}"),
        }
    }

    /// Parses `l1`, `llogl`, `lloglsq`, `llogl:α`, `lp:p`, `weak:p`.
    pub fn parse(s: &str) -> Result<Space> {
        let s = s.trim();
        let num = |v: &str| v.parse::<f64>().map_err(|_| Error::Parse(format!("bad number in space '{s}'")));
        let space = match s.split_once(':') {
            None => match s {
                "l1" => Space::L1,
                "llogl" => Space::LLogL(1.0),
                "lloglsq" => Space::LLogL(2.0),
                _ => return Err(Error::Parse(format!("unknown space '{s}' (l1, llogl, lloglsq, llogl:a, lp:p, weak:p)"))),
            },
            Some(("llogl", a)) => Space::LLogL(num(a)?),
            Some(("lp", p)) => Space::Lp(num(p)?),
            Some(("weak", p)) => Space::Weak(num(p)?),
            _ => return Err(Error::Parse(format!("unknown space '{s}'"))),
        };
        Ok(space)
    }

    pub fn eval(&self, profile: &RearrangementProfile) -> Result<f64> {
        match *self {
            Space::L1 => Ok(profile.l1()),
            Space::LLogL(1.0) => Ok(profile.llogl()),
            Space::LLogL(a) => profile.llogl_alpha(a),
            Space::Lp(p) => profile.lp(p),
            Space::Weak(p) => profile.weak_quasi(p),
        }
    }
}

/// One functional at two resolutions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormEntry {
    pub value: f64,
    pub coarse_value: f64,
    /// Grew by more than the growth tolerance from the coarse to the fine resolution.
    pub growing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub resolution: usize,
    pub coarse_resolution: usize,
    pub norms: BTreeMap<String, NormEntry>,
}

impl NormReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("norm report serializes")
    }

    pub fn value(&self, space: Space) -> Option<f64> {
        self.norms.get(&space.key()).map(|e| e.value)
    }
}

/// Relative growth from coarse to fine treated as evidence of divergence.
pub const GROWTH_RTOL: f64 = 0.01;

/// Norms of `f` at `resolution` and `resolution / 2`.
pub fn norm_report<F: ScalarFn + ?Sized>(f: &F, spaces: &[Space], resolution: usize) -> Result<NormReport> {
    let coarse_resolution = resolution / 2;
    let fine = rearrangement(f, resolution)?;
    let coarse = rearrangement(f, coarse_resolution)?;
    let mut norms = BTreeMap::new();
    for s in spaces {
        let value = s.eval(&fine)?;
        let coarse_value = s.eval(&coarse)?;
        let growing = value > coarse_value * (1.0 + GROWTH_RTOL) && value - coarse_value > 1e-12;
        norms.insert(s.key(), NormEntry { value, coarse_value, growing });
    }
    Ok(NormReport { resolution, coarse_resolution, norms })
}
