//! Weighted Chebyshev series and sampled grid functions.
//!
//! A [`SpectralFunction`] is `prefactor(x) · Σ c_n B_n(x)` where the basis
//! and prefactor are fixed by the [`WeightClass`]:
//!
//! | class     | prefactor     | basis |
//! |-----------|---------------|-------|
//! | `InvSqrt` | `1/√(1-x²)`   | `T_n` |
//! | `Flat`    | `1`           | `U_n` |
//! | `Sqrt`    | `√(1-x²)`     | `U_n` |
//!
//! These are the classes on which the transform acts diagonally.
//! A [`GridFunction`] holds samples on strictly increasing interior nodes and
//! is read as the piecewise-linear interpolant, extended by constants to ±1.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::{sqrt_weight_near, Feature, ScalarFn};
use crate::quad::{QuadratureRule, RuleKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightClass {
    InvSqrt,
    #[serde(rename = "flat_u")]
    Flat,
    #[serde(rename = "sqrt_u")]
    Sqrt,
}

impl WeightClass {
    /// Node family on which `fit` is exact for this class.
    pub fn node_kind(self) -> NodeKind {
        match self {
            WeightClass::InvSqrt => NodeKind::ChebyshevT,
            WeightClass::Flat | WeightClass::Sqrt => NodeKind::ChebyshevU,
        }
    }

    pub fn prefactor(self, x: f64) -> f64 {
        self.prefactor_near(x, 0.0)
    }

    fn prefactor_near(self, anchor: f64, offset: f64) -> f64 {
        match self {
            WeightClass::Flat => 1.0,
            WeightClass::Sqrt => sqrt_weight_near(anchor, offset),
            WeightClass::InvSqrt => 1.0 / sqrt_weight_near(anchor, offset),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralFunction {
    pub weight: WeightClass,
    pub coeffs: Vec<f64>,
}

impl SpectralFunction {
    pub fn new(weight: WeightClass, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("a spectral function needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Data("non-finite coefficient".into()));
        }
        Ok(Self { weight, coeffs })
    }

    pub fn zero(weight: WeightClass) -> Self {
        Self { weight, coeffs: vec![0.0] }
    }

    /// Polynomial part `Σ c_n B_n(x)`, without the prefactor.
    pub fn series(&self, x: f64) -> f64 {
        match self.weight {
            WeightClass::InvSqrt => clenshaw_t(&self.coeffs, x),
            WeightClass::Flat | WeightClass::Sqrt => clenshaw_u(&self.coeffs, x),
        }
    }

    /// Values at points strictly inside (-1, 1).
    pub fn evaluate(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter()
            .map(|&x| {
                check_interior(x)?;
                Ok(self.value(x))
            })
            .collect()
    }

    /// Same function in the `InvSqrt` representation, when it has one.
    ///
    /// `(1-x²) U_m = (T_m - T_{m+2}) / 2`, so a `Sqrt` series converts exactly.
    pub fn to_inv_sqrt(&self) -> Result<SpectralFunction> {
        match self.weight {
            WeightClass::InvSqrt => Ok(self.clone()),
            WeightClass::Sqrt => {
                let mut a = vec![0.0; self.coeffs.len() + 2];
                for (m, &b) in self.coeffs.iter().enumerate() {
                    a[m] += 0.5 * b;
                    a[m + 2] -= 0.5 * b;
                }
                Ok(SpectralFunction { weight: WeightClass::InvSqrt, coeffs: a })
            }
            WeightClass::Flat => Err(Error::UnsupportedClass(
                "a flat U-series has no finite InvSqrt expansion".into(),
            )),
        }
    }

    /// Coefficient-wise sum; both operands must share a weight class.
    pub fn add(&self, other: &SpectralFunction) -> Result<SpectralFunction> {
        if self.weight != other.weight {
            return Err(Error::Precondition("weight classes differ".into()));
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&0.0) + other.coeffs.get(i).unwrap_or(&0.0))
            .collect();
        Ok(SpectralFunction { weight: self.weight, coeffs })
    }

    pub fn scale(&self, s: f64) -> SpectralFunction {
        SpectralFunction { weight: self.weight, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: SpectralFunction = serde_json::from_str(text)?;
        SpectralFunction::new(f.weight, f.coeffs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spectral function serializes")
    }
}

impl ScalarFn for SpectralFunction {
    fn value(&self, x: f64) -> f64 {
        self.weight.prefactor(x) * self.series(x)
    }

    fn value_near(&self, anchor: f64, offset: f64) -> f64 {
        self.weight.prefactor_near(anchor, offset) * self.series(anchor + offset)
    }

    fn features(&self) -> Vec<Feature> {
        match self.weight {
            WeightClass::Flat => Vec::new(),
            _ => vec![Feature::singular(-1.0), Feature::singular(1.0)],
        }
    }
}

/// `Σ a_n T_n(x)` by Clenshaw's recurrence.
pub fn clenshaw_t(a: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in a.iter().skip(1).rev() {
        let b0 = c + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    a.first().copied().unwrap_or(0.0) + x * b1 - b2
}

/// `Σ b_n U_n(x)` by Clenshaw's recurrence.
pub fn clenshaw_u(b: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in b.iter().rev() {
        let b0 = c + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    b1
}

fn check_interior(x: f64) -> Result<()> {
    if x.is_finite() && x > -1.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("point {x} is not inside (-1, 1)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    /// Zeros of `T_n`.
    ChebyshevT,
    /// Zeros of `U_n`.
    ChebyshevU,
    #[default]
    Custom,
}

/// Chebyshev–Gauss nodes of the given family, increasing.
pub fn chebyshev_nodes(kind: NodeKind, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Precondition("node count must be positive".into()));
    }
    match kind {
        NodeKind::ChebyshevT => Ok(QuadratureRule::new(RuleKind::ChebyshevT, n).nodes),
        NodeKind::ChebyshevU => Ok(QuadratureRule::new(RuleKind::ChebyshevU, n).nodes),
        NodeKind::Custom => Err(Error::Precondition("custom nodes are not generated".into())),
    }
}

fn is_custom(k: &NodeKind) -> bool {
    *k == NodeKind::Custom
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "is_custom")]
    pub node_kind: NodeKind,
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, node_kind: NodeKind) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return Err(Error::Precondition(format!(
                "nodes ({}) and values ({}) must be non-empty and of equal length",
                nodes.len(),
                values.len()
            )));
        }
        for &x in &nodes {
            check_interior(x)?;
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("nodes must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite sample value".into()));
        }
        Ok(Self { nodes, values, node_kind })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: GridFunction = serde_json::from_str(text)?;
        GridFunction::new(g.nodes, g.values, g.node_kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid function serializes")
    }

    /// Two-column `node,value` CSV; a header row is optional.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let (mut nodes, mut values) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Parse(format!("row {} has fewer than two columns", i + 1)));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(v)) => {
                    nodes.push(x);
                    values.push(v);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::Parse(format!("row {} is not numeric", i + 1))),
            }
        }
        GridFunction::new(nodes, values, NodeKind::Custom)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["node", "value"]).expect("in-memory write");
        for (x, v) in self.nodes.iter().zip(&self.values) {
            w.write_record([csv_number(*x), csv_number(*v)]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv")
    }

    /// Piecewise-linear interpolant with constant extension to ±1.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.nodes.len();
        if x <= self.nodes[0] {
            return self.values[0];
        }
        if x >= self.nodes[n - 1] {
            return self.values[n - 1];
        }
        let j = self.nodes.partition_point(|&p| p <= x);
        let (x0, x1) = (self.nodes[j - 1], self.nodes[j]);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    /// Knots `-1, nodes.., 1` with the value at each knot and the slope of
    /// each piece between consecutive knots.
    pub(crate) fn pieces(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.nodes.len();
        let mut knots = Vec::with_capacity(n + 2);
        let mut vals = Vec::with_capacity(n + 2);
        knots.push(-1.0);
        vals.push(self.values[0]);
        knots.extend_from_slice(&self.nodes);
        vals.extend_from_slice(&self.values);
        knots.push(1.0);
        vals.push(self.values[n - 1]);
        let slopes = (0..=n)
            .map(|j| if j == 0 || j == n { 0.0 } else { (vals[j + 1] - vals[j]) / (knots[j + 1] - knots[j]) })
            .collect();
        (knots, vals, slopes)
    }
}

impl ScalarFn for GridFunction {
    fn value(&self, x: f64) -> f64 {
        self.interpolate(x)
    }

    fn features(&self) -> Vec<Feature> {
        self.nodes.iter().map(|&x| Feature::brk(x)).collect()
    }

    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        Some(self.piecewise_integral(a, b, false))
    }

    fn abs_integral(&self, a: f64, b: f64) -> Option<f64> {
        Some(self.piecewise_integral(a, b, true))
    }
}

impl GridFunction {
    fn piecewise_integral(&self, a: f64, b: f64, abs: bool) -> f64 {
        let (knots, _, _) = self.pieces();
        let mut total = 0.0;
        for w in knots.windows(2) {
            let lo = w[0].max(a);
            let hi = w[1].min(b);
            if hi <= lo {
                continue;
            }
            let (fl, fh) = (self.interpolate(lo), self.interpolate(hi));
            total += if abs { abs_trapezoid(fl, fh, hi - lo) } else { 0.5 * (fl + fh) * (hi - lo) };
        }
        total
    }
}

/// `∫ |linear|` over an interval of length `h` with end values `a`, `b`.
fn abs_trapezoid(a: f64, b: f64, h: f64) -> f64 {
    if a * b >= 0.0 {
        0.5 * (a.abs() + b.abs()) * h
    } else {
        0.5 * h * (a * a + b * b) / (a.abs() + b.abs())
    }
}

/// Samples of `f` at `nodes`.
pub fn to_grid<F: ScalarFn + ?Sized>(f: &F, nodes: &[f64], kind: NodeKind) -> Result<GridFunction> {
    let values = nodes
        .iter()
        .map(|&x| {
            check_interior(x)?;
            Ok(f.value(x))
        })
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(nodes.to_vec(), values, kind)
}

/// Samples at the `n` Chebyshev–Gauss nodes on which `fit` for `weight` is exact.
pub fn sample_for_fit<F: ScalarFn + ?Sized>(f: &F, weight: WeightClass, n: usize) -> Result<GridFunction> {
    let kind = weight.node_kind();
    to_grid(f, &chebyshev_nodes(kind, n)?, kind)
}

/// Interpolating series of the given class through Chebyshev–Gauss samples.
///
/// With `n` samples the result has `n` coefficients and reproduces any series
/// of that class with at most `n` coefficients.
pub fn fit(samples: &GridFunction, weight: WeightClass) -> Result<SpectralFunction> {
    let want = weight.node_kind();
    if samples.node_kind != want {
        return Err(Error::Precondition(format!(
            "fit for {weight:?} needs {want:?} nodes, got {:?}",
            samples.node_kind
        )));
    }
    let n = samples.nodes.len();
    let expected = chebyshev_nodes(want, n)?;
    if expected.iter().zip(&samples.nodes).any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(Error::Precondition("sample nodes are not Chebyshev–Gauss nodes".into()));
    }
    // Nodes are stored increasing; θ_k runs the other way.
    let coeffs = match want {
        NodeKind::ChebyshevT => {
            let h: Vec<(f64, f64)> = (0..n)
                .map(|k| {
                    let th = (2 * k + 1) as f64 * PI / (2 * n) as f64;
                    let i = n - 1 - k;
                    (th, samples.values[i] / weight.prefactor(samples.nodes[i]))
                })
                .collect();
            (0..n)
                .map(|m| {
                    let s: f64 = h.iter().map(|(th, v)| v * (m as f64 * th).cos()).sum();
                    s * if m == 0 { 1.0 } else { 2.0 } / n as f64
                })
                .collect()
        }
        NodeKind::ChebyshevU => {
            let step = PI / (n + 1) as f64;
            let h: Vec<(f64, f64)> = (1..=n)
                .map(|k| {
                    let th = k as f64 * step;
                    let i = n - k;
                    (th, samples.values[i] / weight.prefactor(samples.nodes[i]) * th.sin())
                })
                .collect();
            (0..n)
                .map(|m| {
                    let s: f64 = h.iter().map(|(th, v)| v * ((m + 1) as f64 * th).sin()).sum();
                    2.0 * s / (n + 1) as f64
                })
                .collect()
        }
        NodeKind::Custom => unreachable!(),
    };
    SpectralFunction::new(weight, coeffs)
}

/// Shortest round-trip form, in exponent notation for very small or large magnitudes.
pub(crate) fn csv_number(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

/// Either representation, as read from a file.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionInput {
    Spectral(SpectralFunction),
    Grid(GridFunction),
}

impl FunctionInput {
    /// JSON spectral (`weight`/`coeffs`), JSON grid (`nodes`/`values`), or CSV.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(trimmed)?;
            if v.get("weight").is_some() {
                return Ok(FunctionInput::Spectral(SpectralFunction::from_json(trimmed)?));
            }
            if v.get("nodes").is_some() {
                return Ok(FunctionInput::Grid(GridFunction::from_json(trimmed)?));
            }
            return Err(Error::Parse("JSON input needs either weight/coeffs or nodes/values".into()));
        }
        Ok(FunctionInput::Grid(GridFunction::from_csv(text.as_bytes())?))
    }

    pub fn read(path: &Path) -> Result<Self> {
        FunctionInput::parse(&std::fs::read_to_string(path)?)
    }

    pub fn as_scalar(&self) -> &dyn ScalarFn {
        match self {
            FunctionInput::Spectral(s) => s,
            FunctionInput::Grid(g) => g,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t_n(n: usize, x: f64) -> f64 {
        (n as f64 * x.acos()).cos()
    }
    fn u_n(n: usize, x: f64) -> f64 {
        let th = x.acos();
        ((n + 1) as f64 * th).sin() / th.sin()
    }

    #[test]
    fn clenshaw_matches_trigonometric_definitions() {
        let c = [0.3, -1.2, 0.7, 2.0, -0.5];
        for &x in &[-0.93, -0.2, 0.0, 0.41, 0.88] {
            let t: f64 = c.iter().enumerate().map(|(n, a)| a * t_n(n, x)).sum();
            let u: f64 = c.iter().enumerate().map(|(n, a)| a * u_n(n, x)).sum();
            assert!((clenshaw_t(&c, x) - t).abs() < 1e-13);
            assert!((clenshaw_u(&c, x) - u).abs() < 1e-13);
        }
    }

    #[test]
    fn prefactors_follow_class() {
        let x = 0.6;
        let one = |w| SpectralFunction::new(w, vec![1.0]).unwrap().evaluate(&[x]).unwrap()[0];
        assert!((one(WeightClass::InvSqrt) - 1.25).abs() < 1e-15);
        assert!((one(WeightClass::Sqrt) - 0.8).abs() < 1e-15);
        assert_eq!(one(WeightClass::Flat), 1.0);
    }

    #[test]
    fn evaluate_rejects_endpoints() {
        let f = SpectralFunction::new(WeightClass::Flat, vec![1.0]).unwrap();
        assert!(matches!(f.evaluate(&[1.0]), Err(Error::Domain(_))));
        assert!(matches!(f.evaluate(&[-1.5]), Err(Error::Domain(_))));
    }

    #[test]
    fn fit_recovers_each_class() {
        for w in [WeightClass::InvSqrt, WeightClass::Flat, WeightClass::Sqrt] {
            let f = SpectralFunction::new(w, vec![0.5, -1.0, 0.25, 3.0]).unwrap();
            let g = sample_for_fit(&f, w, 4).unwrap();
            let back = fit(&g, w).unwrap();
            for (a, b) in back.coeffs.iter().zip(&f.coeffs) {
                assert!((a - b).abs() < 1e-13, "{w:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn fit_requires_matching_nodes() {
        let f = SpectralFunction::new(WeightClass::Flat, vec![1.0]).unwrap();
        let g = sample_for_fit(&f, WeightClass::Flat, 3).unwrap();
        assert!(matches!(fit(&g, WeightClass::InvSqrt), Err(Error::Precondition(_))));
        let custom = GridFunction::new(vec![-0.5, 0.0, 0.5], vec![1.0; 3], NodeKind::Custom).unwrap();
        assert!(fit(&custom, WeightClass::Flat).is_err());
    }

    #[test]
    fn sqrt_class_converts_to_inv_sqrt() {
        let f = SpectralFunction::new(WeightClass::Sqrt, vec![1.0, 0.5, -2.0]).unwrap();
        let g = f.to_inv_sqrt().unwrap();
        for &x in &[-0.9, -0.1, 0.3, 0.99] {
            assert!((f.value(x) - g.value(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(GridFunction::new(vec![0.1, 0.0], vec![1.0, 2.0], NodeKind::Custom).is_err());
        assert!(GridFunction::new(vec![0.1], vec![1.0, 2.0], NodeKind::Custom).is_err());
        assert!(GridFunction::new(vec![1.0], vec![1.0], NodeKind::Custom).is_err());
        assert!(GridFunction::new(vec![0.0], vec![f64::NAN], NodeKind::Custom).is_err());
    }

    #[test]
    fn grid_integrals_are_exact_for_linear_pieces() {
        let g = GridFunction::new(vec![-0.5, 0.5], vec![-1.0, 1.0], NodeKind::Custom).unwrap();
        // -1 on [-1,-0.5], linear through 0, 1 on [0.5, 1]
        assert!(g.integral(-1.0, 1.0).unwrap().abs() < 1e-15);
        assert!((g.abs_integral(-1.0, 1.0).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn json_and_csv_round_trip() {
        let f = SpectralFunction::new(WeightClass::Sqrt, vec![1.0, 2.5]).unwrap();
        assert_eq!(f.to_json(), r#"{"weight":"sqrt_u","coeffs":[1.0,2.5]}"#);
        assert_eq!(SpectralFunction::from_json(&f.to_json()).unwrap(), f);
        let g = GridFunction::new(vec![-0.5, 0.25], vec![3.0, -1.0], NodeKind::Custom).unwrap();
        assert_eq!(g.to_json(), r#"{"nodes":[-0.5,0.25],"values":[3.0,-1.0]}"#);
        assert_eq!(GridFunction::from_csv(g.to_csv().as_bytes()).unwrap(), g);
        assert_eq!(GridFunction::from_csv("-0.5,3\n0.25,-1\n".as_bytes()).unwrap(), g);
        assert!(matches!(FunctionInput::parse(&f.to_json()).unwrap(), FunctionInput::Spectral(_)));
    }
}
