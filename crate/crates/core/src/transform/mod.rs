//! The finite Hilbert transform `T`, its companion `T̂`, and the projection `P`.
//!
//! Spectral rules (`w = √(1-x²)`):
//! - `T(T_n / w) = U_{n-1}` for `n ≥ 1`, `T(1/w) = 0`
//! - `T(w U_m) = -T_{m+1} = -(U_{m+1} - U_{m-1})/2`
//! - `T̂ g = -(1/w) T(w g)`, so `T̂(U_m) = T_{m+1}/w`
//! - `P f = ((1/π) ∫ f) / w`
//!
//! Arbitrary inputs go through the principal-value quadrature in [`pv`];
//! grid functions use exact product integration of their interpolant.

pub mod calderon;
pub mod pv;

use serde::Serialize;

use crate::chebrep::{FunctionInput, GridFunction, NodeKind, SpectralFunction, WeightClass};
use crate::error::{Error, Result};
use crate::func::{integrate_fn, ScalarFn};
use crate::quad::QuadConfig;

pub use calderon::{calderon_domination, CalderonReport};
pub use pv::{pv_hat_value, pv_value, HatOf, Hilbert};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spectral,
    Quadrature,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TransformOutput {
    Spectral(SpectralFunction),
    Grid(GridFunction),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransformResult {
    pub method: Method,
    pub output: TransformOutput,
    /// Largest difference against an independent quadrature evaluation, if checked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_meta: Option<f64>,
}

impl TransformResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transform result serializes")
    }

    pub fn spectral(&self) -> Option<&SpectralFunction> {
        match &self.output {
            TransformOutput::Spectral(s) => Some(s),
            TransformOutput::Grid(_) => None,
        }
    }

    pub fn grid(&self) -> Option<&GridFunction> {
        match &self.output {
            TransformOutput::Grid(g) => Some(g),
            TransformOutput::Spectral(_) => None,
        }
    }
}

/// Coefficients of `T f`; the result is always a flat U-series.
pub fn hilbert_spectral(f: &SpectralFunction) -> SpectralFunction {
    let coeffs = match f.weight {
        WeightClass::InvSqrt => {
            if f.coeffs.len() > 1 {
                f.coeffs[1..].to_vec()
            } else {
                vec![0.0]
            }
        }
        WeightClass::Sqrt => {
            let mut out = vec![0.0; f.coeffs.len() + 1];
            for (m, &b) in f.coeffs.iter().enumerate() {
                out[m + 1] -= 0.5 * b;
                if m >= 1 {
                    out[m - 1] += 0.5 * b;
                }
            }
            out
        }
        WeightClass::Flat => unreachable!("checked by callers"),
    };
    SpectralFunction { weight: WeightClass::Flat, coeffs }
}

/// Coefficients of `T̂ g` for a flat U-series; the result is `InvSqrt` with zero mean.
pub fn hat_spectral(g: &SpectralFunction) -> Result<SpectralFunction> {
    if g.weight != WeightClass::Flat {
        return Err(Error::UnsupportedClass(format!("spectral T̂ needs a flat U-series, got {:?}", g.weight)));
    }
    let mut coeffs = Vec::with_capacity(g.coeffs.len() + 1);
    coeffs.push(0.0);
    coeffs.extend_from_slice(&g.coeffs);
    Ok(SpectralFunction { weight: WeightClass::InvSqrt, coeffs })
}

/// Spectral `T`. Flat U-series have no finite image in these classes.
pub fn fht_spectral(f: &SpectralFunction) -> Result<TransformResult> {
    if f.weight == WeightClass::Flat {
        return Err(Error::UnsupportedClass(
            "spectral T of a flat U-series leaves the weighted classes; use the quadrature path".into(),
        ));
    }
    Ok(TransformResult {
        method: Method::Spectral,
        output: TransformOutput::Spectral(hilbert_spectral(f)),
        residual_meta: None,
    })
}

/// Spectral `T̂` of a flat U-series.
pub fn fht_hat_spectral(g: &SpectralFunction) -> Result<TransformResult> {
    Ok(TransformResult {
        method: Method::Spectral,
        output: TransformOutput::Spectral(hat_spectral(g)?),
        residual_meta: None,
    })
}

/// Attach the largest discrepancy between a spectral result and quadrature at `xs`.
pub fn cross_check(
    input: &SpectralFunction,
    mut result: TransformResult,
    hat: bool,
    xs: &[f64],
    cfg: &QuadConfig,
) -> Result<TransformResult> {
    let out = result.spectral().ok_or_else(|| Error::Precondition("cross-check needs a spectral result".into()))?.clone();
    let mut worst: f64 = 0.0;
    for &x in xs {
        let q = if hat { pv_hat_value(input, x, cfg)? } else { pv_value(input, x, cfg)? };
        worst = worst.max((q - out.value(x)).abs());
    }
    result.residual_meta = Some(worst);
    Ok(result)
}

fn check_points(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Precondition("no evaluation points".into()));
    }
    if xs.iter().any(|&x| !(x > -1.0 && x < 1.0)) {
        return Err(Error::Domain("evaluation points must lie inside (-1, 1)".into()));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("evaluation points must be strictly increasing".into()));
    }
    Ok(())
}

fn grid_result(xs: &[f64], values: Vec<f64>) -> Result<TransformResult> {
    Ok(TransformResult {
        method: Method::Quadrature,
        output: TransformOutput::Grid(GridFunction::new(xs.to_vec(), values, NodeKind::Custom)?),
        residual_meta: None,
    })
}

/// `T f` at the points `xs` by principal-value quadrature.
pub fn fht_quadrature<F: ScalarFn + ?Sized>(f: &F, xs: &[f64], cfg: &QuadConfig) -> Result<TransformResult> {
    check_points(xs)?;
    let values = xs.iter().map(|&x| pv_value(f, x, cfg)).collect::<Result<Vec<_>>>()?;
    grid_result(xs, values)
}

/// `T̂ g` at the points `xs` by principal-value quadrature.
pub fn fht_hat_quadrature<G: ScalarFn + ?Sized>(g: &G, xs: &[f64], cfg: &QuadConfig) -> Result<TransformResult> {
    check_points(xs)?;
    let values = xs.iter().map(|&x| pv_hat_value(g, x, cfg)).collect::<Result<Vec<_>>>()?;
    grid_result(xs, values)
}

/// `T` of the piecewise-linear interpolant of a grid function, in closed form.
///
/// With knots `k_0 = -1 < … < k_{n+1} = 1` and slopes `σ_j`,
/// `π T f(x) = Σ σ_j Δ_j + f_n log(1-x) - f_0 log(1+x)
///            + Σ_{interior m} (σ_{m-1} - σ_m)(x - k_m) log|x - k_m|`.
pub fn hilbert_grid_value(g: &GridFunction, x: f64) -> f64 {
    let (knots, vals, slopes) = g.pieces();
    let n = knots.len() - 2;
    let mut s = 0.0;
    for j in 0..=n {
        s += slopes[j] * (knots[j + 1] - knots[j]);
    }
    s += vals[n + 1] * (1.0 - x).ln() - vals[0] * (1.0 + x).ln();
    for m in 1..=n {
        let d = x - knots[m];
        if d != 0.0 {
            s += (slopes[m - 1] - slopes[m]) * d * d.abs().ln();
        }
    }
    s / std::f64::consts::PI
}

/// `T` of a grid function at `xs` (defaults to its own nodes).
pub fn fht_grid(g: &GridFunction, xs: Option<&[f64]>) -> Result<TransformResult> {
    let xs = xs.unwrap_or(&g.nodes);
    check_points(xs)?;
    grid_result(xs, xs.iter().map(|&x| hilbert_grid_value(g, x)).collect())
}

/// `T` of a parsed input by the requested method.
pub fn fht(input: &FunctionInput, method: Method, xs: Option<&[f64]>, cfg: &QuadConfig) -> Result<TransformResult> {
    match (input, method) {
        (FunctionInput::Spectral(s), Method::Spectral) => fht_spectral(s),
        (FunctionInput::Spectral(s), Method::Quadrature) => {
            let xs = xs.ok_or_else(|| Error::Precondition("quadrature needs evaluation points".into()))?;
            fht_quadrature(s, xs, cfg)
        }
        (FunctionInput::Grid(_), Method::Spectral) => {
            Err(Error::UnsupportedClass("grid input has no spectral representation; fit it first".into()))
        }
        (FunctionInput::Grid(g), Method::Quadrature) => fht_grid(g, xs),
    }
}

/// `T̂` of a parsed input by the requested method.
pub fn fht_hat(input: &FunctionInput, method: Method, xs: Option<&[f64]>, cfg: &QuadConfig) -> Result<TransformResult> {
    match (input, method) {
        (FunctionInput::Spectral(s), Method::Spectral) => fht_hat_spectral(s),
        (FunctionInput::Spectral(s), Method::Quadrature) => {
            let xs = xs.ok_or_else(|| Error::Precondition("quadrature needs evaluation points".into()))?;
            fht_hat_quadrature(s, xs, cfg)
        }
        (FunctionInput::Grid(_), Method::Spectral) => {
            Err(Error::UnsupportedClass("grid input has no spectral representation; fit it first".into()))
        }
        (FunctionInput::Grid(g), Method::Quadrature) => fht_hat_quadrature(g, xs.unwrap_or(&g.nodes), cfg),
    }
}

/// Mean `(1/π) ∫ f` of a spectral function, exactly.
pub fn spectral_mean(f: &SpectralFunction) -> f64 {
    match f.weight {
        WeightClass::InvSqrt => f.coeffs[0],
        // ∫ √(1-x²) U_n = (π/2) δ_{n0}
        WeightClass::Sqrt => 0.5 * f.coeffs[0],
        // ∫ U_n = 2/(n+1) for even n
        WeightClass::Flat => {
            f.coeffs.iter().enumerate().step_by(2).map(|(n, b)| 2.0 * b / (n + 1) as f64).sum::<f64>()
                / std::f64::consts::PI
        }
    }
}

/// `P f = ((1/π)∫f)/√(1-x²)`, as an `InvSqrt` series with one coefficient.
pub fn project_p(input: &FunctionInput, cfg: &QuadConfig) -> SpectralFunction {
    let mean = match input {
        FunctionInput::Spectral(s) => spectral_mean(s),
        FunctionInput::Grid(g) => integrate_fn(g, -1.0, 1.0, cfg) / std::f64::consts::PI,
    };
    SpectralFunction { weight: WeightClass::InvSqrt, coeffs: vec![mean] }
}

/// `P f` for any function, by quadrature.
pub fn project_p_fn<F: ScalarFn + ?Sized>(f: &F, cfg: &QuadConfig) -> SpectralFunction {
    let mean = integrate_fn(f, -1.0, 1.0, cfg) / std::f64::consts::PI;
    SpectralFunction { weight: WeightClass::InvSqrt, coeffs: vec![mean] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn u(n: usize, x: f64) -> f64 {
        crate::chebrep::clenshaw_u(&[vec![0.0; n], vec![1.0]].concat(), x)
    }

    #[test]
    fn spectral_rules_against_quadrature() {
        let cfg = QuadConfig::default();
        for n in 0..6 {
            let mut c = vec![0.0; n + 1];
            c[n] = 1.0;
            let f = SpectralFunction::new(WeightClass::InvSqrt, c).unwrap();
            let tf = hilbert_spectral(&f);
            for &x in &[-0.95, -0.4, 0.1, 0.77] {
                let q = pv_value(&f, x, &cfg).unwrap();
                let want = if n == 0 { 0.0 } else { u(n - 1, x) };
                assert!((q - want).abs() < 1e-11, "n={n} x={x}: {q} vs {want}");
                assert!((tf.value(x) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sqrt_weight_maps_to_minus_x() {
        let f = SpectralFunction::new(WeightClass::Sqrt, vec![1.0]).unwrap();
        let t = fht_spectral(&f).unwrap();
        assert_eq!(t.spectral().unwrap().coeffs, vec![0.0, -0.5]);
        for &x in &[-0.5, 0.0, 0.9] {
            assert!((pv_value(&f, x, &QuadConfig::default()).unwrap() + x).abs() < 1e-12);
        }
    }

    #[test]
    fn hat_matches_quadrature() {
        let g = SpectralFunction::new(WeightClass::Flat, vec![0.3, -1.0, 0.5]).unwrap();
        let h = hat_spectral(&g).unwrap();
        for &x in &[-0.9, 0.0, 0.6] {
            let q = pv_hat_value(&g, x, &QuadConfig::default()).unwrap();
            assert!((q - h.value(x)).abs() < 1e-11, "{q} vs {}", h.value(x));
        }
    }

    #[test]
    fn flat_input_is_unsupported_spectrally() {
        let g = SpectralFunction::new(WeightClass::Flat, vec![1.0]).unwrap();
        assert!(matches!(fht_spectral(&g), Err(Error::UnsupportedClass(_))));
        let f = SpectralFunction::new(WeightClass::InvSqrt, vec![1.0]).unwrap();
        assert!(matches!(hat_spectral(&f), Err(Error::UnsupportedClass(_))));
    }

    #[test]
    fn grid_closed_form_agrees_with_quadrature() {
        let g = GridFunction::new(vec![-0.6, -0.1, 0.3, 0.8], vec![1.0, -0.5, 2.0, 0.25], NodeKind::Custom).unwrap();
        let cfg = QuadConfig::default();
        for &x in &[-0.9, -0.6, -0.35, 0.3, 0.55, 0.97] {
            let exact = hilbert_grid_value(&g, x);
            let q = pv_value(&g, x, &cfg).unwrap();
            assert!((exact - q).abs() < 1e-11, "x={x}: {exact} vs {q}");
        }
    }

    #[test]
    fn means_are_exact() {
        let cfg = QuadConfig::default();
        for w in [WeightClass::InvSqrt, WeightClass::Flat, WeightClass::Sqrt] {
            let f = SpectralFunction::new(w, vec![0.7, 0.2, -1.1, 0.4]).unwrap();
            let q = integrate_fn(&f, -1.0, 1.0, &cfg) / PI;
            assert!((spectral_mean(&f) - q).abs() < 1e-12, "{w:?}");
        }
    }
}
