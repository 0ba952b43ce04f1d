//! Parseval, Poincaré–Bertrand and inversion round-trip suites.

use rand::Rng;
use rayon::prelude::*;

use crate::catalog::{random_spectral, rng, TestFn};
use crate::chebrep::{chebyshev_nodes, fit, GridFunction, NodeKind, SpectralFunction, WeightClass};
use crate::error::{Error, Result};
use crate::func::{integrate_abs_pow, Product, ScalarFn, Sum};
use crate::inversion::{parseval_residual, solve_airfoil_quadrature, Coefficient, Operand};
use crate::quad::QuadConfig;
use crate::transform::{hat_spectral, hilbert_spectral, pv_value, spectral_mean, Hilbert};

use super::{Case, VerificationReport};

/// Largest random series length in the pairing suites.
const PAIR_LEN: usize = 8;
/// Largest random series length in the round-trip suite.
const ROUNDTRIP_LEN: usize = 16;
/// Midpoints of `[-trim, trim]` at which Poincaré–Bertrand is compared.
const PB_POINTS: usize = 32;

fn describe(s: &SpectralFunction) -> String {
    let class = serde_json::to_value(s.weight).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    format!("{class}[{}]", s.coeffs.len())
}

enum Partner {
    Spectral(SpectralFunction),
    Grid(GridFunction),
    Function(TestFn),
}

impl Partner {
    fn operand(&self) -> Operand<'_> {
        match self {
            Partner::Spectral(s) => Operand::Spectral(s),
            Partner::Grid(g) => Operand::Grid(g),
            Partner::Function(f) => Operand::Function(f),
        }
    }
}

/// Samples of `log|x - c|` on a uniform grid.
fn log_grid(c: f64) -> Result<GridFunction> {
    let nodes: Vec<f64> = (0..33).map(|i| -0.96 + 0.06 * i as f64).collect();
    let values = nodes.iter().map(|x| (x - c).abs().max(1e-3).ln()).collect();
    GridFunction::new(nodes, values, NodeKind::Custom)
}

/// `∫ f T(g) = -∫ g T(f)` for bounded polynomials `f` against `L log L` partners.
pub fn suite_parseval(n_cases: usize, seed: u64, tolerance: f64) -> Result<VerificationReport> {
    if n_cases == 0 {
        return Err(Error::Precondition("n_cases must be at least 1".into()));
    }
    let mut r = rng(seed);
    let mut pairs: Vec<(String, SpectralFunction, Partner)> = Vec::with_capacity(n_cases + 2);
    for i in 0..n_cases {
        let f = random_spectral(&mut r, WeightClass::Flat, PAIR_LEN);
        let (label, g) = match i % 3 {
            0 => {
                let g = random_spectral(&mut r, WeightClass::InvSqrt, PAIR_LEN);
                (describe(&g), Partner::Spectral(g))
            }
            1 => {
                let c: f64 = r.gen_range(-0.9..0.9);
                (format!("log_grid(c={c:.6})"), Partner::Grid(log_grid(c)?))
            }
            _ => {
                let c: f64 = r.gen_range(-0.9..0.9);
                let g = TestFn::LogInterior(c);
                (g.name(), Partner::Function(g))
            }
        };
        pairs.push((format!("random {i:03} f={} g={label}", describe(&f)), f, g));
    }
    let sqrt_w = SpectralFunction::new(WeightClass::Sqrt, vec![1.0])?;
    let u3 = SpectralFunction::new(WeightClass::Flat, vec![0.0, 0.0, 0.0, 1.0])?;
    let one = SpectralFunction::new(WeightClass::Flat, vec![1.0])?;
    let arcsine = SpectralFunction::new(WeightClass::InvSqrt, vec![1.0])?;
    pairs.push(("fixed sqrt_weight x U3".into(), sqrt_w, Partner::Spectral(u3)));
    pairs.push(("fixed one x arcsine".into(), one, Partner::Spectral(arcsine)));

    let cfg = QuadConfig::default();
    let cases = pairs
        .par_iter()
        .map(|(d, f, g)| match parseval_residual(Operand::Spectral(f), g.operand(), &cfg) {
            Ok(p) => Case::new(d.clone(), p.lhs, p.rhs, p.residual, tolerance),
            Err(_) => Case::failed(d.clone(), tolerance),
        })
        .collect();
    Ok(VerificationReport::new("parseval", seed, cases))
}

/// Trimmed-`L¹` defect of `T(g T f + f T g) = T f · T g - f g`.
fn poincare_bertrand_defect(f: &SpectralFunction, g: &SpectralFunction, trim: f64, cfg: &QuadConfig) -> Result<(f64, f64)> {
    let tf = hilbert_spectral(f);
    let tg = Hilbert { f: g, cfg: *cfg };
    let inner = Sum(Product(g, &tf), Product(f, &tg));
    let h = 2.0 * trim / PB_POINTS as f64;
    let mut diff = 0.0;
    let mut size = 0.0;
    for i in 0..PB_POINTS {
        let x = -trim + (i as f64 + 0.5) * h;
        let lhs = pv_value(&inner, x, &cfg.outer())?;
        let rhs = tf.value(x) * tg.value(x) - f.value(x) * g.value(x);
        if !rhs.is_finite() {
            return Err(Error::Data(format!("inner transform not finite at {x}")));
        }
        diff += (lhs - rhs).abs() * h;
        size += rhs.abs() * h;
    }
    Ok((diff, size))
}

/// Poincaré–Bertrand on `|x| ≤ trim` for random `InvSqrt` `f` and polynomial `g`.
pub fn suite_poincare_bertrand(n_cases: usize, seed: u64, trim: f64, tolerance: f64) -> Result<VerificationReport> {
    if !(trim > 0.0 && trim < 1.0) {
        return Err(Error::Precondition(format!("trim must lie in (0, 1), got {trim}")));
    }
    if n_cases == 0 {
        return Err(Error::Precondition("n_cases must be at least 1".into()));
    }
    let mut r = rng(seed);
    let mut pairs: Vec<(String, SpectralFunction, SpectralFunction)> = (0..n_cases)
        .map(|i| {
            let f = random_spectral(&mut r, WeightClass::InvSqrt, PAIR_LEN);
            let g = random_spectral(&mut r, WeightClass::Flat, PAIR_LEN);
            (format!("random {i:03} f={} g={}", describe(&f), describe(&g)), f, g)
        })
        .collect();
    pairs.push((
        "fixed sqrt_weight x one".into(),
        SpectralFunction::new(WeightClass::Sqrt, vec![1.0])?,
        SpectralFunction::new(WeightClass::Flat, vec![1.0])?,
    ));
    pairs.push(("fixed zero x zero".into(), SpectralFunction::zero(WeightClass::InvSqrt), SpectralFunction::zero(WeightClass::Flat)));

    let cfg = QuadConfig::default();
    let cases = pairs
        .par_iter()
        .map(|(d, f, g)| match poincare_bertrand_defect(f, g, trim, &cfg) {
            Ok((diff, size)) => Case::new(d.clone(), diff, size, diff, tolerance),
            Err(_) => Case::failed(d.clone(), tolerance),
        })
        .collect();
    Ok(VerificationReport::new("poincare_bertrand", seed, cases))
}

/// Largest coefficient difference, padding the shorter series with zeros.
pub(crate) fn coeff_gap(a: &[f64], b: &[f64]) -> f64 {
    (0..a.len().max(b.len()))
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// `f - P f` for an `InvSqrt` series: the `T_0` coefficient zeroed.
fn without_mean(f: &SpectralFunction) -> SpectralFunction {
    let mut out = f.clone();
    out.coeffs[0] = 0.0;
    out
}

fn roundtrip_cases(i: usize, g: &SpectralFunction, f: &SpectralFunction, spectral_n: usize, tol: f64) -> Vec<Case> {
    let cfg = QuadConfig::default();
    let mut out = Vec::with_capacity(6);
    let tag = |kind: &str| format!("{kind} {i:03}");

    // T(T̂ g) = g in coefficients.
    match hat_spectral(g) {
        Ok(h) => {
            let back = hilbert_spectral(&h);
            out.push(Case::new(tag("range spectral"), 0.0, 0.0, coeff_gap(&back.coeffs, &g.coeffs), 0.0));
            let mean = spectral_mean(&h);
            out.push(Case::new(tag("mean spectral"), mean, 0.0, mean.abs(), 0.0));
        }
        Err(_) => out.push(Case::failed(tag("range spectral"), 0.0)),
    }
    // T̂(T f) = f - P f in coefficients.
    match hat_spectral(&hilbert_spectral(f)) {
        Ok(back) => {
            let gap = coeff_gap(&back.coeffs, &without_mean(f).coeffs);
            out.push(Case::new(tag("projection spectral"), 0.0, 0.0, gap, 0.0));
        }
        Err(_) => out.push(Case::failed(tag("projection spectral"), 0.0)),
    }
    // Grid path: T̂ g sampled by quadrature, refit, transformed back.
    match solve_airfoil_quadrature(g, Coefficient::default(), spectral_n, &cfg) {
        Ok(s) => {
            out.push(Case::new(tag("range grid"), s.residual_l1, 0.0, s.residual_l1, tol));
            let mean = match &s.particular {
                crate::inversion::Particular::Grid(grid) => fit(grid, WeightClass::InvSqrt).map(|h| spectral_mean(&h)),
                crate::inversion::Particular::Spectral(h) => Ok(spectral_mean(h)),
            };
            match mean {
                Ok(m) => out.push(Case::new(tag("mean grid"), std::f64::consts::PI * m, 0.0, (std::f64::consts::PI * m).abs(), tol)),
                Err(_) => out.push(Case::failed(tag("mean grid"), tol)),
            }
        }
        Err(_) => out.push(Case::failed(tag("range grid"), tol)),
    }
    // Grid path: T f sampled by quadrature at U nodes, refit, hat transform.
    let projection = (|| -> Result<f64> {
        let nodes = chebyshev_nodes(NodeKind::ChebyshevU, spectral_n)?;
        let values = nodes.iter().map(|&x| pv_value(f, x, &cfg)).collect::<Result<Vec<_>>>()?;
        let tf = fit(&GridFunction::new(nodes, values, NodeKind::ChebyshevU)?, WeightClass::Flat)?;
        let back = hat_spectral(&tf)?;
        let diff = back.add(&without_mean(f).scale(-1.0))?;
        Ok(integrate_abs_pow(&diff, 1.0, -1.0, 1.0, &cfg))
    })();
    match projection {
        Ok(d) => out.push(Case::new(tag("projection grid"), d, 0.0, d, tol)),
        Err(_) => out.push(Case::failed(tag("projection grid"), tol)),
    }
    out
}

/// `T(T̂ g) = g`, `T̂(T f) = f - P f` and `∫ T̂ g = 0` for random series.
///
/// Spectral cases must hold exactly; grid cases within `tolerance`.
pub fn suite_roundtrip(n_cases: usize, seed: u64, spectral_n: usize, tolerance: f64) -> Result<VerificationReport> {
    if n_cases == 0 {
        return Err(Error::Precondition("n_cases must be at least 1".into()));
    }
    if spectral_n <= ROUNDTRIP_LEN {
        return Err(Error::Precondition(format!("spectral_n must exceed {ROUNDTRIP_LEN}")));
    }
    let mut r = rng(seed);
    let inputs: Vec<(SpectralFunction, SpectralFunction)> = (0..n_cases)
        .map(|_| {
            let g = random_spectral(&mut r, WeightClass::Flat, ROUNDTRIP_LEN);
            let f = random_spectral(&mut r, WeightClass::InvSqrt, ROUNDTRIP_LEN);
            (g, f)
        })
        .collect();
    let cases = inputs
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, (g, f))| roundtrip_cases(i, g, f, spectral_n, tolerance))
        .collect();
    Ok(VerificationReport::new("roundtrip", seed, cases))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parseval_small_run_passes() {
        let r = suite_parseval(6, 3, 1e-6).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.cases.len(), 8);
    }

    #[test]
    fn poincare_bertrand_fixed_example() {
        let f = SpectralFunction::new(WeightClass::Sqrt, vec![1.0]).unwrap();
        let g = SpectralFunction::new(WeightClass::Flat, vec![1.0]).unwrap();
        let (diff, size) = poincare_bertrand_defect(&f, &g, 0.9, &QuadConfig::default()).unwrap();
        assert!(diff < 1e-5 && size > 0.1, "{diff} {size}");
    }

    #[test]
    fn roundtrip_small_run_passes() {
        let r = suite_roundtrip(4, 11, 64, 1e-8).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.cases.len(), 24);
    }

    #[test]
    fn coefficient_gap_pads() {
        assert_eq!(coeff_gap(&[1.0, 2.0], &[1.0]), 2.0);
    }
}
