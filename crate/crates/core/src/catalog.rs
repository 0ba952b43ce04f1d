//! Named test functions and seeded random spectral inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chebrep::{SpectralFunction, WeightClass};
use crate::func::{ordered, sqrt_weight_near, Feature, ScalarFn};

/// Kober's function `h(t) = 1/(t log² t)` on `(0, 1/2)`, zero elsewhere.
/// Integrable (`∫h = 1/log 2`) but not in `L log L`.
pub const KOBER_END: f64 = 0.5;

/// `∫_0^t h = -1/log t` on `(0, 1/2]`.
pub fn kober_antiderivative(t: f64) -> f64 {
    let t = t.clamp(0.0, KOBER_END);
    if t <= 0.0 {
        0.0
    } else {
        -1.0 / t.ln()
    }
}

pub fn kober(t: f64) -> f64 {
    if t > 0.0 && t < KOBER_END {
        let l = t.ln();
        1.0 / (t * l * l)
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TestFn {
    Constant(f64),
    /// `χ_(a,b)`.
    Indicator(f64, f64),
    /// `√(1 - x²)`.
    SqrtWeight,
    /// `1/√(1 - x²)`.
    Arcsine,
    Kober,
    /// `h(t)/√(1 - t²)`: an integrable function outside the range of `T` on `L log L`.
    KoberOverSqrt,
    /// `log(1 - x)` if the flag is true, else `log(1 + x)`.
    LogEndpoint(bool),
    /// `log|x - c|`.
    LogInterior(f64),
    /// `|x - a|^{-β}`.
    Power { at: f64, beta: f64 },
    /// `(x - a)_+^{-β}` restricted to `x < b`.
    TruncatedPower { at: f64, beta: f64, end: f64 },
    /// `exp(-((x - c)/w)²)`.
    Bump { center: f64, width: f64 },
}

impl TestFn {
    pub fn name(&self) -> String {
        match self {
            TestFn::Constant(c) => format!("constant({c})"),
            TestFn::Indicator(a, b) => format!("indicator({a},{b})"),
            TestFn::SqrtWeight => "sqrt_weight".into(),
            TestFn::Arcsine => "arcsine".into(),
            TestFn::Kober => "kober".into(),
            TestFn::KoberOverSqrt => "kober_over_sqrt".into(),
            TestFn::LogEndpoint(true) => "log(1-x)".into(),
            TestFn::LogEndpoint(false) => "log(1+x)".into(),
            TestFn::LogInterior(c) => format!("log|x-{c}|"),
            TestFn::Power { at, beta } => format!("power(at={at},beta={beta})"),
            TestFn::TruncatedPower { at, beta, end } => format!("truncated_power(at={at},beta={beta},end={end})"),
            TestFn::Bump { center, width } => format!("bump(c={center},w={width})"),
        }
    }

    /// Functions in `L log L` used by dictionary-wide checks.
    pub fn llogl_dictionary() -> Vec<TestFn> {
        vec![
            TestFn::Constant(1.0),
            TestFn::Indicator(0.0, 0.5),
            TestFn::Indicator(-0.75, 0.125),
            TestFn::SqrtWeight,
            TestFn::Arcsine,
            TestFn::LogEndpoint(true),
            TestFn::LogEndpoint(false),
            TestFn::LogInterior(0.3),
            TestFn::Power { at: 0.0, beta: 0.4 },
            TestFn::TruncatedPower { at: -0.5, beta: 0.6, end: 0.5 },
            TestFn::Bump { center: 0.9, width: 0.05 },
        ]
    }
}

impl ScalarFn for TestFn {
    fn value(&self, x: f64) -> f64 {
        match *self {
            TestFn::Constant(c) => c,
            TestFn::Indicator(a, b) => {
                if x > a && x < b {
                    1.0
                } else {
                    0.0
                }
            }
            TestFn::SqrtWeight => sqrt_weight_near(0.0, x),
            TestFn::Arcsine => 1.0 / sqrt_weight_near(0.0, x),
            TestFn::Kober => kober(x),
            TestFn::KoberOverSqrt => kober(x) / sqrt_weight_near(0.0, x),
            TestFn::LogEndpoint(minus) => {
                if minus {
                    (1.0 - x).ln()
                } else {
                    (1.0 + x).ln()
                }
            }
            TestFn::LogInterior(c) => (x - c).abs().ln(),
            TestFn::Power { at, beta } => (x - at).abs().powf(-beta),
            TestFn::TruncatedPower { at, beta, end } => {
                if x > at && x < end {
                    (x - at).powf(-beta)
                } else {
                    0.0
                }
            }
            TestFn::Bump { center, width } => (-((x - center) / width).powi(2)).exp(),
        }
    }

    fn value_near(&self, anchor: f64, offset: f64) -> f64 {
        match *self {
            TestFn::SqrtWeight => sqrt_weight_near(anchor, offset),
            TestFn::Arcsine => 1.0 / sqrt_weight_near(anchor, offset),
            TestFn::LogEndpoint(true) if anchor == 1.0 => (-offset).ln(),
            TestFn::LogEndpoint(false) if anchor == -1.0 => offset.ln(),
            TestFn::LogInterior(c) if anchor == c => offset.abs().ln(),
            TestFn::Power { at, beta } if anchor == at => offset.abs().powf(-beta),
            TestFn::TruncatedPower { at, beta, end } if anchor == at => {
                if offset > 0.0 && at + offset < end {
                    offset.powf(-beta)
                } else {
                    0.0
                }
            }
            TestFn::Kober if anchor == 0.0 => kober(offset),
            TestFn::KoberOverSqrt if anchor == 0.0 => kober(offset) / sqrt_weight_near(0.0, offset),
            _ => self.value(anchor + offset),
        }
    }

    fn features(&self) -> Vec<Feature> {
        match *self {
            TestFn::Constant(_) | TestFn::Bump { .. } => Vec::new(),
            TestFn::Indicator(a, b) => vec![Feature::brk(a), Feature::brk(b)],
            TestFn::SqrtWeight | TestFn::Arcsine => vec![Feature::singular(-1.0), Feature::singular(1.0)],
            TestFn::Kober | TestFn::KoberOverSqrt => vec![Feature::singular(0.0), Feature::brk(KOBER_END)],
            TestFn::LogEndpoint(true) => vec![Feature::singular(1.0)],
            TestFn::LogEndpoint(false) => vec![Feature::singular(-1.0)],
            TestFn::LogInterior(c) => vec![Feature::singular(c)],
            TestFn::Power { at, .. } => vec![Feature::singular(at)],
            TestFn::TruncatedPower { at, end, .. } => vec![Feature::singular(at), Feature::brk(end)],
        }
    }

    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        let (a, b) = ordered(a, b);
        match *self {
            TestFn::Constant(c) => Some(c * (b - a)),
            TestFn::Indicator(l, r) => Some((b.min(r) - a.max(l)).max(0.0)),
            TestFn::Kober => Some(kober_antiderivative(b) - kober_antiderivative(a)),
            // Only near the singularity, where 1/√(1-t²) is 1 to working precision.
            TestFn::KoberOverSqrt if b <= 1e-6 && a >= 0.0 => {
                Some((kober_antiderivative(b) - kober_antiderivative(a)) / sqrt_weight_near(0.0, 0.5 * (a + b)))
            }
            TestFn::Power { at, beta } => {
                let prim = |x: f64| {
                    let d = x - at;
                    d.signum() * d.abs().powf(1.0 - beta) / (1.0 - beta)
                };
                Some(prim(b) - prim(a))
            }
            _ => None,
        }
    }

    fn abs_integral(&self, a: f64, b: f64) -> Option<f64> {
        match self {
            TestFn::Constant(c) => Some(c.abs() * (ordered(a, b).1 - ordered(a, b).0)),
            TestFn::Indicator(..) | TestFn::Kober | TestFn::KoberOverSqrt | TestFn::Power { .. } => self.integral(a, b),
            _ => None,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random series with `1..=max_len` coefficients uniform in `[-1, 1]`.
pub fn random_spectral(rng: &mut ChaCha8Rng, weight: WeightClass, max_len: usize) -> SpectralFunction {
    let n = rng.gen_range(1..=max_len.max(1));
    let coeffs = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    SpectralFunction { weight, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::integrate_fn;
    use crate::quad::QuadConfig;

    #[test]
    fn kober_mass_is_reciprocal_log2() {
        let m = TestFn::Kober.integral(-1.0, 1.0).unwrap();
        assert!((m - 1.0 / 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn integral_hooks_match_quadrature() {
        let cfg = QuadConfig::default();
        for f in [TestFn::Power { at: 0.2, beta: 0.3 }, TestFn::Indicator(-0.3, 0.4)] {
            let hook = f.integral(-1.0, 1.0).unwrap();
            let pts = crate::func::breakpoints_for(&f.features(), -1.0, 1.0);
            let g = |a: f64, o: f64| f.value_near(a, o);
            let q = crate::quad::integrate(&g, &pts, &cfg);
            assert!((hook - q).abs() < 1e-12, "{}: {hook} vs {q}", f.name());
        }
        // log(1-x): ∫_{-1}^{1} = 2 log 2 - 2
        let q = integrate_fn(&TestFn::LogEndpoint(true), -1.0, 1.0, &cfg);
        assert!((q - (2.0 * 2f64.ln() - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn random_spectral_is_seeded() {
        let a = random_spectral(&mut rng(3), WeightClass::Flat, 16);
        let b = random_spectral(&mut rng(3), WeightClass::Flat, 16);
        assert_eq!(a, b);
        assert!(a.coeffs.len() <= 16);
    }
}
