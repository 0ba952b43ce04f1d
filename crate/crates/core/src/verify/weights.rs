//! Calderón domination and logarithmic-weight integrability suites.

use std::f64::consts::LN_2;

use rayon::prelude::*;

use crate::catalog::TestFn;
use crate::error::{Error, Result};
use crate::func::{integrate_abs_pow, Product};
use crate::inversion::{optimal_domain_diag, DEFAULT_GROWTH_RTOL};
use crate::quad::{integrate, Breakpoint, Grade, QuadConfig};
use crate::transform::{calderon_domination, Hilbert};

use super::{Case, VerificationReport};

/// Relative agreement of the Calderón sup ratio between two resolutions.
const CALDERON_RTOL: f64 = 0.1;
/// Relative agreement of a log-weight integral between two quadrature depths.
const LOGWEIGHT_RTOL: f64 = 1e-6;
/// Depth of the coarse log-weight quadrature.
const COARSE_DEPTH: u32 = 36;
/// The Kober transform integral must grow by at least this factor overall.
const MIN_GROWTH: f64 = 1.01;

/// `t` values `2^{-k}`, `k = 0..=9`, at which `(T f)*` and `S(f*)` are compared.
fn calderon_ts() -> Vec<f64> {
    (0..10).map(|k| 0.5f64.powi(k)).collect()
}

/// Sup of `(T f)*/S(f*)` over the `L log L` dictionary, stable across resolutions.
pub fn suite_calderon(n_cases: usize, resolution: usize, seed: u64) -> Result<VerificationReport> {
    if n_cases == 0 {
        return Err(Error::Precondition("n_cases must be at least 1".into()));
    }
    let dict = TestFn::llogl_dictionary();
    let fns: Vec<TestFn> = dict.iter().cycle().take(n_cases.min(dict.len())).cloned().collect();
    let ts = calderon_ts();
    let cases = fns
        .par_iter()
        .map(|f| {
            let d = format!("{} n={resolution}", f.name());
            match calderon_domination(f, &ts, resolution) {
                Ok(r) if r.violations == 0 => {
                    // Ratios below one are measured absolutely: `T f ≡ 0` leaves only rounding noise.
                    let rel = (r.sup_ratio - r.coarse_sup_ratio).abs() / r.sup_ratio.max(r.coarse_sup_ratio).max(1.0);
                    Case::new(d, r.sup_ratio, r.coarse_sup_ratio, rel, CALDERON_RTOL)
                }
                Ok(r) => Case::new(d, r.sup_ratio, r.coarse_sup_ratio, f64::INFINITY, CALDERON_RTOL),
                Err(_) => Case::failed(d, CALDERON_RTOL),
            }
        })
        .collect();
    Ok(VerificationReport::new("calderon", seed, cases))
}

/// `∫_{-1/2}^{-1/n} |T h|` for Kober's function `h`; diverges like `log log n`.
pub fn kober_t_integral(n: u64) -> f64 {
    let cfg = QuadConfig::default().outer();
    let th = Hilbert::new(TestFn::Kober);
    let g = |a: f64, o: f64| crate::func::ScalarFn::value(&th, a + o).abs();
    let depth = 64 - n.leading_zeros() + 2;
    let pts = [Breakpoint::new(-0.5, Grade::Smooth), Breakpoint::new(-1.0 / n as f64, Grade::Soft(depth))];
    integrate(&g, &pts, &cfg)
}

/// Resolutions at which the Kober transform integral is compared.
pub const KOBER_RESOLUTIONS: [u64; 3] = [1 << 12, 1 << 14, 1 << 16];

fn log_weight_case(f: &TestFn, minus: bool) -> Case {
    let w = TestFn::LogEndpoint(minus);
    let label = if minus { "log(1-x)" } else { "log(1+x)" };
    let prod = Product(f, &w);
    let fine = integrate_abs_pow(&prod, 1.0, -1.0, 1.0, &QuadConfig::default());
    let coarse = integrate_abs_pow(&prod, 1.0, -1.0, 1.0, &QuadConfig::default().with_depth(COARSE_DEPTH));
    let rel = if fine == 0.0 && coarse == 0.0 { 0.0 } else { (fine - coarse).abs() / fine.abs().max(coarse.abs()) };
    Case::new(format!("dictionary {} x |{label}|", f.name()), fine, coarse, rel, LOGWEIGHT_RTOL)
}

/// `f log(1±x) ∈ L¹` across the `L log L` dictionary, and divergence evidence for Kober's function.
pub fn suite_logweights(n_cases: usize, seed: u64) -> Result<VerificationReport> {
    if n_cases == 0 {
        return Err(Error::Precondition("n_cases must be at least 1".into()));
    }
    let dict = TestFn::llogl_dictionary();
    let fns: Vec<TestFn> = dict.iter().take(n_cases.min(dict.len())).cloned().collect();
    let mut cases: Vec<Case> = fns
        .par_iter()
        .flat_map_iter(|f| [log_weight_case(f, true), log_weight_case(f, false)])
        .collect();

    let cfg = QuadConfig::default();
    for minus in [true, false] {
        let w = TestFn::LogEndpoint(minus);
        let label = if minus { "log(1-x)" } else { "log(1+x)" };
        let v = integrate_abs_pow(&w, 1.0, -1.0, 1.0, &cfg);
        cases.push(Case::abs(format!("oracle one x |{label}|"), v, 2.0 * LN_2, 1e-10));
        let z = integrate_abs_pow(&Product(TestFn::Constant(0.0), &w), 1.0, -1.0, 1.0, &cfg);
        cases.push(Case::abs(format!("oracle zero x |{label}|"), z, 0.0, 0.0));
    }

    let values: Vec<f64> = KOBER_RESOLUTIONS.iter().map(|&n| kober_t_integral(n)).collect();
    let monotone = values.windows(2).all(|w| w[1] > w[0]);
    let (first, last) = (values[0], values[values.len() - 1]);
    let ratio_residual = if monotone { first / last } else { f64::INFINITY };
    cases.push(Case::new("witness kober |T h| growth", last, first, ratio_residual, 1.0 / MIN_GROWTH));
    match optimal_domain_diag(&TestFn::Kober, 10, 6, DEFAULT_GROWTH_RTOL) {
        Ok(d) => {
            let at6 = d.per_depth.iter().find(|p| p.depth == 6).map_or(f64::NAN, |p| p.sup);
            let residual = if d.growth_flag { 0.0 } else { 1.0 };
            cases.push(Case::new("witness kober domain diagnostic", d.sup_lower_bound, at6, residual, 0.0));
        }
        Err(_) => cases.push(Case::failed("witness kober domain diagnostic", 0.0)),
    }
    Ok(VerificationReport::new("logweights", seed, cases))
}
