//! Empirical Calderón domination `(T f)*(t) ≤ c · S(f*)(t)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::func::ScalarFn;
use crate::quad::QuadConfig;
use crate::rearrange::{midpoint_samples, rearrangement, RearrangementProfile};

use super::pv::Hilbert;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalderonReport {
    pub ts: Vec<f64>,
    /// `(T f)*(t) / S(f*)(t)` at the fine resolution.
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
    pub coarse_sup_ratio: f64,
    pub resolution: usize,
    /// Violations: `S(f*)(t) = 0` while `(T f)*(t) > 0`.
    pub violations: usize,
    /// Fine and coarse sup ratios agree within 10% (absolutely, below 1).
    pub stable: bool,
}

const STABILITY_RTOL: f64 = 0.1;

fn ratios<F: ScalarFn + ?Sized>(f: &F, ts: &[f64], n: usize) -> Result<(Vec<f64>, usize)> {
    let fstar = rearrangement(f, n)?;
    let tf = Hilbert { f, cfg: QuadConfig::default() };
    let samples = midpoint_samples(&tf, n);
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("transform is not finite on the sampling grid".into()));
    }
    let tstar = RearrangementProfile::from_cells(&samples)?;
    let mut out = Vec::with_capacity(ts.len());
    let mut violations = 0;
    for &t in ts {
        let s = fstar.calderon(t)?;
        let v = tstar.value(t);
        out.push(if s > 0.0 {
            v / s
        } else if v > 0.0 {
            violations += 1;
            f64::INFINITY
        } else {
            0.0
        });
    }
    Ok((out, violations))
}

/// Sup of `(T f)*/S(f*)` over `ts` at `resolution` and `resolution / 2`.
///
/// `(T f)*` is the rearrangement of midpoint samples of the quadrature
/// transform, `f*` the cell-mean rearrangement.
pub fn calderon_domination<F: ScalarFn + ?Sized>(f: &F, ts: &[f64], resolution: usize) -> Result<CalderonReport> {
    if ts.is_empty() {
        return Err(Error::Precondition("no t values".into()));
    }
    let (fine, v1) = ratios(f, ts, resolution)?;
    let (coarse, v2) = ratios(f, ts, resolution / 2)?;
    let sup = fine.iter().copied().fold(0.0, f64::max);
    let coarse_sup = coarse.iter().copied().fold(0.0, f64::max);
    // Floored at 1 so that `T f ≡ 0`, whose ratios are rounding noise, counts as stable.
    let stable = sup.is_finite() && (sup - coarse_sup).abs() <= STABILITY_RTOL * sup.max(coarse_sup).max(1.0);
    Ok(CalderonReport {
        ts: ts.to_vec(),
        ratios: fine,
        sup_ratio: sup,
        coarse_sup_ratio: coarse_sup,
        resolution,
        violations: v1 + v2,
        stable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::FnWithFeatures;

    #[test]
    fn zero_function_has_zero_ratio() {
        let z = FnWithFeatures::smooth(|_| 0.0);
        let r = calderon_domination(&z, &[0.1, 1.0], 64).unwrap();
        assert_eq!(r.sup_ratio, 0.0);
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn constant_has_bounded_stable_ratio() {
        let one = FnWithFeatures::smooth(|_| 1.0);
        let r = calderon_domination(&one, &[0.05, 0.25, 0.5, 1.0, 1.5], 256).unwrap();
        assert!(r.sup_ratio.is_finite() && r.sup_ratio > 0.0);
        assert!(r.stable, "{r:?}");
    }
}
