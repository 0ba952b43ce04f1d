//! Evidence for or against `g` lying in `T(L log L)`.
//!
//! Finite sampling cannot decide membership. The check compares norms of
//! `T̂ g` across two resolutions. Growth is taken from the weighted quantity
//! `√(1-x²) T̂ g = -T(√(1-t²) g)`. The factor `1/√(1-x²)` is harmless for
//! membership, but its endpoint singularity would bias sampled norms.

use serde::Serialize;

use crate::chebrep::{FunctionInput, WeightClass};
use crate::error::Result;
use crate::func::{sqrt_weight_near, ScalarFn};
use crate::quad::QuadConfig;
use crate::rearrange::{midpoint_samples, rearrangement, RearrangementProfile};
use crate::transform::{hat_spectral, HatOf};

use super::airfoil::{solve_airfoil, solve_airfoil_quadrature, Coefficient};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    InRangeEvidence,
    OutOfRangeEvidence,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RangeReport {
    pub verdict: Verdict,
    pub resolution: usize,
    pub coarse_resolution: usize,
    /// `‖T̂ g‖_{L log L}` at both resolutions.
    pub llogl: f64,
    pub llogl_coarse: f64,
    /// `‖√(1-x²) T̂ g‖_{L¹}` at both resolutions and its relative growth.
    pub weighted_l1: f64,
    pub weighted_l1_coarse: f64,
    pub growth: f64,
    /// `‖T(T̂ g) - g‖_{L¹}`; omitted when growth already indicates divergence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_l1: Option<f64>,
    pub evidence: String,
}

impl RangeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("range report serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeConfig {
    pub resolution: usize,
    /// Ratio between fine and coarse resolution.
    pub refinement: usize,
    pub stability_rtol: f64,
    pub residual_tol: f64,
    pub spectral_n: usize,
}

impl Default for RangeConfig {
    fn default() -> Self {
        Self { resolution: 4096, refinement: 8, stability_rtol: 0.02, residual_tol: 1e-8, spectral_n: 64 }
    }
}

fn weighted_l1(samples: &[f64], n: usize) -> f64 {
    let h = 2.0 / n as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let x = -1.0 + (i as f64 + 0.5) * h;
            (v * sqrt_weight_near(0.0, x)).abs() * h
        })
        .sum()
}

fn coarse_of(rc: &RangeConfig) -> usize {
    (rc.resolution / rc.refinement.max(2)).max(8)
}

pub fn range_check(g: &FunctionInput, rc: &RangeConfig, cfg: &QuadConfig) -> Result<RangeReport> {
    match g {
        FunctionInput::Spectral(s) if s.weight == WeightClass::Flat => {
            let (fine_n, coarse_n) = (rc.resolution, coarse_of(rc));
            let hat = hat_spectral(s)?;
            let samples = Samples {
                fine: midpoint_samples(&hat, fine_n),
                coarse: midpoint_samples(&hat, coarse_n),
                fine_profile: rearrangement(&hat, fine_n)?,
                coarse_profile: rearrangement(&hat, coarse_n)?,
            };
            report(samples, rc, || Ok(solve_airfoil(g, Coefficient::default(), rc.spectral_n, cfg)?.residual_l1))
        }
        other => range_check_fn(other.as_scalar(), rc, cfg),
    }
}

/// [`range_check`] for any function, with `T̂ g` evaluated by quadrature.
pub fn range_check_fn<G: ScalarFn + ?Sized>(g: &G, rc: &RangeConfig, cfg: &QuadConfig) -> Result<RangeReport> {
    let hat = HatOf { g, cfg: *cfg };
    let fine = midpoint_samples(&hat, rc.resolution);
    let coarse = midpoint_samples(&hat, coarse_of(rc));
    let samples = Samples {
        fine_profile: RearrangementProfile::from_cells(&sanitize(&fine))?,
        coarse_profile: RearrangementProfile::from_cells(&sanitize(&coarse))?,
        fine,
        coarse,
    };
    report(samples, rc, || {
        Ok(solve_airfoil_quadrature(g, Coefficient::default(), rc.spectral_n, cfg)?.residual_l1)
    })
}

struct Samples {
    fine: Vec<f64>,
    coarse: Vec<f64>,
    fine_profile: RearrangementProfile,
    coarse_profile: RearrangementProfile,
}

fn report(s: Samples, rc: &RangeConfig, residual: impl FnOnce() -> Result<f64>) -> Result<RangeReport> {
    let (fine_n, coarse_n) = (rc.resolution, coarse_of(rc));
    let Samples { fine, coarse, fine_profile, coarse_profile } = s;
    let w_fine = weighted_l1(&fine, fine_n);
    let w_coarse = weighted_l1(&coarse, coarse_n);
    let growth = if w_coarse > 0.0 { w_fine / w_coarse - 1.0 } else { 0.0 };
    let unresolved = fine.iter().any(|v| !v.is_finite());
    let stable = growth.abs() <= rc.stability_rtol && !unresolved;
    let residual_l1 = if stable {
        Some(residual()?)
    } else {
        None
    };
    let (verdict, evidence) = match residual_l1 {
        Some(r) if r <= rc.residual_tol => (
            Verdict::InRangeEvidence,
            format!("weighted L1 norm of T̂ g stable within {:.2e}; residual {r:.3e}", growth.abs()),
        ),
        Some(r) => (Verdict::Inconclusive, format!("norms stable but residual {r:.3e} exceeds tolerance")),
        None if growth > rc.stability_rtol => (
            Verdict::OutOfRangeEvidence,
            format!("weighted L1 norm of T̂ g grows by {:.2}% from {coarse_n} to {fine_n} cells", 100.0 * growth),
        ),
        None => (Verdict::Inconclusive, "T̂ g not finite on the sampling grid".into()),
    };
    Ok(RangeReport {
        verdict,
        resolution: fine_n,
        coarse_resolution: coarse_n,
        llogl: fine_profile.llogl(),
        llogl_coarse: coarse_profile.llogl(),
        weighted_l1: w_fine,
        weighted_l1_coarse: w_coarse,
        growth,
        residual_l1,
        evidence,
    })
}

fn sanitize(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| if x.is_finite() { *x } else { 0.0 }).collect()
}
