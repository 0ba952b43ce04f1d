//! Parseval pairing `∫ f T(g) = -∫ g T(f)`.

use serde::Serialize;

use crate::chebrep::{GridFunction, SpectralFunction, WeightClass};
use crate::error::{Error, Result};
use crate::func::{integrate_fn, merge_features, Feature, FnWithFeatures, Product, ScalarFn};
use crate::quad::QuadConfig;
use crate::transform::{hilbert_grid_value, hilbert_spectral, Hilbert};

/// A pairing operand: spectral inputs get their transform in closed form.
#[derive(Clone, Copy)]
pub enum Operand<'a> {
    Spectral(&'a SpectralFunction),
    /// Piecewise-linear interpolant; its transform is taken in closed form.
    Grid(&'a GridFunction),
    Function(&'a dyn ScalarFn),
}

impl Operand<'_> {
    fn as_scalar(&self) -> &dyn ScalarFn {
        match self {
            Operand::Spectral(s) => *s,
            Operand::Grid(g) => *g,
            Operand::Function(f) => *f,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParsevalResult {
    /// `∫ f T(g)`.
    pub lhs: f64,
    /// `-∫ g T(f)`.
    pub rhs: f64,
    pub residual: f64,
}

/// `∫ a · T(b)` over (-1, 1).
pub fn pairing(a: Operand<'_>, b: Operand<'_>, cfg: &QuadConfig) -> Result<f64> {
    let av = a.as_scalar();
    let v = match b {
        Operand::Spectral(s) if s.weight != WeightClass::Flat => {
            integrate_fn(&Product(av, hilbert_spectral(s)), -1.0, 1.0, cfg)
        }
        Operand::Grid(g) => {
            let feats = g.nodes.iter().map(|&k| Feature::singular(k)).chain([Feature::singular(-1.0), Feature::singular(1.0)]);
            let tg = FnWithFeatures::new(|x| hilbert_grid_value(g, x), merge_features(feats.collect(), Vec::new()));
            integrate_fn(&Product(av, tg), -1.0, 1.0, cfg)
        }
        _ => integrate_fn(&Product(av, Hilbert { f: b.as_scalar(), cfg: *cfg }), -1.0, 1.0, &cfg.outer()),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Data("pairing integral diverged".into()))
    }
}

/// `|∫ f T(g) + ∫ g T(f)|`.
pub fn parseval_residual(f: Operand<'_>, g: Operand<'_>, cfg: &QuadConfig) -> Result<ParsevalResult> {
    let lhs = pairing(f, g, cfg)?;
    let rhs = -pairing(g, f, cfg)?;
    Ok(ParsevalResult { lhs, rhs, residual: (lhs - rhs).abs() })
}
