//! Principal-value evaluation by singularity subtraction.
//!
//! `T f(x) = (1/π) ∫ (f(t) - f(x))/(t - x) dt + (f(x)/π) log((1-x)/(1+x))`
//!
//! The remaining integrand is bounded near `x` for Hölder `f`; it is
//! integrated with panels graded toward `x` and toward the singular features
//! of `f`.

use crate::error::{Error, Result};
use crate::func::{merge_features, ordered, sqrt_weight_near, Feature, FeatureKind, ScalarFn, SqrtWeighted};
use crate::quad::{integrate_scaled, Breakpoint, Grade, Integrand, QuadConfig};

struct Kernel<'a, F: ?Sized> {
    f: &'a F,
    x: f64,
    fx: f64,
    /// Feature nearest to `x`; nodes anchored at `x` are re-anchored there so
    /// that `t - feature` keeps its digits.
    near: Option<f64>,
}

impl<F: ScalarFn + ?Sized> Integrand for Kernel<'_, F> {
    fn at(&self, anchor: f64, offset: f64) -> f64 {
        self.at_scaled(anchor, offset).0
    }

    /// The difference quotient loses digits near `x`; its error scales with
    /// `(|f(t)| + |f(x)|)/|t - x|`.
    fn at_scaled(&self, anchor: f64, offset: f64) -> (f64, f64) {
        let ft = match self.near {
            Some(c) if anchor == self.x => self.f.value_near(c, (self.x - c) + offset),
            _ => self.f.value_near(anchor, offset),
        };
        let dist = (anchor - self.x) + offset;
        let d = ft - self.fx;
        let scale = (ft.abs() + self.fx.abs()) / dist.abs();
        // Rounding-level differences are noise.
        if d.abs() <= 8.0 * f64::EPSILON * ft.abs().max(self.fx.abs()) {
            return (0.0, scale);
        }
        (d / dist, scale)
    }

    fn tail(&self, anchor: f64, offset: f64) -> Option<f64> {
        if anchor == self.x {
            return None;
        }
        let (a, b) = ordered(anchor, anchor + offset);
        let m = self.f.integral(a, b)?;
        Some((m - self.fx * offset.abs()) / ((anchor - self.x) + 0.5 * offset))
    }
}

/// Value of `f` at `x`, using the endpoint-relative form near ±1.
pub(crate) fn value_at<F: ScalarFn + ?Sized>(f: &F, x: f64) -> f64 {
    if x > 0.5 {
        f.value_near(1.0, x - 1.0)
    } else if x < -0.5 {
        f.value_near(-1.0, x + 1.0)
    } else {
        f.value(x)
    }
}

/// `T f(x)` for a single interior point.
pub fn pv_value<F: ScalarFn + ?Sized>(f: &F, x: f64, cfg: &QuadConfig) -> Result<f64> {
    pv_value_scaled(f, x, cfg).map(|(v, _)| v)
}

/// `T f(x)` with the size of the uncancelled terms it was summed from.
fn pv_value_scaled<F: ScalarFn + ?Sized>(f: &F, x: f64, cfg: &QuadConfig) -> Result<(f64, f64)> {
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::Domain(format!("point {x} is not inside (-1, 1)")));
    }
    let feats = f.features();
    if feats.iter().any(|p| p.at == x && p.kind == FeatureKind::Singular) {
        return Err(Error::Precondition(format!("point {x} coincides with a singularity of the input")));
    }
    let fx = value_at(f, x);
    if !fx.is_finite() {
        return Err(Error::Data(format!("input is not finite at {x}")));
    }
    let grade_of = |k: FeatureKind| if k == FeatureKind::Singular { Grade::Singular } else { Grade::Smooth };
    let end_grade = |e: f64| feats.iter().find(|p| p.at == e).map(|p| grade_of(p.kind)).unwrap_or(Grade::Smooth);

    let mut pts = vec![Breakpoint::new(-1.0, end_grade(-1.0))];
    for p in feats.iter().filter(|p| p.at > -1.0 && p.at < 1.0 && p.at != x) {
        pts.push(Breakpoint::new(p.at, grade_of(p.kind)));
    }
    pts.push(Breakpoint::new(1.0, end_grade(1.0)));
    let rho = pts.iter().map(|p| (p.at - x).abs()).fold(f64::INFINITY, f64::min);
    let depth = ((2.0 / rho).log2().ceil().max(0.0) as u32 + 3).min(60);
    let pos = pts.partition_point(|p| p.at < x);
    pts.insert(pos, Breakpoint::new(x, Grade::Soft(depth)));

    let near = feats
        .iter()
        .map(|p| p.at)
        .filter(|&a| a != x)
        .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
        .filter(|&a| (a - x).abs() < 0.25);
    let kernel = Kernel { f, x, fx, near };
    let (regular, magnitude) = integrate_scaled(&kernel, &pts, cfg);
    let log_term = if fx == 0.0 { 0.0 } else { fx * ((1.0 - x) / (1.0 + x)).ln() };
    let v = (regular + log_term) / std::f64::consts::PI;
    if v.is_finite() {
        Ok((v, (magnitude + log_term.abs()) / std::f64::consts::PI))
    } else {
        Err(Error::Data(format!("transform is not finite at {x}; input may be non-integrable")))
    }
}

/// `T̂ g(x) = -(1/√(1-x²)) · T(√(1-t²) g)(x)`.
pub fn pv_hat_value<G: ScalarFn + ?Sized>(g: &G, x: f64, cfg: &QuadConfig) -> Result<f64> {
    pv_hat_value_scaled(g, x, cfg).map(|(v, _)| v)
}

fn pv_hat_value_scaled<G: ScalarFn + ?Sized>(g: &G, x: f64, cfg: &QuadConfig) -> Result<(f64, f64)> {
    let wg = SqrtWeighted(g);
    let (v, m) = pv_value_scaled(&wg, x, cfg)?;
    let w = if x > 0.5 {
        sqrt_weight_near(1.0, x - 1.0)
    } else if x < -0.5 {
        sqrt_weight_near(-1.0, x + 1.0)
    } else {
        sqrt_weight_near(0.0, x)
    };
    Ok((-v / w, m / w))
}

/// `T f` as a function, evaluated by quadrature on demand.
pub struct Hilbert<F> {
    pub f: F,
    pub cfg: QuadConfig,
}

impl<F: ScalarFn> Hilbert<F> {
    pub fn new(f: F) -> Self {
        Self { f, cfg: QuadConfig::default() }
    }
}

fn transformed_features(feats: Vec<Feature>) -> Vec<Feature> {
    let inner = feats.into_iter().map(|p| Feature::singular(p.at)).collect();
    merge_features(inner, vec![Feature::singular(-1.0), Feature::singular(1.0)])
}

impl<F: ScalarFn> ScalarFn for Hilbert<F> {
    fn value(&self, x: f64) -> f64 {
        pv_value(&self.f, x, &self.cfg).unwrap_or(f64::NAN)
    }
    fn value_scaled_near(&self, anchor: f64, offset: f64) -> (f64, f64) {
        pv_value_scaled(&self.f, anchor + offset, &self.cfg).unwrap_or((f64::NAN, f64::NAN))
    }
    fn features(&self) -> Vec<Feature> {
        transformed_features(self.f.features())
    }
}

/// `T̂ g` as a function, evaluated by quadrature on demand.
pub struct HatOf<G> {
    pub g: G,
    pub cfg: QuadConfig,
}

impl<G: ScalarFn> HatOf<G> {
    pub fn new(g: G) -> Self {
        Self { g, cfg: QuadConfig::default() }
    }
}

impl<G: ScalarFn> ScalarFn for HatOf<G> {
    fn value(&self, x: f64) -> f64 {
        pv_hat_value(&self.g, x, &self.cfg).unwrap_or(f64::NAN)
    }
    fn value_scaled_near(&self, anchor: f64, offset: f64) -> (f64, f64) {
        pv_hat_value_scaled(&self.g, anchor + offset, &self.cfg).unwrap_or((f64::NAN, f64::NAN))
    }
    fn features(&self) -> Vec<Feature> {
        transformed_features(self.g.features())
    }
}
