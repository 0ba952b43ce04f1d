//! Functions on (-1, 1) as seen by the quadrature paths.

use crate::quad::{Breakpoint, Grade};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureKind {
    /// Integrable blow-up, or any point where derivatives are unbounded.
    Singular,
    /// Jump or kink; bounded on both sides.
    Break,
}

/// A point in [-1, 1] where the function is not smooth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Feature {
    pub at: f64,
    pub kind: FeatureKind,
}

impl Feature {
    pub fn singular(at: f64) -> Self {
        Self { at, kind: FeatureKind::Singular }
    }
    pub fn brk(at: f64) -> Self {
        Self { at, kind: FeatureKind::Break }
    }
}

/// A real function on (-1, 1).
///
/// `value_near(anchor, offset)` evaluates at `anchor + offset`; implementors
/// with endpoint behaviour like `√(1 - t)` should use the offset directly so
/// that values close to ±1 keep full relative precision.
pub trait ScalarFn: Sync {
    fn value(&self, x: f64) -> f64;

    fn value_near(&self, anchor: f64, offset: f64) -> f64 {
        self.value(anchor + offset)
    }

    /// Value with the magnitude its rounding error scales with; functions
    /// computed by cancellation (e.g. a transform) report the uncancelled size.
    fn value_scaled_near(&self, anchor: f64, offset: f64) -> (f64, f64) {
        let v = self.value_near(anchor, offset);
        (v, v.abs())
    }

    /// Non-smooth points, including ±1 when the function is singular there.
    fn features(&self) -> Vec<Feature> {
        Vec::new()
    }

    /// Exact `∫_a^b f`, when available.
    fn integral(&self, _a: f64, _b: f64) -> Option<f64> {
        None
    }

    /// Exact `∫_a^b |f|`, when available.
    fn abs_integral(&self, _a: f64, _b: f64) -> Option<f64> {
        None
    }
}

impl<T: ScalarFn + ?Sized> ScalarFn for &T {
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }
    fn value_near(&self, anchor: f64, offset: f64) -> f64 {
        (**self).value_near(anchor, offset)
    }
    fn value_scaled_near(&self, anchor: f64, offset: f64) -> (f64, f64) {
        (**self).value_scaled_near(anchor, offset)
    }
    fn features(&self) -> Vec<Feature> {
        (**self).features()
    }
    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        (**self).integral(a, b)
    }
    fn abs_integral(&self, a: f64, b: f64) -> Option<f64> {
        (**self).abs_integral(a, b)
    }
}

impl<T: ScalarFn + ?Sized> ScalarFn for Box<T> {
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }
    fn value_near(&self, anchor: f64, offset: f64) -> f64 {
        (**self).value_near(anchor, offset)
    }
    fn value_scaled_near(&self, anchor: f64, offset: f64) -> (f64, f64) {
        (**self).value_scaled_near(anchor, offset)
    }
    fn features(&self) -> Vec<Feature> {
        (**self).features()
    }
    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        (**self).integral(a, b)
    }
    fn abs_integral(&self, a: f64, b: f64) -> Option<f64> {
        (**self).abs_integral(a, b)
    }
}

/// A closure with declared features.
pub struct FnWithFeatures<F> {
    pub f: F,
    pub features: Vec<Feature>,
}

impl<F: Fn(f64) -> f64 + Sync> FnWithFeatures<F> {
    pub fn smooth(f: F) -> Self {
        Self { f, features: Vec::new() }
    }
    pub fn new(f: F, features: Vec<Feature>) -> Self {
        Self { f, features }
    }
}

impl<F: Fn(f64) -> f64 + Sync> ScalarFn for FnWithFeatures<F> {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn features(&self) -> Vec<Feature> {
        self.features.clone()
    }
}

/// Pointwise product of two functions; features are merged.
pub struct Product<A, B>(pub A, pub B);

impl<A: ScalarFn, B: ScalarFn> ScalarFn for Product<A, B> {
    fn value(&self, x: f64) -> f64 {
        self.0.value(x) * self.1.value(x)
    }
    fn value_near(&self, anchor: f64, offset: f64) -> f64 {
        self.0.value_near(anchor, offset) * self.1.value_near(anchor, offset)
    }
    fn value_scaled_near(&self, anchor: f64, offset: f64) -> (f64, f64) {
        let (a, sa) = self.0.value_scaled_near(anchor, offset);
        let (b, sb) = self.1.value_scaled_near(anchor, offset);
        (a * b, sa * sb)
    }
    fn features(&self) -> Vec<Feature> {
        merge_features(self.0.features(), self.1.features())
    }
}

/// Sum of two functions.
pub struct Sum<A, B>(pub A, pub B);

impl<A: ScalarFn, B: ScalarFn> ScalarFn for Sum<A, B> {
    fn value(&self, x: f64) -> f64 {
        self.0.value(x) + self.1.value(x)
    }
    fn value_near(&self, anchor: f64, offset: f64) -> f64 {
        self.0.value_near(anchor, offset) + self.1.value_near(anchor, offset)
    }
    fn value_scaled_near(&self, anchor: f64, offset: f64) -> (f64, f64) {
        let (a, sa) = self.0.value_scaled_near(anchor, offset);
        let (b, sb) = self.1.value_scaled_near(anchor, offset);
        (a + b, sa + sb)
    }
    fn features(&self) -> Vec<Feature> {
        merge_features(self.0.features(), self.1.features())
    }
    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        Some(self.0.integral(a, b)? + self.1.integral(a, b)?)
    }
}

/// `√(1 - x²) · g(x)`, evaluated without cancellation near ±1.
pub struct SqrtWeighted<G>(pub G);

impl<G: ScalarFn> ScalarFn for SqrtWeighted<G> {
    fn value(&self, x: f64) -> f64 {
        (1.0 - x * x).max(0.0).sqrt() * self.0.value(x)
    }
    fn value_near(&self, anchor: f64, offset: f64) -> f64 {
        sqrt_weight_near(anchor, offset) * self.0.value_near(anchor, offset)
    }
    fn value_scaled_near(&self, anchor: f64, offset: f64) -> (f64, f64) {
        let w = sqrt_weight_near(anchor, offset);
        let (v, sv) = self.0.value_scaled_near(anchor, offset);
        (w * v, w * sv)
    }
    fn features(&self) -> Vec<Feature> {
        merge_features(self.0.features(), vec![Feature::singular(-1.0), Feature::singular(1.0)])
    }
}

/// `√(1 - t²)` at `t = anchor + offset`, using the offset when the anchor is ±1.
pub fn sqrt_weight_near(anchor: f64, offset: f64) -> f64 {
    if anchor == 1.0 {
        let u = -offset;
        (u * (2.0 - u)).max(0.0).sqrt()
    } else if anchor == -1.0 {
        let u = offset;
        (u * (2.0 - u)).max(0.0).sqrt()
    } else {
        let t = anchor + offset;
        ((1.0 - t) * (1.0 + t)).max(0.0).sqrt()
    }
}

/// Union of feature lists; a point flagged singular anywhere stays singular.
pub fn merge_features(a: Vec<Feature>, b: Vec<Feature>) -> Vec<Feature> {
    let mut all: Vec<Feature> = a.into_iter().chain(b).collect();
    all.sort_by(|p, q| p.at.total_cmp(&q.at));
    let mut out: Vec<Feature> = Vec::with_capacity(all.len());
    for f in all {
        match out.last_mut() {
            Some(last) if last.at == f.at => {
                if f.kind == FeatureKind::Singular {
                    last.kind = FeatureKind::Singular;
                }
            }
            _ => out.push(f),
        }
    }
    out
}

/// Breakpoints for integrating `f` over `[a, b]`, graded toward singular features.
pub fn breakpoints_for(features: &[Feature], a: f64, b: f64) -> Vec<Breakpoint> {
    let grade_at = |p: f64| {
        features
            .iter()
            .find(|f| f.at == p)
            .map(|f| if f.kind == FeatureKind::Singular { Grade::Singular } else { Grade::Smooth })
            .unwrap_or(Grade::Smooth)
    };
    let mut pts = vec![Breakpoint::new(a, grade_at(a))];
    for f in features {
        if f.at > a && f.at < b {
            let g = if f.kind == FeatureKind::Singular { Grade::Singular } else { Grade::Smooth };
            pts.push(Breakpoint::new(f.at, g));
        }
    }
    pts.push(Breakpoint::new(b, grade_at(b)));
    pts
}

struct Plain<'a, F: ?Sized>(&'a F);

impl<F: ScalarFn + ?Sized> crate::quad::Integrand for Plain<'_, F> {
    fn at(&self, anchor: f64, offset: f64) -> f64 {
        self.0.value_near(anchor, offset)
    }
    fn at_scaled(&self, anchor: f64, offset: f64) -> (f64, f64) {
        self.0.value_scaled_near(anchor, offset)
    }
    fn tail(&self, anchor: f64, offset: f64) -> Option<f64> {
        let (a, b) = ordered(anchor, anchor + offset);
        self.0.integral(a, b)
    }
}

struct AbsPow<'a, F: ?Sized>(&'a F, f64);

impl<F: ScalarFn + ?Sized> crate::quad::Integrand for AbsPow<'_, F> {
    fn at(&self, anchor: f64, offset: f64) -> f64 {
        self.at_scaled(anchor, offset).0
    }
    fn at_scaled(&self, anchor: f64, offset: f64) -> (f64, f64) {
        let (v, m) = self.0.value_scaled_near(anchor, offset);
        if self.1 == 1.0 {
            (v.abs(), m)
        } else {
            (v.abs().powf(self.1), m.powf(self.1))
        }
    }
    fn tail(&self, anchor: f64, offset: f64) -> Option<f64> {
        if self.1 != 1.0 {
            return None;
        }
        let (a, b) = ordered(anchor, anchor + offset);
        self.0.abs_integral(a, b)
    }
}

pub(crate) fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// `∫_a^b f` with grading toward the function's singular features.
pub fn integrate_fn<F: ScalarFn + ?Sized>(f: &F, a: f64, b: f64, cfg: &crate::quad::QuadConfig) -> f64 {
    if let Some(v) = f.integral(a, b) {
        return v;
    }
    let pts = breakpoints_for(&f.features(), a, b);
    crate::quad::integrate(&Plain(f), &pts, cfg)
}

/// `∫_a^b |f|^p` with grading toward the function's singular features.
pub fn integrate_abs_pow<F: ScalarFn + ?Sized>(f: &F, p: f64, a: f64, b: f64, cfg: &crate::quad::QuadConfig) -> f64 {
    if p == 1.0 {
        if let Some(v) = f.abs_integral(a, b) {
            return v;
        }
    }
    let pts = breakpoints_for(&f.features(), a, b);
    crate::quad::integrate(&AbsPow(f, p), &pts, cfg)
}
