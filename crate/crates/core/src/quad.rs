//! Gauss rules and a graded composite integrator.
//!
//! The integrator works on breakpoints. Between consecutive breakpoints the
//! integrand is assumed smooth; a breakpoint may be flagged as a singularity
//! (integrable blow-up or kink), in which case panels are graded geometrically
//! toward it, or as a "soft" point where the integrand is smooth but varies on
//! a small scale.
//!
//! Integrands are evaluated as `f(anchor, offset)` with the node equal to
//! `anchor + offset`. Passing the offset separately lets callers compute
//! quantities such as `1 - t` or `t - x` without cancellation.

use std::f64::consts::PI;
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    GaussLegendre,
    /// Nodes `cos((2k+1)π/(2n))`, exact for `∫ p/√(1-x²)`, deg p < 2n.
    ChebyshevT,
    /// Nodes `cos(kπ/(n+1))`, exact for `∫ p·√(1-x²)`, deg p < 2n.
    ChebyshevU,
}

/// Nodes in increasing order with matching weights.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(kind: RuleKind, n: usize) -> Self {
        assert!(n > 0, "rule size must be positive");
        let (nodes, weights) = match kind {
            RuleKind::GaussLegendre => gauss_legendre(n),
            RuleKind::ChebyshevT => {
                let mut nodes: Vec<f64> = (0..n)
                    .map(|k| ((2 * k + 1) as f64 * PI / (2 * n) as f64).cos())
                    .collect();
                nodes.reverse();
                (nodes, vec![PI / n as f64; n])
            }
            RuleKind::ChebyshevU => {
                let h = PI / (n + 1) as f64;
                let mut pairs: Vec<(f64, f64)> = (1..=n)
                    .map(|k| {
                        let th = k as f64 * h;
                        (th.cos(), h * th.sin().powi(2))
                    })
                    .collect();
                pairs.reverse();
                pairs.into_iter().unzip()
            }
        };
        Self { kind, nodes, weights }
    }

    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre nodes (increasing) and weights on [-1, 1], by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// How panels approach a breakpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grade {
    Smooth,
    /// Smooth but with structure on scale `len / 2^depth`.
    Soft(u32),
    /// Integrable singularity; graded to `QuadConfig::max_depth` and then
    /// closed by the integrand's tail hook or geometric extrapolation.
    Singular,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Breakpoint {
    pub at: f64,
    pub grade: Grade,
}

impl Breakpoint {
    pub fn new(at: f64, grade: Grade) -> Self {
        Self { at, grade }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    pub max_depth: u32,
    pub rel_tol: f64,
    pub max_bisect: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { max_depth: 48, rel_tol: 1e-13, max_bisect: 14 }
    }
}

impl QuadConfig {
    pub fn with_depth(mut self, depth: u32) -> Self {
        self.max_depth = depth;
        self
    }

    /// Settings for an outer integral whose integrand is itself a quadrature;
    /// a tolerance near rounding level would chase the inner noise.
    pub fn outer(self) -> Self {
        Self { rel_tol: self.rel_tol.max(1e-11), ..self }
    }
}

/// Integrand evaluated at `anchor + offset`.
pub trait Integrand {
    fn at(&self, anchor: f64, offset: f64) -> f64;

    /// Value with the magnitude its rounding error scales with; adaptive
    /// refinement stops once panel differences fall below `rel_tol` of it.
    /// Integrands formed by cancellation should report the uncancelled size.
    fn at_scaled(&self, anchor: f64, offset: f64) -> (f64, f64) {
        let v = self.at(anchor, offset);
        (v, v.abs())
    }

    /// Integral over the interval between `anchor` and `anchor + offset`,
    /// if known in closed form. Used to close the innermost graded panel.
    fn tail(&self, _anchor: f64, _offset: f64) -> Option<f64> {
        None
    }
}

impl<F: Fn(f64, f64) -> f64> Integrand for F {
    fn at(&self, anchor: f64, offset: f64) -> f64 {
        self(anchor, offset)
    }
}

/// Integral over `[points[0].at, points.last().at]`; points must be increasing.
pub fn integrate<I: Integrand + ?Sized>(f: &I, points: &[Breakpoint], cfg: &QuadConfig) -> f64 {
    integrate_scaled(f, points, cfg).0
}

/// [`integrate`] together with the integral of the integrand's error-scale
/// magnitude, for callers that feed the result into an outer quadrature.
pub fn integrate_scaled<I: Integrand + ?Sized>(f: &I, points: &[Breakpoint], cfg: &QuadConfig) -> (f64, f64) {
    let (mut total, mut scale) = (0.0, 0.0);
    for w in points.windows(2) {
        let (l, r) = (w[0], w[1]);
        let len = r.at - l.at;
        if len <= 0.0 {
            continue;
        }
        let lg = l.grade != Grade::Smooth;
        let rg = r.grade != Grade::Smooth;
        let (v, m) = match (lg, rg) {
            (false, false) => adaptive(f, l.at, 1.0, 0.0, len, cfg),
            (true, false) => graded_side(f, l.at, 1.0, len, l.grade, cfg),
            (false, true) => graded_side(f, r.at, -1.0, len, r.grade, cfg),
            (true, true) => {
                // Split where the two gradings meet; a soft point next to a
                // singular one gets the smaller share.
                let frac = match (l.grade, r.grade) {
                    (Grade::Soft(_), Grade::Singular) => 0.25,
                    (Grade::Singular, Grade::Soft(_)) => 0.75,
                    _ => 0.5,
                };
                let a = len * frac;
                let (v1, m1) = graded_side(f, l.at, 1.0, a, l.grade, cfg);
                let (v2, m2) = graded_side(f, r.at, -1.0, len - a, r.grade, cfg);
                (v1 + v2, m1 + m2)
            }
        };
        total += v;
        scale += m;
    }
    (total, scale)
}

/// Smooth integral of a plain function on [a, b].
pub fn integrate_smooth(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let g = |anchor: f64, off: f64| f(anchor + off);
    integrate(
        &g,
        &[Breakpoint::new(a, Grade::Smooth), Breakpoint::new(b, Grade::Smooth)],
        &QuadConfig::default(),
    )
}

/// One Gauss–Legendre panel over offsets `[lo, hi]` in direction `dir`,
/// returning the integral and the integral of the error-scale magnitude.
fn panel<I: Integrand + ?Sized>(f: &I, anchor: f64, dir: f64, lo: f64, hi: f64) -> (f64, f64) {
    let (x, w) = gl16();
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let (mut s, mut a) = (0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        let (v, m) = f.at_scaled(anchor, dir * (c + h * xi));
        s += wi * v;
        a += wi * m;
    }
    (s * h, a * h)
}

fn adaptive<I: Integrand + ?Sized>(f: &I, anchor: f64, dir: f64, lo: f64, hi: f64, cfg: &QuadConfig) -> (f64, f64) {
    let (whole, _) = panel(f, anchor, dir, lo, hi);
    bisect(f, anchor, dir, lo, hi, whole, cfg, 0)
}

#[allow(clippy::too_many_arguments)]
fn bisect<I: Integrand + ?Sized>(
    f: &I,
    anchor: f64,
    dir: f64,
    lo: f64,
    hi: f64,
    whole: f64,
    cfg: &QuadConfig,
    level: u32,
) -> (f64, f64) {
    let mid = 0.5 * (lo + hi);
    let (l, al) = panel(f, anchor, dir, lo, mid);
    let (r, ar) = panel(f, anchor, dir, mid, hi);
    let sum = l + r;
    let scale = al + ar;
    if !sum.is_finite()
        || (whole - sum).abs() <= cfg.rel_tol * scale
        || scale == 0.0
        || level >= cfg.max_bisect
    {
        return (sum, scale);
    }
    let (v1, m1) = bisect(f, anchor, dir, lo, mid, l, cfg, level + 1);
    let (v2, m2) = bisect(f, anchor, dir, mid, hi, r, cfg, level + 1);
    (v1 + v2, m1 + m2)
}

fn graded_side<I: Integrand + ?Sized>(
    f: &I,
    anchor: f64,
    dir: f64,
    len: f64,
    grade: Grade,
    cfg: &QuadConfig,
) -> (f64, f64) {
    let depth = match grade {
        Grade::Smooth => return adaptive(f, anchor, dir, 0.0, len, cfg),
        Grade::Soft(d) => d.max(1),
        Grade::Singular => cfg.max_depth.max(3),
    };
    let singular = grade == Grade::Singular;
    let (mut sum, mut scale) = (0.0, 0.0);
    let mut hi = len;
    let mut contrib: Vec<f64> = Vec::with_capacity(depth as usize);
    for k in 0..depth {
        let lo = 0.5 * hi;
        let (c, m) = if k == 0 { adaptive(f, anchor, dir, lo, hi, cfg) } else { panel(f, anchor, dir, lo, hi) };
        if !c.is_finite() && singular && contrib.len() >= 3 {
            // Nodes collapsed onto the singular point in floating point.
            let t = extrapolate(&contrib).unwrap_or(0.0);
            return (sum + t, scale + t.abs());
        }
        sum += c;
        scale += m;
        contrib.push(c);
        hi = lo;
        if singular && k >= 6 {
            let n = contrib.len();
            let tiny = 1e-17 * sum.abs().max(f64::MIN_POSITIVE);
            if contrib[n - 1].abs() <= tiny && contrib[n - 2].abs() <= tiny {
                return (sum, scale);
            }
        }
    }
    if let Some(t) = f.tail(anchor, dir * hi) {
        return (sum + t, scale + t.abs());
    }
    if singular {
        if let Some(t) = extrapolate(&contrib) {
            return (sum + t, scale + t.abs());
        }
    }
    let (last, m) = panel(f, anchor, dir, 0.0, hi);
    if !last.is_finite() && singular {
        // Innermost nodes rounded onto the singular point; the remainder is below resolution.
        return (sum, scale);
    }
    (sum + last, scale + m)
}

/// Geometric tail `Σ_{j≥1} c_n r^j` when the last panel contributions decay geometrically.
fn extrapolate(contrib: &[f64]) -> Option<f64> {
    let n = contrib.len();
    if n < 3 {
        return None;
    }
    let (c1, c2, c3) = (contrib[n - 1], contrib[n - 2], contrib[n - 3]);
    if c2 == 0.0 || c3 == 0.0 {
        return if c1 == 0.0 { Some(0.0) } else { None };
    }
    let r1 = c1 / c2;
    let r2 = c2 / c3;
    (r1 > 0.0 && r1 < 0.95 && (r1 - r2).abs() <= 0.1 * r1).then(|| c1 * r1 / (1.0 - r1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg} q={q}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn chebyshev_rules_match_weighted_moments() {
        // ∫ x^2/√(1-x²) = π/2 ;  ∫ x^2 √(1-x²) = π/8
        let t = QuadratureRule::new(RuleKind::ChebyshevT, 4);
        assert!((t.apply(|x| x * x) - PI / 2.0).abs() < 1e-14);
        let u = QuadratureRule::new(RuleKind::ChebyshevU, 4);
        assert!((u.apply(|x| x * x) - PI / 8.0).abs() < 1e-14);
        assert!(u.nodes.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn graded_handles_inverse_sqrt_endpoints() {
        // ∫_{-1}^{1} 1/√(1-t²) dt = π
        let f = |a: f64, off: f64| {
            let u = if a > 0.0 { -off } else { off };
            1.0 / (u * (2.0 - u)).sqrt()
        };
        let pts = [Breakpoint::new(-1.0, Grade::Singular), Breakpoint::new(1.0, Grade::Singular)];
        let v = integrate(&f, &pts, &QuadConfig::default());
        assert!((v - PI).abs() < 1e-12, "{v}");
    }

    #[test]
    fn graded_handles_log_singularity() {
        // ∫_0^1 ln t dt = -1
        let f = |_a: f64, off: f64| off.ln();
        let pts = [Breakpoint::new(0.0, Grade::Singular), Breakpoint::new(1.0, Grade::Smooth)];
        let v = integrate(&f, &pts, &QuadConfig::default());
        assert!((v + 1.0).abs() < 1e-13, "{v}");
    }

    #[test]
    fn smooth_adaptive_resolves_peaks() {
        let v = integrate_smooth(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0);
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert!((v - exact).abs() / exact < 1e-12, "{v} vs {exact}");
    }
}
