//! Operator-norm sweeps and the power-singularity integral bounds.

use std::f64::consts::{PI, SQRT_2};

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use statrs::function::beta::beta;

use crate::catalog::{random_spectral, rng, TestFn};
use crate::chebrep::WeightClass;
use crate::error::{Error, Result};
use crate::func::{integrate_abs_pow, ScalarFn};
use crate::quad::{gauss_legendre, integrate, integrate_smooth, Breakpoint, Grade, Integrand, QuadConfig};
use crate::transform::{pv_hat_value, pv_value};

use super::{BoundSweep, SweepPoint};

type Q = Ratio<i64>;

/// `c(β, γ) = max{1/(1-β), 1/(1-γ), 1/(β+γ-1)}` for `β, γ ∈ (0,1)`, `β + γ > 1`.
pub fn c_beta_gamma(beta: Q, gamma: Q) -> Result<Q> {
    let (zero, one) = (Q::from_integer(0), Q::from_integer(1));
    if !(beta > zero && beta < one && gamma > zero && gamma < one && beta + gamma > one) {
        return Err(Error::Precondition(format!("need β, γ in (0,1) with β + γ > 1, got ({beta}, {gamma})")));
    }
    let a = (one - beta).recip();
    let b = (one - gamma).recip();
    let c = (beta + gamma - one).recip();
    Ok(a.max(b).max(c))
}

fn qf(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// `Π |t - a_i|^{-s_i}`, with exact distances at the anchors.
struct PowerProduct {
    sing: Vec<(f64, f64)>,
}

impl PowerProduct {
    fn cofactor(&self, skip: usize, t: f64) -> f64 {
        self.sing
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != skip)
            .map(|(_, (a, s))| (t - a).abs().powf(-s))
            .product()
    }
}

impl Integrand for PowerProduct {
    fn at(&self, anchor: f64, offset: f64) -> f64 {
        self.sing
            .iter()
            .map(|(a, s)| {
                let d = if *a == anchor { offset.abs() } else { (anchor - a + offset).abs() };
                d.powf(-s)
            })
            .product()
    }

    /// `∫_0^h o^{-s} c(a + o) do ≈ c(a + h/2) h^{1-s}/(1-s)` for tiny `h`.
    fn tail(&self, anchor: f64, offset: f64) -> Option<f64> {
        let i = self.sing.iter().position(|(a, _)| *a == anchor)?;
        let s = self.sing[i].1;
        Some(self.cofactor(i, anchor + 0.5 * offset) * offset.abs().powf(1.0 - s) / (1.0 - s))
    }
}

fn singular_points(points: &[f64]) -> Vec<Breakpoint> {
    points.iter().map(|&p| Breakpoint::new(p, Grade::Singular)).collect()
}

/// Truncation point of the improper integral; the tail beyond is bounded analytically.
pub const TAIL_START: f64 = 1e6;

/// Pieces of `∫_{-1}^∞ dξ/(|ξ|^β (ξ+1)^γ)` over `(-1,0)`, `(0,1)`, `(1,M)` and the tail bound.
fn improper_pieces(beta: f64, gamma: f64) -> [f64; 4] {
    let cfg = QuadConfig::default();
    let f = PowerProduct { sing: vec![(-1.0, gamma), (0.0, beta)] };
    let left = integrate(&f, &singular_points(&[-1.0, 0.0]), &cfg);
    let right = integrate(&f, &[Breakpoint::new(0.0, Grade::Singular), Breakpoint::new(1.0, Grade::Smooth)], &cfg);
    let g = |x: f64| x.powf(-beta) * (x + 1.0).powf(-gamma);
    let mut far = 0.0;
    let mut a = 1.0;
    while a < TAIL_START {
        let b = (2.0 * a).min(TAIL_START);
        far += integrate_smooth(g, a, b);
        a = b;
    }
    // ∫_M^∞ ξ^{-β}(ξ+1)^{-γ} ≤ ∫_M^∞ ξ^{-β-γ} = M^{1-β-γ}/(β+γ-1).
    let tail = TAIL_START.powf(1.0 - beta - gamma) / (beta + gamma - 1.0);
    [left, right, far, tail]
}

/// `∫_{-1}^1 dt/(|t-x|^β (1-t²)^γ)`.
fn weighted_power_integral(beta: f64, gamma: f64, x: f64) -> f64 {
    let f = PowerProduct { sing: vec![(-1.0, gamma), (x, beta), (1.0, gamma)] };
    integrate(&f, &singular_points(&[-1.0, x, 1.0]), &QuadConfig::default())
}

/// Grid for the appendix sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct AppendixGrid {
    pub betas: Vec<Q>,
    pub gammas: Vec<Q>,
    pub xs: Vec<f64>,
    /// Exponents `p ∈ (1, 3/2)` for the `δ = (2/3)(p-1)/p` constants.
    pub ps: Vec<Q>,
}

impl Default for AppendixGrid {
    fn default() -> Self {
        let fifths: Vec<Q> = [55, 65, 75, 85, 95].iter().map(|&n| Q::new(n, 100)).collect();
        Self {
            betas: fifths.clone(),
            gammas: fifths,
            xs: vec![-0.9, -0.5, 0.0, 0.5, 0.9],
            ps: [11, 12, 13, 14].iter().map(|&n| Q::new(n, 10)).collect(),
        }
    }
}

/// Beta-function oracle tolerance for the `(-1, 0)` piece.
const BETA_ORACLE_TOL: f64 = 1e-8;

/// Power-singularity integral bounds and the exact `δ` constants.
pub fn suite_appendix(grid: &AppendixGrid, slack: f64) -> Result<BoundSweep> {
    let mut pairs = Vec::new();
    for &b in &grid.betas {
        for &g in &grid.gammas {
            pairs.push((b, g, c_beta_gamma(b, g)?));
        }
    }
    let mut points: Vec<SweepPoint> = pairs
        .par_iter()
        .flat_map_iter(|&(b, g, c)| {
            let (bf, gf, cf) = (qf(b), qf(g), qf(c));
            let bg = [("beta", bf), ("gamma", gf)];
            let pieces = improper_pieces(bf, gf);
            let oracle = beta(1.0 - bf, 1.0 - gf);
            let mut out = vec![
                SweepPoint::le("beta_oracle", &bg, (pieces[0] - oracle).abs(), BETA_ORACLE_TOL, 0.0),
                SweepPoint::le("improper_integral_le_6c", &bg, pieces.iter().sum(), 6.0 * cf, slack),
            ];
            let values: Vec<(f64, f64)> = grid.xs.iter().map(|&x| (x, weighted_power_integral(bf, gf, x))).collect();
            for &(x, v) in &values {
                let bound = 24.0 * cf / (1.0 - x * x).powf(bf + gf - 1.0);
                out.push(SweepPoint::le("weighted_integral_le_24c", &[bg[0], bg[1], ("x", x)], v, bound, slack));
                if x > 0.0 {
                    if let Some(&(_, w)) = values.iter().find(|(y, _)| *y == -x) {
                        let p = [bg[0], bg[1], ("x", x)];
                        out.push(SweepPoint::le("weighted_integral_symmetry", &p, (v - w).abs(), 1e-9 * v, 0.0));
                    }
                }
            }
            out
        })
        .collect();

    let (half, one) = (Q::new(1, 2), Q::from_integer(1));
    let c6 = c_beta_gamma(half, Q::new(2, 3))?;
    points.push(SweepPoint::exact("c(1/2,2/3)=6", &[], qf(c6), 6.0, c6 == Q::from_integer(6)));
    for &p in &grid.ps {
        if !(p > one && p < Q::new(3, 2)) {
            return Err(Error::Precondition(format!("p must lie in (1, 3/2), got {p}")));
        }
        let delta_p = Q::new(2, 3) * (p - one);
        let p_conj = p / (p - one);
        let delta_pc = delta_p / p * p_conj;
        let bound = Q::from_integer(3) / (p - one);
        let c1 = c_beta_gamma(half, delta_p + half)?;
        let c2 = c_beta_gamma(half, delta_pc)?;
        let pp = [("p", qf(p))];
        points.push(SweepPoint::exact("c(1/2,dp+1/2)<3/(p-1)", &pp, qf(c1), qf(bound), c1 < bound));
        points.push(SweepPoint::exact("c(1/2,dp')<=6", &pp, qf(c2), 6.0, c2 <= Q::from_integer(6)));
    }
    points.sort_by(|a, b| {
        a.check.cmp(&b.check).then_with(|| {
            let ka: Vec<f64> = a.parameters.values().copied().collect();
            let kb: Vec<f64> = b.parameters.values().copied().collect();
            ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    Ok(BoundSweep::new("appendix", points))
}

/// Exponent grids for the operator-norm sweeps.
#[derive(Clone, Debug, PartialEq)]
pub struct NormGrid {
    /// Exponents for `‖T‖_p ≤ tan(π/(2p)) ≤ 3/(p-1)`, in `(1, 2)`.
    pub ps: Vec<Q>,
    /// Exponents for `‖T + T̂‖_p ≤ 72√2/(p-1)`, in `(1, 3/2)`.
    pub sum_ps: Vec<Q>,
}

impl Default for NormGrid {
    fn default() -> Self {
        Self {
            ps: (11..=19).map(|n| Q::new(n, 10)).collect(),
            sum_ps: (22..=29).map(|n| Q::new(n, 20)).collect(),
        }
    }
}

/// Slack on the Pichorides comparison for the dictionary estimate.
const PICHORIDES_TOL: f64 = 1e-3;
/// Random members per dictionary family.
const FAMILY_SIZE: usize = 8;
/// Geometric levels of the node set toward each singular point.
const NODE_LEVELS: u32 = 32;

/// Quadrature nodes on (-1, 1) graded toward `points` (which include ±1).
fn graded_nodes(points: &[f64]) -> Vec<(f64, f64)> {
    let (gx, gw) = gauss_legendre(16);
    let mut out = Vec::new();
    let mut push_panel = |lo: f64, hi: f64, parts: usize| {
        let h = (hi - lo) / parts as f64;
        for k in 0..parts {
            let (a, b) = (lo + k as f64 * h, lo + (k + 1) as f64 * h);
            let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, w) in gx.iter().zip(&gw) {
                out.push((c + r * x, r * w));
            }
        }
    };
    for seg in points.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        for (end, dir) in [(a, 1.0), (b, -1.0)] {
            let mut len = 0.5 * (b - a);
            for level in 0..NODE_LEVELS {
                let parts = if level < 6 { 4 } else { 1 };
                let (p, q) = (end + dir * 0.5 * len, end + dir * len);
                push_panel(p.min(q), p.max(q), parts);
                len *= 0.5;
            }
            let q = end + dir * len;
            push_panel(end.min(q), end.max(q), 1);
        }
    }
    out.retain(|(x, _)| *x > -1.0 && *x < 1.0);
    out
}

struct Member {
    name: String,
    f: Box<dyn ScalarFn>,
    extra: Vec<f64>,
}

fn dictionary(seed: u64) -> Vec<Member> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for i in 0..FAMILY_SIZE {
        let s = random_spectral(&mut r, WeightClass::Flat, 8);
        out.push(Member { name: format!("polynomial {i}"), f: Box::new(s), extra: Vec::new() });
    }
    for i in 0..FAMILY_SIZE {
        let side = if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let center = side * r.gen_range(0.8..0.99);
        let width = r.gen_range(0.005..0.1);
        let f = TestFn::Bump { center, width };
        out.push(Member { name: format!("bump {i}"), f: Box::new(f), extra: vec![center] });
    }
    for i in 0..FAMILY_SIZE {
        let at = r.gen_range(-0.9..0.3);
        let beta = r.gen_range(0.05..0.45);
        let end = (at + r.gen_range(0.1f64..0.6)).min(0.99);
        let f = TestFn::TruncatedPower { at, beta, end };
        out.push(Member { name: format!("truncated power {i}"), f: Box::new(f), extra: Vec::new() });
    }
    out
}

/// `T f` and `T̂ f` at graded nodes for one dictionary member.
struct Sampled {
    weights: Vec<f64>,
    tf: Vec<f64>,
    hat: Vec<f64>,
}

fn sample(m: &Member, with_hat: bool) -> Sampled {
    let cfg = QuadConfig::default();
    let mut pts: Vec<f64> = m.f.features().iter().map(|p| p.at).chain(m.extra.iter().copied()).collect();
    pts.extend([-1.0, 1.0]);
    pts.retain(|p| (-1.0..=1.0).contains(p));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let nodes = graded_nodes(&pts);
    let weights = nodes.iter().map(|n| n.1).collect();
    let tf = nodes.iter().map(|n| pv_value(&m.f, n.0, &cfg).unwrap_or(f64::NAN)).collect();
    let hat = if with_hat {
        nodes.iter().map(|n| pv_hat_value(&m.f, n.0, &cfg).unwrap_or(f64::NAN)).collect()
    } else {
        Vec::new()
    };
    Sampled { weights, tf, hat }
}

fn sampled_norm(w: &[f64], v: impl Iterator<Item = f64>, p: f64) -> f64 {
    w.iter().zip(v).filter(|(_, x)| x.is_finite()).map(|(w, x)| w * x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `tan(π/(2p)) ≤ 3/(p-1)` certified in rationals.
///
/// With `y = π(p-1)/(2p) ∈ (0, π/2)`, `tan(π/(2p)) = cot y < 1/y = 2p/(π(p-1))`,
/// which is at most `3/(p-1)` when `2p ≤ 3π`; `π > 333/106` suffices.
fn tan_bound_certified(p: Q) -> bool {
    let one = Q::from_integer(1);
    p > one && p < Q::from_integer(2) && Q::from_integer(2) * p <= Q::from_integer(3) * Q::new(333, 106)
}

/// Dictionary lower estimates of `‖T‖_p` and `‖T + T̂‖_p` against their bounds.
pub fn suite_norm_bounds(grid: &NormGrid, seed: u64) -> Result<BoundSweep> {
    let (one, two) = (Q::from_integer(1), Q::from_integer(2));
    if grid.ps.iter().any(|&p| !(p > one && p < two)) || grid.sum_ps.iter().any(|&p| !(p > one && p < Q::new(3, 2))) {
        return Err(Error::Precondition("exponents must lie in (1, 2), and in (1, 3/2) for the sum".into()));
    }
    let cfg = QuadConfig::default();
    let dict = dictionary(seed);
    let sampled: Vec<Sampled> = dict.par_iter().map(|m| sample(m, !grid.sum_ps.is_empty())).collect();
    let ratio = |p: f64, use_hat: bool| -> (f64, String) {
        dict.iter()
            .zip(&sampled)
            .map(|(m, s)| {
                let fp = integrate_abs_pow(&m.f, p, -1.0, 1.0, &cfg).powf(1.0 / p);
                let num = if use_hat {
                    sampled_norm(&s.weights, s.tf.iter().zip(&s.hat).map(|(a, b)| a + b), p)
                } else {
                    sampled_norm(&s.weights, s.tf.iter().copied(), p)
                };
                (if fp > 0.0 { num / fp } else { 0.0 }, m.name.clone())
            })
            .fold((0.0, String::new()), |acc, c| if c.0 > acc.0 { c } else { acc })
    };
    let mut points = Vec::new();
    for &p in &grid.ps {
        let pf = qf(p);
        let tan = (PI / (2.0 * pf)).tan();
        let (est, _) = ratio(pf, false);
        let pp = [("p", pf)];
        points.push(SweepPoint::le("dictionary_norm_le_tan", &pp, est, tan, PICHORIDES_TOL));
        let three = Q::from_integer(3) / (p - one);
        points.push(SweepPoint::exact(
            "tan_le_3/(p-1)",
            &pp,
            tan,
            qf(three),
            tan_bound_certified(p) && tan <= qf(three),
        ));
    }
    for &p in &grid.sum_ps {
        let pf = qf(p);
        let (est, _) = ratio(pf, true);
        let bound = 72.0 * SQRT_2 / (pf - 1.0);
        points.push(SweepPoint::le("dictionary_sum_norm_le_72sqrt2/(p-1)", &[("p", pf)], est, bound, 0.0));
    }
    Ok(BoundSweep::new("norm_bounds", points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_examples() {
        assert_eq!(c_beta_gamma(Q::new(1, 2), Q::new(2, 3)).unwrap(), Q::from_integer(6));
        assert_eq!(c_beta_gamma(Q::new(1, 2), Q::new(3, 4)).unwrap(), Q::from_integer(4));
        assert!(c_beta_gamma(Q::new(1, 2), Q::new(1, 2)).is_err());
    }

    #[test]
    fn tan_at_four_thirds() {
        // tan(3π/8) = 1 + √2.
        assert!(((3.0 * PI / 8.0).tan() - (1.0 + SQRT_2)).abs() < 1e-14);
        assert!(tan_bound_certified(Q::new(4, 3)));
    }

    #[test]
    fn beta_oracle_at_six_tenths() {
        let pieces = improper_pieces(0.6, 0.6);
        let b = beta(0.4, 0.4);
        assert!((pieces[0] - b).abs() < 1e-8, "{} vs {b}", pieces[0]);
    }

    #[test]
    fn graded_nodes_integrate_polynomials() {
        let n = graded_nodes(&[-1.0, 0.3, 1.0]);
        let s: f64 = n.iter().map(|(x, w)| w * x * x).sum();
        assert!((s - 2.0 / 3.0).abs() < 1e-9, "{s}");
    }
}
