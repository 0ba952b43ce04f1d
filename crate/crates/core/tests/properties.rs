use proptest::prelude::*;

use finhilbert::chebrep::{fit, sample_for_fit, FunctionInput, GridFunction, NodeKind, SpectralFunction, WeightClass};
use finhilbert::cli::Config;
use finhilbert::func::{integrate_fn, Feature, FnWithFeatures, ScalarFn};
use finhilbert::inversion::{solve_airfoil, Coefficient};
use finhilbert::quad::{gauss_legendre, QuadConfig, QuadratureRule, RuleKind};
use finhilbert::rearrange::{rearrangement, RearrangementProfile};
use finhilbert::transform::{hat_spectral, hilbert_spectral, pv_value, spectral_mean, HatOf};
use finhilbert::verify::{
    suite_appendix, suite_norm_bounds, suite_parseval, AppendixGrid, BoundSweep, NormGrid, SweepPoint,
};

fn coeffs(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..=max)
}

fn weight() -> impl Strategy<Value = WeightClass> {
    prop_oneof![Just(WeightClass::InvSqrt), Just(WeightClass::Flat), Just(WeightClass::Sqrt)]
}

fn singular_weight() -> impl Strategy<Value = WeightClass> {
    prop_oneof![Just(WeightClass::InvSqrt), Just(WeightClass::Sqrt)]
}

fn spectral(w: WeightClass, c: Vec<f64>) -> SpectralFunction {
    SpectralFunction::new(w, c).unwrap()
}

/// Interior points `-1 + 2i/22`, `i = 1..=21`.
fn points21() -> Vec<f64> {
    (1..=21).map(|i| -1.0 + 2.0 * i as f64 / 22.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fit_inverts_sampling(w in weight(), c in coeffs(64)) {
        let f = spectral(w, c.clone());
        let back = fit(&sample_for_fit(&f, w, 64).unwrap(), w).unwrap();
        for (i, b) in back.coeffs.iter().enumerate() {
            let want = c.get(i).copied().unwrap_or(0.0);
            prop_assert!((b - want).abs() < 1e-10, "coefficient {i}: {b} vs {want}");
        }
    }

    #[test]
    fn gauss_legendre_exact_to_degree_2n_minus_1(n in 1usize..40, frac in 0.0f64..1.0) {
        let d = ((2 * n - 1) as f64 * frac) as i32;
        let (x, w) = gauss_legendre(n);
        let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(d)).sum();
        let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d + 1) as f64 };
        prop_assert!((q - exact).abs() <= 1e-12 * exact.abs().max(1.0), "n={n} d={d}: {q} vs {exact}");
    }

    #[test]
    fn chebyshev_t_orthogonality(m in 0usize..30, k in 0usize..30) {
        let rule = QuadratureRule::new(RuleKind::ChebyshevT, 32);
        let t = |n: usize, x: f64| (n as f64 * x.acos()).cos();
        let q = rule.apply(|x| t(m, x) * t(k, x));
        let pi = std::f64::consts::PI;
        let exact = if m != k { 0.0 } else if m == 0 { pi } else { pi / 2.0 };
        prop_assert!((q - exact).abs() < 1e-12, "m={m} k={k}: {q}");
    }

    #[test]
    fn linearity_in_coefficients(w in singular_weight(), a in coeffs(16), b in coeffs(16), s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let (f, g) = (spectral(w, a), spectral(w, b));
        let lhs = hilbert_spectral(&f.scale(s).add(&g.scale(t)).unwrap());
        let rhs = hilbert_spectral(&f).scale(s).add(&hilbert_spectral(&g).scale(t)).unwrap();
        let n = lhs.coeffs.len().max(rhs.coeffs.len());
        for i in 0..n {
            let (l, r) = (lhs.coeffs.get(i).copied().unwrap_or(0.0), rhs.coeffs.get(i).copied().unwrap_or(0.0));
            prop_assert!((l - r).abs() < 1e-10);
        }
    }

    #[test]
    fn kernel_is_exactly_the_constant_term(c in coeffs(8), zero_tail in any::<bool>()) {
        let mut c = c;
        if zero_tail {
            c.iter_mut().skip(1).for_each(|v| *v = 0.0);
        }
        let zero = hilbert_spectral(&spectral(WeightClass::InvSqrt, c.clone())).coeffs.iter().all(|&v| v == 0.0);
        prop_assert_eq!(zero, c[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn round_trip_range(g in coeffs(16)) {
        let g = spectral(WeightClass::Flat, g);
        let back = hilbert_spectral(&hat_spectral(&g).unwrap());
        prop_assert_eq!(back.coeffs, g.coeffs);
    }

    #[test]
    fn round_trip_projection(f in coeffs(16)) {
        let f = spectral(WeightClass::InvSqrt, f);
        let back = hat_spectral(&hilbert_spectral(&f)).unwrap();
        let mut want = f.coeffs.clone();
        want[0] = 0.0;
        if want.len() == 1 {
            want.push(0.0);
        }
        prop_assert_eq!(back.coeffs, want);
    }

    #[test]
    fn solution_family_and_homogeneous_mean(g in coeffs(16), c1 in -5.0f64..5.0, c2 in -5.0f64..5.0) {
        let g = FunctionInput::Spectral(spectral(WeightClass::Flat, g));
        let cfg = QuadConfig::default();
        let s1 = solve_airfoil(&g, Coefficient::real(c1), 64, &cfg).unwrap();
        let s2 = solve_airfoil(&g, Coefficient::real(c2), 64, &cfg).unwrap();
        prop_assert_eq!(&s1.particular, &s2.particular);
        prop_assert_eq!(s1.residual_l1, s2.residual_l1);
        for (s, c) in [(&s1, c1), (&s2, c2)] {
            prop_assert!((spectral_mean(&s.full_spectral().unwrap()) - c).abs() < 1e-8);
        }
    }

    #[test]
    fn step_profile_invariants(v in prop::collection::vec(-5.0f64..5.0, 1..200), u in prop::collection::vec(0.0f64..1.0, 200), s in 0.01f64..10.0) {
        let f = RearrangementProfile::from_cells(&v).unwrap();
        prop_assert!(f.levels.windows(2).all(|w| w[0] >= w[1]));
        let (l1, ll, ll2) = (f.l1(), f.llogl(), f.llogl_alpha(2.0).unwrap());
        prop_assert!(l1 <= ll * (1.0 + 1e-14) && ll <= ll2 * (1.0 + 1e-14), "{l1} {ll} {ll2}");

        let scaled: Vec<f64> = v.iter().map(|x| s * x).collect();
        let fs = RearrangementProfile::from_cells(&scaled).unwrap();
        for (a, b) in fs.levels.iter().zip(&f.levels) {
            prop_assert!((a - s * b).abs() <= 1e-14 * (s * b).max(1e-300));
        }

        // 0 ≤ g ≤ |f| cellwise, hence g* ≤ f* and S(g*) ≤ S(f*).
        let g: Vec<f64> = v.iter().zip(&u).map(|(x, w)| x.abs() * w).collect();
        let gs = RearrangementProfile::from_cells(&g).unwrap();
        for t in [1e-3, 0.1, 0.5, 1.0, 1.9] {
            prop_assert!(gs.calderon(t).unwrap() <= f.calderon(t).unwrap() * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn margins_follow_definition(measured in -10.0f64..10.0, bound in -10.0f64..10.0, slack in 0.0f64..1.0) {
        let p = SweepPoint::le("x", &[("p", 1.5)], measured, bound, slack);
        prop_assert_eq!(p.margin, bound - measured);
        prop_assert_eq!(p.pass, bound - measured >= -slack);
        prop_assert_eq!(BoundSweep::new("s", vec![p.clone()]).pass, p.pass);
    }

    #[test]
    fn config_invariants(resolution in 0usize..200, spectral_n in 0usize..10, trim in -0.5f64..1.5) {
        let text = format!("resolution = {resolution}\nspectral_n = {spectral_n}\ntrim = {trim:?}\n");
        let ok = resolution >= 64 && spectral_n >= 4 && trim > 0.0 && trim < 1.0;
        prop_assert_eq!(Config::parse(&text).is_ok(), ok);
    }
}

/// `∫_{-1}^{1} |interpolant|`, constant beyond the end nodes.
fn grid_abs_integral(nodes: &[f64], values: &[f64]) -> f64 {
    let n = nodes.len();
    let mut s = values[0].abs() * (nodes[0] + 1.0) + values[n - 1].abs() * (1.0 - nodes[n - 1]);
    for i in 0..n - 1 {
        let (a, b, h) = (values[i], values[i + 1], nodes[i + 1] - nodes[i]);
        s += if a * b >= 0.0 {
            0.5 * (a.abs() + b.abs()) * h
        } else {
            0.5 * (a * a + b * b) / (a.abs() + b.abs()) * h
        };
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn equimeasurability_of_grid_functions(raw in prop::collection::vec((-0.99f64..0.99, -3.0f64..3.0), 2..24)) {
        let mut pts = raw;
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-3);
        prop_assume!(pts.len() >= 2);
        let (nodes, values): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let exact = grid_abs_integral(&nodes, &values);
        let g = GridFunction::new(nodes, values, NodeKind::Custom).unwrap();
        let star = rearrangement(&g, 4096).unwrap().l1();
        prop_assert!((star - exact).abs() <= 1e-8 * exact, "{star} vs {exact}");
    }

    #[test]
    fn spectral_and_quadrature_agree(w in singular_weight(), c in coeffs(16)) {
        let f = spectral(w, c);
        let t = hilbert_spectral(&f);
        let cfg = QuadConfig::default();
        for x in points21() {
            let q = pv_value(&f, x, &cfg).unwrap();
            prop_assert!((q - t.value(x)).abs() < 1e-7, "x={x}: {q} vs {}", t.value(x));
        }
    }

    #[test]
    fn multiplication_by_t(c in coeffs(12)) {
        // T(t f(t))(x) = (1/π)∫f + x T(f)(x).
        let f = spectral(WeightClass::InvSqrt, c);
        let tf = FnWithFeatures::new(|t: f64| t * f.value(t), vec![Feature::singular(-1.0), Feature::singular(1.0)]);
        let t = hilbert_spectral(&f);
        let cfg = QuadConfig::default();
        for x in [-0.9, -0.4, 0.05, 0.6, 0.85] {
            let lhs = pv_value(&tf, x, &cfg).unwrap();
            let rhs = spectral_mean(&f) + x * t.value(x);
            prop_assert!((lhs - rhs).abs() < 1e-7, "x={x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn hat_has_zero_mean(g in coeffs(16)) {
        let g = spectral(WeightClass::Flat, g);
        prop_assert_eq!(spectral_mean(&hat_spectral(&g).unwrap()), 0.0);
        let quad = integrate_fn(&HatOf::new(&g), -1.0, 1.0, &QuadConfig::default().outer());
        prop_assert!(quad.abs() < 1e-8, "{quad}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn reports_are_deterministic(seed in any::<u64>()) {
        let a = suite_parseval(2, seed, 1e-6).unwrap();
        let b = suite_parseval(2, seed, 1e-6).unwrap();
        prop_assert_eq!(a.seed, seed);
        prop_assert_eq!(a.to_json(), b.to_json());
    }
}

#[test]
fn default_grids_have_margins_within_slack() {
    let a = suite_appendix(&AppendixGrid::default(), 1e-9).unwrap();
    assert_eq!(a.to_json(), suite_appendix(&AppendixGrid::default(), 1e-9).unwrap().to_json());
    let n = suite_norm_bounds(&NormGrid::default(), 7).unwrap();
    for p in a.points.iter().chain(&n.points) {
        assert!(p.margin >= -1e-9, "{} {:?}: margin {}", p.check, p.parameters, p.margin);
    }
}
