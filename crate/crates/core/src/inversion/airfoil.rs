//! Airfoil equation `T f = g`: every solution in `L log L` is `T̂ g + c/√(1-x²)`.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::chebrep::{chebyshev_nodes, fit, FunctionInput, GridFunction, NodeKind, SpectralFunction, WeightClass};
use crate::error::{Error, Result};
use crate::func::{integrate_abs_pow, sqrt_weight_near, FnWithFeatures, ScalarFn};
use crate::quad::QuadConfig;
use crate::transform::{hat_spectral, hilbert_spectral, pv_hat_value};

/// Homogeneous coefficient; complex values act through real and imaginary parts.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Coefficient {
    pub re: f64,
    pub im: f64,
}

impl Coefficient {
    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }
}

impl Serialize for Coefficient {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.im == 0.0 {
            s.serialize_f64(self.re)
        } else {
            let mut m = s.serialize_map(Some(2))?;
            m.serialize_entry("re", &self.re)?;
            m.serialize_entry("im", &self.im)?;
            m.end()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Particular {
    Spectral(SpectralFunction),
    Grid(GridFunction),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AirfoilSolution {
    /// `T̂ g`.
    pub particular: Particular,
    #[serde(rename = "c")]
    pub homogeneous_coeff: Coefficient,
    /// `‖T f - g‖_{L¹}`; independent of `c` since `T` annihilates the arcsine density.
    pub residual_l1: f64,
    /// Set when the grid path finds `T̂ g` unresolved (evidence that `g` is out of range).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl AirfoilSolution {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("solution serializes")
    }

    /// Real part of the full solution `T̂ g + Re(c)/√(1-x²)` on the spectral path.
    pub fn full_spectral(&self) -> Option<SpectralFunction> {
        match &self.particular {
            Particular::Spectral(p) => {
                let mut f = p.clone();
                f.coeffs[0] += self.homogeneous_coeff.re;
                Some(f)
            }
            Particular::Grid(_) => None,
        }
    }

    /// Real part of the full solution at `x`.
    pub fn full_value(&self, x: f64) -> f64 {
        let p = match &self.particular {
            Particular::Spectral(s) => s.value(x),
            Particular::Grid(g) => g.value(x),
        };
        p + self.homogeneous_coeff.re / sqrt_weight_near(0.0, x)
    }
}

/// `‖Σ d_n U_n‖_{L¹(-1,1)}`.
pub fn flat_l1(d: &SpectralFunction) -> f64 {
    if d.coeffs.iter().all(|&c| c == 0.0) {
        return 0.0;
    }
    integrate_abs_pow(d, 1.0, -1.0, 1.0, &QuadConfig::default())
}

/// Solve `T f = g` with homogeneous part `c`.
///
/// Flat U-series use exact coefficient algebra. Anything else samples `T̂ g`
/// by quadrature at `spectral_n` Chebyshev–Gauss nodes; the residual applies
/// `T` to the interpolating `InvSqrt` series through those samples.
pub fn solve_airfoil(g: &FunctionInput, c: Coefficient, spectral_n: usize, cfg: &QuadConfig) -> Result<AirfoilSolution> {
    match g {
        FunctionInput::Spectral(s) if s.weight == WeightClass::Flat => {
            let particular = hat_spectral(s)?;
            let back = hilbert_spectral(&particular);
            let residual_l1 = flat_l1(&back.add(&s.scale(-1.0))?);
            Ok(AirfoilSolution {
                particular: Particular::Spectral(particular),
                homogeneous_coeff: c,
                residual_l1,
                diagnostic: None,
            })
        }
        other => solve_airfoil_quadrature(other.as_scalar(), c, spectral_n, cfg),
    }
}

/// Grid path of [`solve_airfoil`] for any function.
pub fn solve_airfoil_quadrature<G: ScalarFn + ?Sized>(
    g: &G,
    c: Coefficient,
    spectral_n: usize,
    cfg: &QuadConfig,
) -> Result<AirfoilSolution> {
    if spectral_n < 4 {
        return Err(Error::Precondition("spectral_n must be at least 4".into()));
    }
    let nodes = chebyshev_nodes(NodeKind::ChebyshevT, spectral_n)?;
    let values = nodes.iter().map(|&x| pv_hat_value(g, x, cfg)).collect::<Result<Vec<_>>>()?;
    let particular = GridFunction::new(nodes, values, NodeKind::ChebyshevT)?;
    let series = fit(&particular, WeightClass::InvSqrt)?;
    let back = hilbert_spectral(&series);
    let diff = FnWithFeatures::new(|x: f64| back.value(x) - g.value(x), g.features());
    let residual_l1 = integrate_abs_pow(&diff, 1.0, -1.0, 1.0, cfg);
    // Slow coefficient decay means the samples do not resolve T̂ g.
    let n = series.coeffs.len();
    let head = series.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let tail = series.coeffs[n - n / 8..].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let diagnostic = (tail > 1e-6 * head.max(1e-300)).then(|| {
        format!("T̂ g not resolved by {n} Chebyshev terms (tail/head coefficient ratio {:.3e}); g may be out of range", tail / head)
    });
    Ok(AirfoilSolution {
        particular: Particular::Grid(particular),
        homogeneous_coeff: c,
        residual_l1,
        diagnostic,
    })
}
