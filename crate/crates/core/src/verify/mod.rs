//! Identity and inequality suites with machine-readable reports.
//!
//! Every suite is deterministic in its inputs: random cases come from a
//! seeded ChaCha stream, and cases are sorted by descriptor before the
//! report is assembled, so reports are byte-identical across runs.

mod bounds;
mod identities;
mod weights;
mod witness;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub use bounds::{c_beta_gamma, suite_appendix, suite_norm_bounds, AppendixGrid, NormGrid};
pub use identities::{suite_parseval, suite_poincare_bertrand, suite_roundtrip};
pub use weights::{kober_t_integral, suite_calderon, suite_logweights, KOBER_RESOLUTIONS};
pub use witness::{
    witness, witness_arcsine, witness_kober, witness_range_gap, ArcsineWitness, KoberWitness, RangeGapWitness,
    TIntegral, WitnessReport, ARCSINE_PROFILE_RTOL, KOBER_DEPTHS, KOBER_GROWTH_FACTOR, WITNESSES,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Case {
    pub descriptor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Case {
    /// A case passing iff `residual ≤ tolerance`; NaN residuals fail.
    pub fn new(descriptor: impl Into<String>, lhs: f64, rhs: f64, residual: f64, tolerance: f64) -> Self {
        Self { descriptor: descriptor.into(), lhs, rhs, residual, tolerance, pass: residual <= tolerance }
    }

    /// `|lhs - rhs|` against `tolerance`.
    pub fn abs(descriptor: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(descriptor, lhs, rhs, (lhs - rhs).abs(), tolerance)
    }

    /// A case whose computation failed.
    pub fn failed(descriptor: impl Into<String>, tolerance: f64) -> Self {
        Self::new(descriptor, f64::NAN, f64::NAN, f64::INFINITY, tolerance)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub n_pass: usize,
    pub n_fail: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(suite: &str, seed: u64, mut cases: Vec<Case>) -> Self {
        cases.sort_by(|a, b| a.descriptor.cmp(&b.descriptor));
        let n_pass = cases.iter().filter(|c| c.pass).count();
        let max_residual = cases.iter().map(|c| c.residual).fold(0.0, f64::max);
        Self {
            suite: suite.into(),
            seed,
            summary: Summary { n_pass, n_fail: cases.len() - n_pass, max_residual },
            cases,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.n_fail == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub check: String,
    pub parameters: BTreeMap<String, f64>,
    pub measured: f64,
    pub bound: f64,
    /// `bound - measured`.
    pub margin: f64,
    pub slack: f64,
    pub pass: bool,
}

impl SweepPoint {
    /// An inequality `measured ≤ bound`, passing when `margin ≥ -slack`.
    pub fn le(check: &str, parameters: &[(&str, f64)], measured: f64, bound: f64, slack: f64) -> Self {
        let margin = bound - measured;
        Self {
            check: check.into(),
            parameters: parameters.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            measured,
            bound,
            margin,
            slack,
            pass: margin >= -slack,
        }
    }

    /// A point decided exactly elsewhere; `pass` is the exact verdict.
    pub fn exact(check: &str, parameters: &[(&str, f64)], measured: f64, bound: f64, pass: bool) -> Self {
        Self {
            check: check.into(),
            parameters: parameters.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            measured,
            bound,
            margin: bound - measured,
            slack: 0.0,
            pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundSweep {
    pub name: String,
    pub points: Vec<SweepPoint>,
    pub pass: bool,
}

impl BoundSweep {
    pub fn new(name: &str, points: Vec<SweepPoint>) -> Self {
        let pass = points.iter().all(|p| p.pass);
        Self { name: name.into(), points, pass }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep serializes")
    }
}

/// Settings shared by the suite runner.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub resolution: usize,
    pub spectral_n: usize,
    pub trim: f64,
    pub parseval_cases: usize,
    pub poincare_bertrand_cases: usize,
    pub roundtrip_cases: usize,
    pub calderon_cases: usize,
    pub logweights_cases: usize,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub parseval: f64,
    pub poincare_bertrand: f64,
    pub roundtrip: f64,
    /// Slack for inequalities checked by quadrature.
    pub sweep_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { parseval: 1e-6, poincare_bertrand: 1e-5, roundtrip: 1e-8, sweep_slack: 1e-9 }
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            resolution: 4096,
            spectral_n: 64,
            trim: 0.9,
            parseval_cases: 50,
            poincare_bertrand_cases: 20,
            roundtrip_cases: 100,
            calderon_cases: 11,
            logweights_cases: 11,
            tolerances: Tolerances::default(),
        }
    }
}

pub const SUITES: [&str; 7] =
    ["parseval", "poincare_bertrand", "roundtrip", "norm_bounds", "appendix", "calderon", "logweights"];

/// Output of one suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SuiteOutput {
    Report(VerificationReport),
    Sweep(BoundSweep),
}

impl SuiteOutput {
    pub fn passed(&self) -> bool {
        match self {
            SuiteOutput::Report(r) => r.passed(),
            SuiteOutput::Sweep(s) => s.pass,
        }
    }
}

/// Reports from one runner invocation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub seed: u64,
    pub suites: Vec<SuiteOutput>,
    pub pass: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run report serializes")
    }

    /// 0 when every suite passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

/// Run one named suite.
pub fn run_suite(name: &str, vc: &VerifyConfig) -> Result<SuiteOutput> {
    let t = &vc.tolerances;
    Ok(match name {
        "parseval" => SuiteOutput::Report(suite_parseval(vc.parseval_cases, vc.seed, t.parseval)?),
        "poincare_bertrand" => SuiteOutput::Report(suite_poincare_bertrand(
            vc.poincare_bertrand_cases,
            vc.seed,
            vc.trim,
            t.poincare_bertrand,
        )?),
        "roundtrip" => {
            SuiteOutput::Report(suite_roundtrip(vc.roundtrip_cases, vc.seed, vc.spectral_n, t.roundtrip)?)
        }
        "norm_bounds" => SuiteOutput::Sweep(suite_norm_bounds(&NormGrid::default(), vc.seed)?),
        "appendix" => SuiteOutput::Sweep(suite_appendix(&AppendixGrid::default(), t.sweep_slack)?),
        "calderon" => SuiteOutput::Report(suite_calderon(vc.calderon_cases, vc.resolution, vc.seed)?),
        "logweights" => SuiteOutput::Report(suite_logweights(vc.logweights_cases, vc.seed)?),
        other => {
            return Err(Error::Precondition(format!(
                "unknown suite '{other}'; valid suites: {}, all",
                SUITES.join(", ")
            )))
        }
    })
}

/// Run a named suite, or every suite for `"all"`.
pub fn run(name: &str, vc: &VerifyConfig) -> Result<RunReport> {
    let names: Vec<&str> = if name == "all" { SUITES.to_vec() } else { vec![name] };
    let suites = names.iter().map(|n| run_suite(n, vc)).collect::<Result<Vec<_>>>()?;
    let pass = suites.iter().all(SuiteOutput::passed);
    Ok(RunReport { seed: vc.seed, suites, pass })
}
