//! Command-line surface: argument parsing, the config file, and dispatch.
//!
//! Every command renders exactly what the corresponding library call
//! serializes to, so the binary stays a thin adapter. Exit codes: 0 on
//! success, 1 when a verification or witness check fails, 2 on usage or
//! infrastructure errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::chebrep::{chebyshev_nodes, csv_number as num, FunctionInput, NodeKind};
use crate::error::{Error, Result};
use crate::inversion::{solve_airfoil, Coefficient};
use crate::quad::QuadConfig;
use crate::rearrange::{norm_report, NormReport, Space};
use crate::transform::{fht, fht_hat, Method, TransformOutput, TransformResult};
use crate::verify::{self, RunReport, SuiteOutput, Tolerances, VerifyConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Spectral,
    Quadrature,
}

#[derive(Debug, Parser)]
#[command(name = "finhilbert", version, about = "Finite Hilbert transform on (-1, 1)")]
pub struct Cli {
    /// TOML config file; flags override its values
    #[arg(long, global = true, env = "FINHILBERT_CONFIG")]
    pub config: Option<PathBuf>,
    /// Sampling resolution for norms, witnesses and the Calderón suite
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Seed for randomized verification cases
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the result here instead of standard output
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply T (or T̂ with --hat) to a spectral or grid function file
    Transform {
        input: PathBuf,
        /// Apply T̂ g = -(1/√(1-x²)) T(√(1-t²) g) instead of T
        #[arg(long)]
        hat: bool,
        /// Defaults to spectral for spectral input and quadrature for grids
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// `uniform:N`, `chebyshev:N`, or a comma-separated list of points
        #[arg(long)]
        points: Option<String>,
    },
    /// Solve the airfoil equation T f = g
    Invert {
        input: PathBuf,
        /// Coefficient of the arcsine density in the solution
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        c: f64,
    },
    /// Rearrangement-invariant norms of a function file
    Norm {
        input: PathBuf,
        /// Comma-separated: l1, llogl, lloglsq, llogl:a, lp:p, weak:p
        #[arg(long, default_value = "l1,llogl")]
        space: String,
    },
    /// Run a verification suite, or all of them
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Report path; takes precedence over --output
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Reproduce a counterexample computation: kober, arcsine, range-gap
    Witness {
        #[arg(long)]
        case: String,
    },
}

/// Per-suite tolerance overrides.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    pub parseval: f64,
    pub poincare_bertrand: f64,
    pub roundtrip: f64,
    pub sweep_slack: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        let t = Tolerances::default();
        Self {
            parseval: t.parseval,
            poincare_bertrand: t.poincare_bertrand,
            roundtrip: t.roundtrip,
            sweep_slack: t.sweep_slack,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub resolution: usize,
    pub spectral_n: usize,
    pub trim: f64,
    pub seed: u64,
    pub output_format: Format,
    pub tolerances: ToleranceConfig,
}

impl Default for Config {
    fn default() -> Self {
        let v = VerifyConfig::default();
        Self {
            resolution: v.resolution,
            spectral_n: v.spectral_n,
            trim: v.trim,
            seed: v.seed,
            output_format: Format::Json,
            tolerances: ToleranceConfig::default(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let c = Config::parse_unchecked(text)?;
        c.validate()?;
        Ok(c)
    }

    fn parse_unchecked(text: &str) -> Result<Config> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Config> {
        let c = Config::load_unchecked(path)?;
        c.validate()?;
        Ok(c)
    }

    fn load_unchecked(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
        Config::parse_unchecked(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 64 {
            return Err(Error::Precondition(format!("resolution must be at least 64, got {}", self.resolution)));
        }
        if self.spectral_n < 4 {
            return Err(Error::Precondition(format!("spectral_n must be at least 4, got {}", self.spectral_n)));
        }
        if !(self.trim > 0.0 && self.trim < 1.0) {
            return Err(Error::Precondition(format!("trim must lie in (0, 1), got {}", self.trim)));
        }
        let t = &self.tolerances;
        if [t.parseval, t.poincare_bertrand, t.roundtrip, t.sweep_slack].iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::Precondition("tolerances must be non-negative".into()));
        }
        Ok(())
    }

    /// Config file (if any) with command-line flags applied on top.
    pub fn resolve(cli: &Cli) -> Result<Config> {
        let mut c = match &cli.config {
            Some(p) => Config::load_unchecked(p)?,
            None => Config::default(),
        };
        if let Some(r) = cli.resolution {
            c.resolution = r;
        }
        if let Some(s) = cli.seed {
            c.seed = s;
        }
        if let Some(f) = cli.format {
            c.output_format = f;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn verify_config(&self) -> VerifyConfig {
        let t = &self.tolerances;
        VerifyConfig {
            seed: self.seed,
            resolution: self.resolution,
            spectral_n: self.spectral_n,
            trim: self.trim,
            tolerances: Tolerances {
                parseval: t.parseval,
                poincare_bertrand: t.poincare_bertrand,
                roundtrip: t.roundtrip,
                sweep_slack: t.sweep_slack,
            },
            ..VerifyConfig::default()
        }
    }
}

/// Evaluation points from `uniform:N`, `chebyshev:N`, or `x1,x2,...`.
pub fn parse_points(spec: &str) -> Result<Vec<f64>> {
    let count = |n: &str| {
        n.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| Error::Parse(format!("bad point count in '{spec}'")))
    };
    match spec.split_once(':') {
        Some(("uniform", n)) => {
            let n = count(n)?;
            Ok((1..=n).map(|i| -1.0 + 2.0 * i as f64 / (n + 1) as f64).collect())
        }
        Some(("chebyshev", n)) => chebyshev_nodes(NodeKind::ChebyshevT, count(n)?),
        Some(_) => Err(Error::Parse(format!("unknown point spec '{spec}' (uniform:N, chebyshev:N, or a list)"))),
        None => spec
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad point '{s}'"))))
            .collect(),
    }
}

/// Rendered command output.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub exit_code: i32,
    /// Where to write `body`; standard output when absent.
    pub destination: Option<PathBuf>,
}

fn csv_unavailable(command: &str) -> Error {
    Error::UnsupportedClass(format!("{command} output is JSON only; csv is available for transform, norm and verify"))
}

fn csv_rows<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv")
}

pub fn transform_csv(r: &TransformResult) -> String {
    match &r.output {
        TransformOutput::Grid(g) => g.to_csv(),
        TransformOutput::Spectral(s) => {
            let weight = serde_json::to_value(s.weight).expect("weight serializes");
            let weight = weight.as_str().unwrap_or_default().to_string();
            csv_rows(
                &["weight", "n", "coeff"],
                s.coeffs.iter().enumerate().map(|(n, c)| [weight.clone(), n.to_string(), num(*c)]),
            )
        }
    }
}

pub fn norm_csv(r: &NormReport) -> String {
    csv_rows(
        &["space", "value", "coarse_value", "growing"],
        r.norms.iter().map(|(k, e)| [k.clone(), num(e.value), num(e.coarse_value), e.growing.to_string()]),
    )
}

/// One row per case or sweep point; sweep margins appear as negated residuals.
pub fn run_csv(r: &RunReport) -> String {
    let mut rows: Vec<[String; 8]> = Vec::new();
    for s in &r.suites {
        match s {
            SuiteOutput::Report(rep) => rows.extend(rep.cases.iter().map(|c| {
                [
                    rep.suite.clone(),
                    c.descriptor.clone(),
                    String::new(),
                    num(c.lhs),
                    num(c.rhs),
                    num(c.residual),
                    num(c.tolerance),
                    c.pass.to_string(),
                ]
            })),
            SuiteOutput::Sweep(sw) => rows.extend(sw.points.iter().map(|p| {
                let params: Vec<String> = p.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
                [
                    sw.name.clone(),
                    p.check.clone(),
                    params.join(";"),
                    num(p.measured),
                    num(p.bound),
                    num(-p.margin),
                    num(p.slack),
                    p.pass.to_string(),
                ]
            })),
        }
    }
    csv_rows(&["suite", "case", "parameters", "lhs", "rhs", "residual", "tolerance", "pass"], rows)
}

fn ok(body: String, dest: Option<&PathBuf>) -> Outcome {
    Outcome { body, exit_code: 0, destination: dest.cloned() }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = Config::resolve(cli)?;
    let quad = QuadConfig::default();
    let csv = cfg.output_format == Format::Csv;
    let out = cli.output.as_ref();
    match &cli.command {
        Command::Transform { input, hat, method, points } => {
            let f = FunctionInput::read(input)?;
            let method = match (method, &f) {
                (Some(MethodArg::Spectral), _) | (None, FunctionInput::Spectral(_)) => Method::Spectral,
                _ => Method::Quadrature,
            };
            let xs = match points {
                Some(p) => Some(parse_points(p)?),
                None if method == Method::Quadrature && matches!(f, FunctionInput::Spectral(_)) => {
                    Some(chebyshev_nodes(NodeKind::ChebyshevT, cfg.spectral_n)?)
                }
                None => None,
            };
            let r = if *hat { fht_hat(&f, method, xs.as_deref(), &quad)? } else { fht(&f, method, xs.as_deref(), &quad)? };
            Ok(ok(if csv { transform_csv(&r) } else { r.to_json() }, out))
        }
        Command::Invert { input, c } => {
            if csv {
                return Err(csv_unavailable("invert"));
            }
            let g = FunctionInput::read(input)?;
            let sol = solve_airfoil(&g, Coefficient::real(*c), cfg.spectral_n, &quad)?;
            Ok(ok(sol.to_json(), out))
        }
        Command::Norm { input, space } => {
            let f = FunctionInput::read(input)?;
            let spaces = space.split(',').map(Space::parse).collect::<Result<Vec<_>>>()?;
            let r = norm_report(f.as_scalar(), &spaces, cfg.resolution)?;
            Ok(ok(if csv { norm_csv(&r) } else { r.to_json() }, out))
        }
        Command::Verify { suite, report } => {
            let r = verify::run(suite, &cfg.verify_config())?;
            Ok(Outcome {
                body: if csv { run_csv(&r) } else { r.to_json() },
                exit_code: r.exit_code(),
                destination: report.as_ref().or(out).cloned(),
            })
        }
        Command::Witness { case } => {
            if csv {
                return Err(csv_unavailable("witness"));
            }
            let w = verify::witness(case, cfg.resolution, cfg.spectral_n)?;
            Ok(Outcome { body: w.to_json(), exit_code: if w.passed() { 0 } else { 1 }, destination: out.cloned() })
        }
    }
}

fn emit(o: &Outcome) -> Result<()> {
    match &o.destination {
        Some(p) => std::fs::write(p, &o.body)?,
        None => {
            let mut out = std::io::stdout().lock();
            // A closed pipe (e.g. `| head`) is not an error for the command.
            match writeln!(out, "{}", o.body).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

/// Parse `args`, run the command, and return the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli).and_then(|o| emit(&o).map(|_| o.exit_code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("finhilbert").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn points_specs() {
        assert_eq!(parse_points("uniform:3").unwrap(), vec![-0.5, 0.0, 0.5]);
        assert_eq!(parse_points("0.25, -0.5").unwrap(), vec![0.25, -0.5]);
        assert_eq!(parse_points("chebyshev:4").unwrap().len(), 4);
        assert!(parse_points("uniform:0").is_err());
        assert!(parse_points("grid:4").is_err());
    }

    #[test]
    fn config_parses_and_validates() {
        let c = Config::parse("resolution = 128\ntrim = 0.5\n[tolerances]\nparseval = 1e-7\n").unwrap();
        assert_eq!((c.resolution, c.trim, c.tolerances.parseval), (128, 0.5, 1e-7));
        assert_eq!(c.spectral_n, 64);
        assert!(Config::parse("resolution = 32").is_err());
        assert!(Config::parse("spectral_n = 3").is_err());
        assert!(Config::parse("trim = 1.0").is_err());
        assert!(Config::parse("colour = 1").is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "resolution = 128\nseed = 3\n").unwrap();
        let c = Config::resolve(&cli(&["--config", p.to_str().unwrap(), "--seed", "9", "verify"])).unwrap();
        assert_eq!((c.resolution, c.seed), (128, 9));
        assert_eq!(c.verify_config().seed, 9);
    }

    #[test]
    fn negative_coefficient_parses() {
        match cli(&["invert", "g.json", "--c", "-3.7"]).command {
            Command::Invert { c, .. } => assert_eq!(c, -3.7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn verify_unknown_suite_is_an_error() {
        let e = execute(&cli(&["verify", "--suite", "nope"])).unwrap_err().to_string();
        assert!(e.contains("appendix"), "{e}");
    }

    #[test]
    fn spectral_csv_lists_coefficients() {
        let f = crate::chebrep::SpectralFunction::new(crate::chebrep::WeightClass::InvSqrt, vec![1.0, 2.0]).unwrap();
        let r = crate::transform::fht_spectral(&f).unwrap();
        let text = transform_csv(&r);
        assert!(text.starts_with("weight,n,coeff\n"), "{text}");
        assert_eq!(text.lines().count(), 1 + r.spectral().unwrap().coeffs.len());
    }
}
