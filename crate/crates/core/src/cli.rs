//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 when a property check fails, 2 on usage
//! errors (bad flags, malformed inputs, unsupported combinations).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::harness::{self, SamplerConfig, SUITES};
use crate::linalg::{self, CMatrix};
use crate::matfile::MatrixFile;
use crate::mcfunc::{self, MCFunction, MetricConstant};
use crate::qig::{self, DensityMatrix, Observable};
use crate::quad::QuadratureConfig;
use crate::report::PropertyReport;
use crate::repr;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "skewinfo", version, about = "Monotone metrics and metric adjusted skew information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct MetricArgs {
    /// wyd, wy, bures, kubo, bridge, extreme or variant-bridge
    #[arg(long)]
    metric: String,
    /// WYD or variant-bridge parameter
    #[arg(long)]
    p: Option<f64>,
    /// Bridge parameter
    #[arg(long)]
    gamma: Option<f64>,
    /// Extreme-point parameter
    #[arg(long)]
    lambda: Option<f64>,
}

impl MetricArgs {
    fn build(&self) -> Result<MCFunction> {
        let mut params = BTreeMap::new();
        for (key, value) in [("p", self.p), ("gamma", self.gamma), ("lambda", self.lambda)] {
            if let Some(v) = value {
                params.insert(key.to_string(), v);
            }
        }
        MCFunction::builtin(&self.metric, &params)
    }
}

#[derive(Args, Debug, Clone)]
struct SamplingArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Comma-separated matrix dimensions
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,6")]
    dims: Vec<usize>,
}

impl SamplingArgs {
    fn config(&self) -> SamplerConfig {
        SamplerConfig { seed: self.seed, dims: self.dims.clone(), trials: self.trials, ..Default::default() }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate c, ĉ, d and (for extreme metrics) f_λ at one point
    Eval {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
    },
    /// Print the metric constant m(c)
    Constant {
        #[command(flatten)]
        metric: MetricArgs,
    },
    /// Print density samples, atoms and total mass of the representing measure
    Measure {
        #[command(flatten)]
        metric: MetricArgs,
        /// Number of interior sample points
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
    /// Reconstruct c from a representation on a log grid and report the error
    Reconstruct {
        #[command(flatten)]
        metric: MetricArgs,
        /// measure or h
        #[arg(long, default_value = "measure")]
        route: String,
        #[arg(long, default_value_t = 7)]
        grid: usize,
        #[arg(long, default_value_t = 1e-3)]
        lo: f64,
        #[arg(long, default_value_t = 1e3)]
        hi: f64,
        /// Failure threshold; defaults to 1e-6 (measure) or 1e-5 (h)
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Skew information, variance and their ratio
    Skew {
        #[command(flatten)]
        metric: MetricArgs,
        /// Density matrix file or inline diag(...)
        #[arg(long)]
        rho: String,
        /// Observable file or inline sigmax, sigmay, sigmaz, identity(n), diag(...)
        #[arg(long)]
        obs: String,
    },
    /// Real and imaginary parts of the metric adjusted correlation
    Corr {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        obs: String,
        #[arg(long)]
        obs2: String,
    },
    /// Run one property suite
    Verify {
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Restrict to one metric (suite defaults otherwise)
        #[arg(long)]
        metric: Option<String>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Shift every kernel by this amount before running
        #[arg(long)]
        fault: Option<f64>,
        /// Write the full JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every suite and print the representation and property tables
    Report {
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Write the tables here as well
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Parse(format!("output: {e}"))
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Eval { metric, x, y } => {
            let mc = metric.build()?;
            let c = mc.eval_c(x, y)?;
            let c_hat = mc.eval_c_hat(x, y)?;
            let d = match mc.eval_d(x, y) {
                Ok(d) => d.to_string(),
                Err(Error::NonRegular(_)) => "non-regular".into(),
                Err(e) => return Err(e),
            };
            let f_lambda = match mc.family() {
                Some(mcfunc::Family::Extreme { lambda }) => mcfunc::eval_f_lambda(lambda, x, y)?.to_string(),
                _ => String::new(),
            };
            writeln!(out, "metric,x,y,c,c_hat,d,f_lambda").map_err(io)?;
            writeln!(out, "{},{x},{y},{c},{c_hat},{d},{f_lambda}", mc.label()).map_err(io)?;
        }
        Command::Constant { metric } => {
            let mc = metric.build()?;
            writeln!(out, "{}", mc.metric_constant()).map_err(io)?;
        }
        Command::Measure { metric, points } => {
            let mc = metric.build()?;
            let measure = repr::measure_of(&mc)?;
            let (a, b) = measure.endpoint_exponents();
            writeln!(out, "kind,lambda,value").map_err(io)?;
            if measure.has_density() {
                for i in 1..=points {
                    let l = i as f64 / (points + 1) as f64;
                    writeln!(out, "density,{l},{}", measure.density(l)).map_err(io)?;
                }
                writeln!(out, "exponent-at-0,,{a}").map_err(io)?;
                writeln!(out, "exponent-at-1,,{b}").map_err(io)?;
            }
            for &(loc, mass) in measure.atoms() {
                writeln!(out, "atom,{loc},{mass}").map_err(io)?;
            }
            let mass = measure.total_mass(&QuadratureConfig::default())?;
            writeln!(out, "total-mass,,{mass}").map_err(io)?;
        }
        Command::Reconstruct { metric, route, grid, lo, hi, tol } => {
            let mc = metric.build()?;
            let points = mcfunc::KernelGrid::log_grid(grid, lo, hi)?.points;
            let cfg = QuadratureConfig::default();
            let (tol, values) = match route.as_str() {
                "measure" => {
                    let m = repr::measure_of(&mc)?;
                    let v: Result<Vec<f64>> =
                        points.iter().map(|&(x, y)| repr::reconstruct_from_measure(&m, x, y, &cfg)).collect();
                    (tol.unwrap_or(1e-6), v?)
                }
                "h" => {
                    let h = repr::h_repr_of(&mc)?;
                    let v: Result<Vec<f64>> =
                        points.iter().map(|&(x, y)| repr::reconstruct_from_h(&h, x, y, &cfg)).collect();
                    (tol.unwrap_or(1e-5), v?)
                }
                other => return Err(Error::Domain(format!("unknown route {other}; expected measure or h"))),
            };
            let mut max_err: f64 = 0.0;
            for (&(x, y), v) in points.iter().zip(&values) {
                let want = mc.eval_c(x, y)?;
                max_err = max_err.max((v - want).abs() / want);
            }
            writeln!(out, "metric,route,points,max_rel_error,tol,status").map_err(io)?;
            let ok = max_err <= tol;
            let status = if ok { "pass" } else { "FAIL" };
            writeln!(out, "{},{route},{},{max_err:.6e},{tol:e},{status}", mc.label(), points.len()).map_err(io)?;
            return Ok(if ok { EXIT_OK } else { EXIT_PROPERTY_FAILURE });
        }
        Command::Skew { metric, rho, obs } => {
            let mc = metric.build()?;
            let rho = load_density(&rho)?;
            let a = load_observable(&obs, rho.dim())?;
            let i = qig::skew_info(&mc, &rho, &a)?;
            let var = qig::variance(&rho, &a)?;
            let ratio = if var > 0.0 { (i / var).to_string() } else { "nan".into() };
            writeln!(out, "metric,I,Var,ratio").map_err(io)?;
            writeln!(out, "{},{i},{var},{ratio}", mc.label()).map_err(io)?;
        }
        Command::Corr { metric, rho, obs, obs2 } => {
            let mc = metric.build()?;
            let rho = load_density(&rho)?;
            let a = load_observable(&obs, rho.dim())?;
            let b = load_observable(&obs2, rho.dim())?;
            let c = qig::correlation(&mc, &rho, a.matrix(), b.matrix())?;
            writeln!(out, "metric,re,im").map_err(io)?;
            writeln!(out, "{},{},{}", mc.label(), c.re, c.im).map_err(io)?;
        }
        Command::Verify { suite, sampling, metric, p, gamma, lambda, fault, out: path } => {
            if !SUITES.contains(&suite.as_str()) {
                return Err(Error::UnknownSuite(suite));
            }
            let mut metrics = match metric {
                Some(name) => vec![MetricArgs { metric: name, p, gamma, lambda }.build()?],
                None => {
                    if p.is_some() || gamma.is_some() || lambda.is_some() {
                        return Err(Error::Domain("--p, --gamma and --lambda need --metric".into()));
                    }
                    harness::default_metrics(&suite)?
                }
            };
            if let Some(delta) = fault {
                metrics = harness::inject_fault(&metrics, delta);
            }
            let report = harness::run_suite(&suite, &sampling.config(), &metrics)?;
            writeln!(out, "{}", PropertyReport::csv_header()).map_err(io)?;
            writeln!(out, "{}", report.csv_row()).map_err(io)?;
            for case in &report.cases {
                writeln!(out, "# trial {} {}: violation {:e} > {:e}: {}", case.trial, case.check, case.violation, case.threshold, case.detail)
                    .map_err(io)?;
            }
            if let Some(path) = path {
                let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Parse(e.to_string()))?;
                std::fs::write(&path, json).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            }
            return Ok(if report.passed() { EXIT_OK } else { EXIT_PROPERTY_FAILURE });
        }
        Command::Report { sampling, out: path } => {
            let (text, ok) = full_report(&sampling.config())?;
            out.write_all(text.as_bytes()).map_err(io)?;
            if let Some(path) = path {
                std::fs::write(&path, &text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            }
            return Ok(if ok { EXIT_OK } else { EXIT_PROPERTY_FAILURE });
        }
    }
    Ok(EXIT_OK)
}

/// Representation table (one row per tabulated metric) followed by one row
/// per (suite, metric) pair.
fn full_report(cfg: &SamplerConfig) -> Result<(String, bool)> {
    let mut text = String::new();
    let mut ok = true;
    let qcfg = QuadratureConfig::default();
    let points = mcfunc::KernelGrid::log_grid(7, 1e-3, 1e3)?.points;
    text.push_str("metric,metric_constant,measure_mass,measure_max_rel_error,h_c0,h_max_rel_error\n");
    let mut rep_metrics = harness::default_metrics("reconstruction-measure")?;
    rep_metrics.push(MCFunction::variant_bridge(0.5)?);
    for mc in &rep_metrics {
        let max_err = |f: &dyn Fn(f64, f64) -> Result<f64>| -> Result<f64> {
            let mut e: f64 = 0.0;
            for &(x, y) in &points {
                let want = mc.eval_c(x, y)?;
                e = e.max((f(x, y)? - want).abs() / want);
            }
            Ok(e)
        };
        let (mass, m_err) = match repr::measure_of(mc) {
            Ok(m) => {
                let err = max_err(&|x, y| repr::reconstruct_from_measure(&m, x, y, &qcfg))?;
                ok &= err <= if m.has_density() { 1e-6 } else { 1e-14 };
                (format!("{}", m.total_mass(&qcfg)?), format!("{err:.3e}"))
            }
            Err(Error::Unsupported(_)) => ("n/a".into(), "n/a".into()),
            Err(e) => return Err(e),
        };
        let (c0, h_err) = match repr::h_repr_of(mc) {
            Ok(h) => {
                let err = max_err(&|x, y| repr::reconstruct_from_h(&h, x, y, &qcfg))?;
                ok &= err <= 1e-5;
                (format!("{}", h.c0), format!("{err:.3e}"))
            }
            Err(Error::Unsupported(_)) => ("n/a".into(), "n/a".into()),
            Err(e) => return Err(e),
        };
        let constant = match mc.metric_constant() {
            MetricConstant::Regular(m) => m.to_string(),
            MetricConstant::NonRegular => "non-regular".into(),
        };
        text.push_str(&format!("{},{constant},{mass},{m_err},{c0},{h_err}\n", mc.label()));
    }
    text.push('\n');
    text.push_str(PropertyReport::csv_header());
    text.push('\n');
    for suite in SUITES {
        for mc in harness::default_metrics(suite)? {
            let r = harness::run_suite(suite, cfg, std::slice::from_ref(&mc))?;
            ok &= r.passed();
            text.push_str(&r.csv_row());
            text.push('\n');
        }
    }
    Ok((text, ok))
}

fn parse_list(inner: &str) -> Result<Vec<f64>> {
    inner
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("diag({inner}): {e}"))))
        .collect()
}

fn inline_diag(spec: &str) -> Option<Result<Vec<f64>>> {
    let inner = spec.trim().strip_prefix("diag(")?.strip_suffix(')')?;
    Some(parse_list(inner))
}

fn load_density(spec: &str) -> Result<DensityMatrix> {
    if let Some(values) = inline_diag(spec) {
        return DensityMatrix::new(linalg::diag(&values?)).map_err(|e| Error::Parse(format!("{spec}: {e}")));
    }
    MatrixFile::read(Path::new(spec))?.into_density(spec)
}

fn load_observable(spec: &str, dim: usize) -> Result<Observable> {
    let m: Option<CMatrix> = match spec.trim() {
        "sigmax" => Some(linalg::pauli_x()),
        "sigmay" => Some(linalg::pauli_y()),
        "sigmaz" => Some(linalg::pauli_z()),
        "identity" => Some(linalg::identity(dim)),
        s => {
            if let Some(values) = inline_diag(s) {
                Some(linalg::diag(&values?))
            } else if let Some(n) = s.strip_prefix("identity(").and_then(|r| r.strip_suffix(')')) {
                let n: usize = n.trim().parse().map_err(|e| Error::Parse(format!("{s}: {e}")))?;
                Some(linalg::identity(n))
            } else {
                None
            }
        }
    };
    let obs = match m {
        Some(m) => Observable::new(m)?,
        None => MatrixFile::read(Path::new(spec))?.into_observable(spec)?,
    };
    if obs.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: obs.dim() });
    }
    Ok(obs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["skewinfo"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn constant_wyd() {
        let (code, out, _) = call(&["constant", "--metric", "wyd", "--p", "0.3"]);
        assert_eq!(code, 0);
        let v: f64 = out.trim().parse().unwrap();
        assert!((v - 0.21).abs() < 1e-15);
        let (_, out, _) = call(&["constant", "--metric", "kubo"]);
        assert_eq!(out.trim(), "non-regular");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["constant", "--metric", "wyd"]).0, 2);
        assert_eq!(call(&["constant", "--metric", "wyd", "--p", "0.3", "--bogus"]).0, 2);
        assert_eq!(call(&["constant", "--metric", "bures", "--p", "0.3"]).0, 2);
        assert_eq!(call(&["verify", "--suite", "nope"]).0, 2);
        assert_eq!(call(&[]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn inline_specs() {
        assert!(load_density("diag(0.9, 0.1)").is_ok());
        assert!(load_density("diag(0.9,x)").is_err());
        assert_eq!(load_observable("identity(3)", 3).unwrap().dim(), 3);
        assert!(load_observable("sigmax", 3).is_err());
    }
}
