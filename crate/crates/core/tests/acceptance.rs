//! Acceptance criteria, one line per criterion.
//!
//! Runs with a custom harness so that every criterion is evaluated and
//! reported even when an earlier one fails. The process exits non-zero when
//! a criterion fails that is not listed in `KNOWN_UNATTAINABLE`.

use std::time::Instant;

use skewinfo::error::Error;
use skewinfo::harness::{self, SamplerConfig};
use skewinfo::mcfunc::{self, Family, KernelGrid, MCFunction, MetricConstant};
use skewinfo::qig::{self, DensityMatrix, Observable};
use skewinfo::repr::{self, DEFAULT_BOUNDARY_EPS};

/// Criteria whose stated check cannot hold. Each is still run and reported
/// as FAIL; see the README for the reasons.
const KNOWN_UNATTAINABLE: &[usize] = &[13];

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn from_suites(reports: &[skewinfo::report::PropertyReport]) -> Self {
        let passed = reports.iter().all(|r| r.passed());
        let detail = reports
            .iter()
            .map(|r| format!("{} trials={} failures={} max={:.2e}", r.suite, r.trials, r.failures, r.max_violation))
            .collect::<Vec<_>>()
            .join("; ");
        let first = reports.iter().flat_map(|r| r.cases.first()).next();
        let detail = match first {
            Some(c) if !passed => format!("{detail}; first: {} {}", c.check, c.detail),
            _ => detail,
        };
        Outcome { passed, detail }
    }
}

type Res<T> = Result<T, Error>;

fn cfg(trials: usize) -> SamplerConfig {
    SamplerConfig { trials, ..Default::default() }
}

fn wyds(ps: &[f64]) -> Vec<MCFunction> {
    ps.iter().map(|&p| MCFunction::wyd(p).unwrap()).collect()
}

fn c1_oracle() -> Res<Outcome> {
    let r = harness::run_suite("oracle-equivalence", &cfg(500), &wyds(&[0.1, 0.3, 0.5, 0.7, 0.9]))?;
    Ok(Outcome::from_suites(&[r]))
}

fn c2_closed_value() -> Res<Outcome> {
    let rho = DensityMatrix::from_diag(&[0.9, 0.1])?;
    let i = qig::skew_info(&MCFunction::wy(), &rho, &Observable::pauli_x())?;
    let err = (i - 0.4).abs();
    Ok(Outcome { passed: err <= 1e-12, detail: format!("I = {i:.17}, |I - 0.4| = {err:.2e}") })
}

fn c3_measure() -> Res<Outcome> {
    let mut metrics = wyds(&[0.3, 0.5, 0.7]);
    metrics.push(MCFunction::kubo());
    for g in [0.0, 0.25, 0.5, 0.75, 1.0] {
        metrics.push(MCFunction::bridge(g)?);
    }
    for l in [0.0, 0.3, 0.7, 1.0] {
        metrics.push(MCFunction::extreme(l)?);
    }
    let r = harness::run_suite("reconstruction-measure", &cfg(1), &metrics)?;
    Ok(Outcome::from_suites(&[r]))
}

fn c4_h() -> Res<Outcome> {
    let metrics = vec![MCFunction::wy(), MCFunction::kubo(), MCFunction::bridge(0.0)?, MCFunction::bridge(0.5)?, MCFunction::bridge(1.0)?];
    let r = harness::run_suite("reconstruction-h", &cfg(1), &metrics)?;
    let tabulated = [
        4.0 * (2f64.sqrt() - 1.0),
        std::f64::consts::FRAC_PI_2,
        2.0,
        2f64.sqrt(),
        1.0,
    ];
    let mut c0_err: f64 = 0.0;
    for (mc, want) in metrics.iter().zip(tabulated) {
        c0_err = c0_err.max((repr::h_repr_of(mc)?.c0 - want).abs());
    }
    let mut out = Outcome::from_suites(&[r]);
    out.passed &= c0_err <= 1e-15;
    out.detail = format!("{}; max |C0 - tabulated| = {c0_err:.2e}", out.detail);
    Ok(out)
}

fn c5_constants() -> Res<Outcome> {
    let mut metrics = wyds(&[0.1, 0.3, 0.5, 0.7, 0.9]);
    metrics.push(MCFunction::bures());
    metrics.push(MCFunction::kubo());
    for l in [0.0, 0.25, 0.5, 1.0] {
        metrics.push(MCFunction::extreme(l)?);
    }
    for g in [0.25, 0.5, 0.75, 1.0] {
        metrics.push(MCFunction::bridge(g)?);
    }
    for p in [0.0, 0.25, 0.5, 0.9] {
        metrics.push(MCFunction::variant_bridge(p)?);
    }
    let r = harness::run_suite("metric-constant", &cfg(1), &metrics)?;
    let mut out = Outcome::from_suites(&[r]);
    // independent closed forms, not the ones the library tabulates
    let mut worst: f64 = 0.0;
    let mut misclassified = Vec::new();
    for mc in &metrics {
        let want = match mc.family() {
            Some(Family::Wyd { p }) => Some(p * (1.0 - p)),
            Some(Family::Extreme { lambda }) => Some(2.0 * lambda / ((1.0 + lambda) * (1.0 + lambda))),
            Some(Family::Bures) => Some(0.5),
            Some(Family::VariantBridge { p }) => Some(0.5 * (4.0 * (1.0 - p) / ((2.0 - p) * (2.0 - p))).powf(p)),
            _ => None,
        };
        let numeric = mc.numeric_metric_constant();
        match (want, numeric) {
            (Some(w), MetricConstant::Regular(m)) if w >= mcfunc::NON_REGULAR_THRESHOLD => {
                worst = worst.max((m - w).abs() / w)
            }
            (Some(w), MetricConstant::NonRegular) if w < mcfunc::NON_REGULAR_THRESHOLD => {}
            (None, MetricConstant::NonRegular) => {}
            _ => misclassified.push(mc.label()),
        }
    }
    out.passed &= worst <= 1e-6 && misclassified.is_empty();
    out.detail = format!("{}; max rel err vs closed forms {worst:.2e}; misclassified {misclassified:?}", out.detail);
    Ok(out)
}

fn c6_sandwich() -> Res<Outcome> {
    let a = harness::run_suite("sandwich", &cfg(1000), &[])?;
    let b = harness::run_suite("pure-equality", &cfg(1000), &[])?;
    Ok(Outcome::from_suites(&[a, b]))
}

fn c7_convexity() -> Res<Outcome> {
    Ok(Outcome::from_suites(&[harness::run_suite("convexity", &cfg(1000), &[])?]))
}

fn c8_additivity() -> Res<Outcome> {
    let a = harness::run_suite("additivity", &cfg(200), &[])?;
    let b = harness::run_suite("time-invariance", &cfg(200), &[])?;
    Ok(Outcome::from_suites(&[a, b]))
}

fn c9_monotonicity() -> Res<Outcome> {
    Ok(Outcome::from_suites(&[harness::run_suite("metric-monotonicity", &cfg(500), &[])?]))
}

fn c10_mixture() -> Res<Outcome> {
    Ok(Outcome::from_suites(&[harness::run_suite("mixture", &cfg(100), &wyds(&[0.25, 0.5]))?]))
}

fn c11_correlation() -> Res<Outcome> {
    Ok(Outcome::from_suites(&[harness::run_suite("correlation", &cfg(500), &[])?]))
}

fn c12_boundary() -> Res<Outcome> {
    let mut worst: f64 = 0.0;
    for mc in [MCFunction::wyd(0.5)?, MCFunction::kubo()] {
        let measure = repr::measure_of(&mc)?;
        for l in [0.2, 0.5, 0.8] {
            let got = repr::boundary_density_oracle(&mc, l, DEFAULT_BOUNDARY_EPS)?;
            let want = measure.density(l);
            worst = worst.max((got - want).abs() / want);
        }
    }
    Ok(Outcome { passed: worst <= 1e-3, detail: format!("max rel err {worst:.2e} at eps = {DEFAULT_BOUNDARY_EPS:e}") })
}

fn c13_variant_bridge() -> Res<Outcome> {
    let vb0 = MCFunction::variant_bridge(0.0)?;
    let bures = MCFunction::bures();
    let grid = KernelGrid::log_grid(13, 1e-6, 1e6)?;
    let mut endpoint: f64 = 0.0;
    for &(x, y) in &grid.points {
        let (a, b) = (vb0.eval_c(x, y)?, bures.eval_c(x, y)?);
        endpoint = endpoint.max((a - b).abs() / b);
    }
    let h = 1e-5;
    let mut printed_err: f64 = 0.0;
    let mut complete_err: f64 = 0.0;
    let mut max_derivative = f64::NEG_INFINITY;
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for t in [1e-3, 0.1, 0.5, 0.9, 1.1, 2.0, 10.0, 1e3] {
            let fd = (mcfunc::variant_bridge_f(p + h, t) - mcfunc::variant_bridge_f(p - h, t)) / (2.0 * h);
            let printed = mcfunc::variant_bridge_df_dp_printed(p, t);
            let complete = mcfunc::variant_bridge_df_dp(p, t);
            printed_err = printed_err.max((fd - printed).abs() / fd.abs());
            complete_err = complete_err.max((fd - complete).abs() / fd.abs());
            max_derivative = max_derivative.max(fd);
        }
    }
    let passed = endpoint <= 1e-12 && printed_err <= 1e-6 && max_derivative < 0.0;
    Ok(Outcome {
        passed,
        detail: format!(
            "p=0 vs Bures {endpoint:.2e}; fd vs printed form {printed_err:.2e}; \
             fd vs complete derivative {complete_err:.2e}; max fd {max_derivative:.3e}"
        ),
    })
}

fn c14_fault_injection() -> Res<Outcome> {
    let delta = 1e-3;
    let mut survivors = Vec::new();
    let mut checked = 0;
    for suite in ["reconstruction-measure", "sandwich"] {
        for mc in harness::default_metrics(suite)? {
            let faulty = harness::inject_fault(std::slice::from_ref(&mc), delta);
            let r = harness::run_suite(suite, &cfg(100), &faulty)?;
            checked += 1;
            if r.passed() {
                survivors.push(format!("{suite}/{}", mc.label()));
            }
        }
    }
    Ok(Outcome {
        passed: survivors.is_empty(),
        detail: format!("{checked} perturbed (suite, metric) runs, undetected: {survivors:?}"),
    })
}

fn main() {
    let criteria: [(&str, fn() -> Res<Outcome>); 14] = [
        ("oracle equivalence (WYD)", c1_oracle),
        ("closed 2x2 value", c2_closed_value),
        ("measure reconstruction", c3_measure),
        ("h-representation reconstruction", c4_h),
        ("metric constants", c5_constants),
        ("sandwich and pure equality", c6_sandwich),
        ("convexity and concavity", c7_convexity),
        ("additivity and time invariance", c8_additivity),
        ("metric monotonicity under channels", c9_monotonicity),
        ("mixture corollary", c10_mixture),
        ("correlation identities", c11_correlation),
        ("boundary-measure oracle", c12_boundary),
        ("variant bridge", c13_variant_bridge),
        ("fault injection", c14_fault_injection),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        let start = Instant::now();
        let outcome = f().unwrap_or_else(|e| Outcome { passed: false, detail: format!("error: {e}") });
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        let note = if !outcome.passed && KNOWN_UNATTAINABLE.contains(&n) { " (known unattainable)" } else { "" };
        println!(
            "criterion {n:>2} {status}{note}: {name} [{:.1}s] {}",
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
        if !outcome.passed && !KNOWN_UNATTAINABLE.contains(&n) {
            unexpected.push(n);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria pass except known unattainable {KNOWN_UNATTAINABLE:?}");
    } else {
        println!("acceptance: unexpected failures in criteria {unexpected:?}");
        std::process::exit(1);
    }
}
