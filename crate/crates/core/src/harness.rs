//! Seeded samplers and property suites.
//!
//! Every trial draws from its own ChaCha stream keyed by `(seed, trial)`, so
//! trials can run in parallel and reports are bit-identical across runs and
//! thread counts. Reports are reduced in trial order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::mcfunc::{self, Family, KernelGrid, MCFunction, MetricConstant};
use crate::qig::{self, DensityMatrix, Observable, QuantumChannel};
use crate::quad::QuadratureConfig;
use crate::repr;
use crate::report::PropertyReport;

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 14] = [
    "axioms",
    "reconstruction-measure",
    "reconstruction-h",
    "metric-constant",
    "sandwich",
    "pure-equality",
    "convexity",
    "additivity",
    "time-invariance",
    "metric-monotonicity",
    "correlation",
    "mixture",
    "variant-bridge",
    "oracle-equivalence",
];

/// Sampling parameters shared by all suites.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub trials: usize,
    /// Lower bound on the spectrum of [`sample_density`] draws.
    pub eigenvalue_floor: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { seed: 42, dims: vec![2, 3, 4, 6], trials: 100, eigenvalue_floor: 1e-6 }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&n| n < 2) {
            return Err(Error::Domain(format!("dims {:?} must be nonempty and each ≥ 2", self.dims)));
        }
        let max_n = *self.dims.iter().max().unwrap_or(&2) as f64;
        if !(self.eigenvalue_floor >= 0.0 && self.eigenvalue_floor * max_n < 1.0) {
            return Err(Error::Domain(format!(
                "eigenvalue floor {} is infeasible for dimension {max_n}",
                self.eigenvalue_floor
            )));
        }
        Ok(())
    }

    fn dim(&self, trial: usize) -> usize {
        self.dims[trial % self.dims.len()]
    }
}

/// A deterministic random source for one trial.
pub struct Sampler {
    rng: ChaCha8Rng,
    floor: f64,
}

impl Sampler {
    pub fn new(cfg: &SamplerConfig, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(index);
        Self { rng, floor: cfg.eigenvalue_floor }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    /// Complex Gaussian with unit variance.
    fn complex_normal(&mut self) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn ginibre(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| self.complex_normal())
    }

    /// Haar-distributed unitary from the phase-corrected QR of a Ginibre
    /// matrix.
    pub fn unitary(&mut self, n: usize) -> CMatrix {
        let qr = self.ginibre(n, n).qr();
        let (mut q, r) = qr.unpack();
        for j in 0..n {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
            for z in q.column_mut(j).iter_mut() {
                *z *= phase;
            }
        }
        q
    }

    /// `GG*/tr(GG*)` mixed with `I/n` so every eigenvalue is at least the
    /// configured floor.
    pub fn density(&mut self, n: usize) -> Result<DensityMatrix> {
        let g = self.ginibre(n, n);
        let w = &g * g.adjoint();
        let tr = linalg::trace(&w).re;
        let s = self.floor * n as f64;
        let m = w.unscale(tr).scale(1.0 - s) + linalg::identity(n).scale(s / n as f64);
        DensityMatrix::new(m)
    }

    /// Rank-one projection onto a normalized Gaussian vector, with its
    /// spectrum `(1, 0, …, 0)` kept exact.
    pub fn pure(&mut self, n: usize) -> Result<DensityMatrix> {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        let u = self.unitary(n);
        DensityMatrix::from_spectrum(&e, u)
    }

    /// `(1-η)P + ηI/n` for a random rank-one projection `P`, with exact
    /// spectrum.
    pub fn near_pure(&mut self, n: usize, eta: f64) -> Result<DensityMatrix> {
        let mut e = vec![eta / n as f64; n];
        e[0] = 1.0 - eta + eta / n as f64;
        let u = self.unitary(n);
        DensityMatrix::from_spectrum(&e, u)
    }

    /// GUE-style Hermitian matrix scaled to unit operator norm.
    pub fn observable(&mut self, n: usize) -> Result<Observable> {
        let g = self.ginibre(n, n);
        let h = linalg::hermitian_part(&g);
        let s = linalg::spectral(&h)?;
        let norm = s.eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs()));
        Observable::new(h.unscale(norm))
    }

    /// Channel `M_n → M_m` with `k` Kraus operators cut from the first `n`
    /// columns of a Haar unitary on `C^{k·m}`. Needs `k·m ≥ n`.
    pub fn channel(&mut self, n: usize, m: usize, k: usize) -> Result<QuantumChannel> {
        if k * m < n {
            return Err(Error::InvalidKraus(format!("{k} Kraus operators of size {m}x{n} cannot be trace preserving")));
        }
        let u = self.unitary(k * m);
        QuantumChannel::from_isometry(&u.columns(0, n).into_owned(), m)
    }
}

/// Density matrix number `index` of the stream defined by `cfg.seed`.
pub fn sample_density(cfg: &SamplerConfig, n: usize, index: u64) -> Result<DensityMatrix> {
    Sampler::new(cfg, index).density(n)
}

/// Pure state number `index` of the stream defined by `cfg.seed`.
pub fn sample_pure(cfg: &SamplerConfig, n: usize, index: u64) -> Result<DensityMatrix> {
    Sampler::new(cfg, index).pure(n)
}

fn m(f: Result<MCFunction>) -> MCFunction {
    f.expect("builtin parameters are in range")
}

fn regular_builtins() -> Vec<MCFunction> {
    let mut v: Vec<MCFunction> = [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|&p| m(MCFunction::wyd(p))).collect();
    v.push(MCFunction::wy());
    v.push(MCFunction::bures());
    v.extend([0.25, 0.5].iter().map(|&l| m(MCFunction::extreme(l))));
    v.extend([0.25, 0.75].iter().map(|&p| m(MCFunction::variant_bridge(p))));
    v
}

/// Metrics a suite runs over when the caller passes none.
pub fn default_metrics(suite: &str) -> Result<Vec<MCFunction>> {
    Ok(match suite {
        "axioms" | "metric-constant" => {
            // WYD near p = 0 converges like t^p, far below what a double can
            // resolve, so the value checks start at p = 0.1
            let ps: &[f64] = if suite == "axioms" { &[0.001, 0.1, 0.3, 0.5, 0.9] } else { &[0.1, 0.3, 0.5, 0.9] };
            let mut v: Vec<MCFunction> = ps.iter().map(|&p| m(MCFunction::wyd(p))).collect();
            v.extend([MCFunction::wy(), MCFunction::bures(), MCFunction::kubo()]);
            v.extend([0.0, 0.25, 0.5, 1.0].iter().map(|&g| m(MCFunction::bridge(g))));
            v.extend([0.0, 0.25, 1.0].iter().map(|&l| m(MCFunction::extreme(l))));
            v.extend([0.0, 0.5, 0.9, 1.0].iter().map(|&p| m(MCFunction::variant_bridge(p))));
            v
        }
        "reconstruction-measure" => {
            let mut v: Vec<MCFunction> = [0.3, 0.5, 0.7].iter().map(|&p| m(MCFunction::wyd(p))).collect();
            v.push(MCFunction::wy());
            v.push(MCFunction::kubo());
            v.extend([0.0, 0.25, 0.5, 0.75, 1.0].iter().map(|&g| m(MCFunction::bridge(g))));
            v.extend([0.0, 0.3, 1.0].iter().map(|&l| m(MCFunction::extreme(l))));
            v.push(MCFunction::bures());
            v
        }
        "reconstruction-h" => {
            let mut v = vec![MCFunction::wy(), MCFunction::kubo(), MCFunction::bures()];
            v.extend([0.0, 0.5, 1.0].iter().map(|&g| m(MCFunction::bridge(g))));
            v.extend([0.2, 0.7].iter().map(|&p| m(MCFunction::wyd(p))));
            v
        }
        "sandwich" | "pure-equality" | "convexity" | "additivity" | "time-invariance" | "correlation" => {
            regular_builtins()
        }
        "oracle-equivalence" => regular_builtins(),
        "metric-monotonicity" => {
            let mut v = vec![MCFunction::bures(), MCFunction::wy(), MCFunction::kubo()];
            v.extend([0.1, 0.7].iter().map(|&p| m(MCFunction::wyd(p))));
            v.extend([0.5, 1.0].iter().map(|&g| m(MCFunction::bridge(g))));
            v.extend([0.0, 0.5].iter().map(|&l| m(MCFunction::extreme(l))));
            v.push(m(MCFunction::variant_bridge(0.5)));
            v
        }
        "mixture" => vec![m(MCFunction::wyd(0.25)), m(MCFunction::wyd(0.5)), m(MCFunction::extreme(0.4)), MCFunction::bures()],
        "variant-bridge" => [0.0, 0.1, 0.5, 0.9, 1.0].iter().map(|&p| m(MCFunction::variant_bridge(p))).collect(),
        other => return Err(Error::UnknownSuite(other.to_string())),
    })
}

/// Shifts every kernel by `delta`, keeping tabulated data of the originals.
pub fn inject_fault(metrics: &[MCFunction], delta: f64) -> Vec<MCFunction> {
    metrics.iter().map(|mc| mc.perturbed(delta)).collect()
}

/// Runs the named property suite over `metrics` (or the suite defaults when
/// empty) and collects every failure. Unknown names are an error; failed
/// properties are not.
pub fn run_suite(name: &str, cfg: &SamplerConfig, metrics: &[MCFunction]) -> Result<PropertyReport> {
    cfg.validate()?;
    let defaults;
    let metrics = if metrics.is_empty() {
        defaults = default_metrics(name)?;
        &defaults[..]
    } else {
        if !SUITES.contains(&name) {
            return Err(Error::UnknownSuite(name.to_string()));
        }
        metrics
    };
    let label = metrics.iter().map(MCFunction::label).collect::<Vec<_>>().join(" ");
    let mut report = PropertyReport::new(name, label, cfg.seed);
    for mc in metrics {
        let r = match name {
            "axioms" => suite_axioms(cfg, mc),
            "reconstruction-measure" => suite_reconstruction_measure(mc),
            "reconstruction-h" => suite_reconstruction_h(mc),
            "metric-constant" => suite_metric_constant(mc),
            "sandwich" => per_trial(name, cfg, mc, trial_sandwich),
            "pure-equality" => per_trial(name, cfg, mc, trial_pure_equality),
            "convexity" => per_trial(name, cfg, mc, trial_convexity),
            "additivity" => per_trial(name, cfg, mc, trial_additivity),
            "time-invariance" => per_trial(name, cfg, mc, trial_time_invariance),
            "metric-monotonicity" => per_trial(name, cfg, mc, trial_monotonicity),
            "correlation" => per_trial(name, cfg, mc, trial_correlation),
            "mixture" => per_trial(name, cfg, mc, trial_mixture),
            "variant-bridge" => per_trial(name, cfg, mc, trial_variant_bridge),
            "oracle-equivalence" => per_trial(name, cfg, mc, trial_oracle),
            other => return Err(Error::UnknownSuite(other.to_string())),
        };
        report.absorb(r);
    }
    Ok(report)
}

type TrialFn = fn(&mut PropertyReport, usize, &SamplerConfig, &MCFunction) -> Result<()>;

fn per_trial(name: &str, cfg: &SamplerConfig, mc: &MCFunction, f: TrialFn) -> PropertyReport {
    let parts: Vec<PropertyReport> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut r = PropertyReport::new(name, mc.label(), cfg.seed);
            if let Err(e) = f(&mut r, trial, cfg, mc) {
                r.error(trial, "evaluation", format!("{}: {e}", mc.label()));
            }
            r
        })
        .collect();
    let mut report = PropertyReport::new(name, mc.label(), cfg.seed);
    for p in parts {
        report.absorb(p);
    }
    report
}

fn rel_err(got: f64, want: f64) -> f64 {
    if got == want {
        0.0
    } else {
        (got - want).abs() / want.abs()
    }
}

// Kernel-level properties.

fn suite_axioms(cfg: &SamplerConfig, mc: &MCFunction) -> PropertyReport {
    let grid = KernelGrid::log_grid(13, 1e-6, 1e6).expect("valid grid");
    let mut report = match mcfunc::check_axioms(mc, &grid, 1e-12) {
        Ok(r) => r,
        Err(e) => {
            let mut r = PropertyReport::new("axioms", mc.label(), cfg.seed);
            r.error(0, "axioms", e.to_string());
            return r;
        }
    };
    report.suite = "axioms".into();
    report.seed = cfg.seed;
    let regular = mc.metric_constant().value();
    let mut s = Sampler::new(cfg, u64::MAX);
    let draw = |s: &mut Sampler| 10f64.powf(s.uniform(-6.0, 6.0));
    for trial in 0..cfg.trials {
        let (x1, y1, x2, y2) = (draw(&mut s), draw(&mut s), draw(&mut s), draw(&mut s));
        let ch = mc.c_hat_unchecked(x1, y1);
        let direct = (x1 - y1) * (x1 - y1) * mc.kernel(x1, y1);
        report.check(trial, "c-hat-nonnegative", (-ch).max(0.0), 0.0, || format!("ĉ({x1},{y1}) = {ch}"));
        report.check(trial, "c-hat-definition", rel_err(ch, direct), 1e-12, || format!("({x1},{y1})"));
        let (xm, ym) = (0.5 * (x1 + x2), 0.5 * (y1 + y2));
        let ch2 = mc.c_hat_unchecked(x2, y2);
        let chm = mc.c_hat_unchecked(xm, ym);
        let scale = ch.abs().max(ch2.abs()).max(1.0);
        report.check(trial, "c-hat-midpoint-convexity", ((chm - 0.5 * (ch + ch2)) / scale).max(0.0), 1e-12, || {
            format!("({x1},{y1}) ({x2},{y2})")
        });
        if let Some(m) = regular {
            let d1 = mc.d_unchecked(x1, y1, m);
            let d2 = mc.d_unchecked(x2, y2, m);
            let dm = mc.d_unchecked(xm, ym, m);
            let total = (x1 + y1) / m;
            report.check(trial, "c-hat-plus-d", (ch + d1 - total).abs() / total, 1e-12, || format!("({x1},{y1})"));
            let scale = d1.abs().max(d2.abs()).max(1.0);
            report.check(trial, "d-midpoint-concavity", ((0.5 * (d1 + d2) - dm) / scale).max(0.0), 1e-12, || {
                format!("({x1},{y1}) ({x2},{y2})")
            });
        }
    }
    report
}

fn grid_points() -> Vec<(f64, f64)> {
    KernelGrid::log_grid(7, 1e-3, 1e3).expect("valid grid").points
}

fn suite_reconstruction_measure(mc: &MCFunction) -> PropertyReport {
    let mut report = PropertyReport::new("reconstruction-measure", mc.label(), 0);
    let cfg = QuadratureConfig::default();
    let measure = match repr::measure_of(mc) {
        Ok(m) => m,
        Err(e) => {
            report.error(0, "measure", e.to_string());
            return report;
        }
    };
    // atoms reconstruct up to rounding in the kernel formula
    let tol = if measure.has_density() { 1e-6 } else { 1e-14 };
    for (i, (x, y)) in grid_points().into_iter().enumerate() {
        match repr::reconstruct_from_measure(&measure, x, y, &cfg) {
            Ok(v) => {
                let want = mc.kernel(x, y);
                report.check(i, "reconstruction", rel_err(v, want), tol, || format!("({x},{y}): {v} vs {want}"));
            }
            Err(e) => report.error(i, "reconstruction", e.to_string()),
        }
    }
    if mc.is_normalized() {
        match measure.total_mass(&cfg) {
            Ok(mass) => {
                report.check(49, "total-mass", (mass - 1.0).abs(), 1e-8, || format!("mass {mass}"));
            }
            Err(e) => report.error(49, "total-mass", e.to_string()),
        }
    }
    report
}

fn suite_reconstruction_h(mc: &MCFunction) -> PropertyReport {
    let mut report = PropertyReport::new("reconstruction-h", mc.label(), 0);
    let cfg = QuadratureConfig::default();
    let hr = match repr::h_repr_of(mc) {
        Ok(h) => h,
        Err(e) => {
            report.error(0, "h-representation", e.to_string());
            return report;
        }
    };
    for (i, (x, y)) in grid_points().into_iter().enumerate() {
        match repr::reconstruct_from_h(&hr, x, y, &cfg) {
            Ok(v) => {
                let want = mc.kernel(x, y);
                report.check(i, "reconstruction", rel_err(v, want), 1e-5, || format!("({x},{y}): {v} vs {want}"));
            }
            Err(e) => report.error(i, "reconstruction", e.to_string()),
        }
    }
    let upper = match mc.tabulated_family() {
        Some(Family::Wyd { .. } | Family::WignerYanase | Family::Kubo) => 0.5,
        _ => 1.0,
    };
    for i in 1..1000 {
        let l = i as f64 / 1000.0;
        let h = (hr.h)(l);
        let out = (-h).max(h - upper).max(0.0);
        report.check(i, "h-range", out, 0.0, || format!("h({l}) = {h} outside [0, {upper}]"));
    }
    report
}

/// Lower cutoffs for the divergence certificate, one per decade.
const CUTOFFS: [f64; 9] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9];

fn suite_metric_constant(mc: &MCFunction) -> PropertyReport {
    let mut report = PropertyReport::new("metric-constant", mc.label(), 0);
    let numeric = mc.numeric_metric_constant();
    let closed = mc.closed_form_metric_constant().map(|m| {
        if m >= mcfunc::NON_REGULAR_THRESHOLD {
            MetricConstant::Regular(m)
        } else {
            MetricConstant::NonRegular
        }
    });
    match (closed, numeric) {
        (Some(MetricConstant::Regular(want)), MetricConstant::Regular(got)) => {
            report.check(0, "numeric-limit", rel_err(got, want), 1e-6, || format!("{got} vs {want}"));
        }
        (Some(MetricConstant::NonRegular), MetricConstant::NonRegular) => {
            report.check(0, "classification", 0.0, 0.0, String::new);
        }
        (Some(want), got) => {
            report.error(0, "classification", format!("closed form {want}, numeric {got}"));
        }
        (None, _) => {
            report.check(0, "classification", 0.0, 0.0, String::new);
        }
    }
    let Ok(measure) = repr::measure_of(mc) else {
        return report;
    };
    let cfg = QuadratureConfig::default();
    match closed {
        Some(MetricConstant::Regular(want)) => match repr::metric_constant_integral(&measure, &cfg) {
            Ok(v) => {
                report.check(1, "measure-integral", rel_err(v, 1.0 / want), 1e-6, || format!("{v} vs {}", 1.0 / want));
            }
            Err(e) => report.error(1, "measure-integral", e.to_string()),
        },
        Some(MetricConstant::NonRegular) => {
            match repr::metric_constant_integral(&measure, &cfg) {
                Err(Error::NonRegular(_)) => report.check(1, "measure-integral-diverges", 0.0, 0.0, String::new),
                other => {
                    report.error(1, "measure-integral-diverges", format!("expected divergence, got {other:?}"));
                    false
                }
            };
            if measure.has_density() {
                divergence_certificate(&mut report, &measure, &cfg);
            }
        }
        None => {}
    }
    report
}

/// Truncated integrals must grow with every decade of the cutoff, and the
/// per-decade increments must not decay, which rules out convergence.
fn divergence_certificate(report: &mut PropertyReport, measure: &repr::RepresentingMeasure, cfg: &QuadratureConfig) {
    let mut values = Vec::with_capacity(CUTOFFS.len());
    for &c in &CUTOFFS {
        match repr::metric_constant_integral_from(measure, c, cfg) {
            Ok(v) => values.push(v),
            Err(e) => {
                report.error(2, "truncated-integral", e.to_string());
                return;
            }
        }
    }
    let inc: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    for (i, d) in inc.iter().enumerate() {
        report.check(2 + i, "truncated-growth", (-d).max(0.0), 0.0, || format!("increment {d} at decade {i}"));
    }
    for (i, w) in inc.windows(2).enumerate() {
        let decay = (1.0 - w[1] / w[0]).max(0.0);
        report.check(20 + i, "increment-persistence", decay, 1e-6, || {
            format!("increments {} then {}", w[0], w[1])
        });
    }
}

// State-level properties.

/// Sandwich states cycle through full-rank draws, pure states and
/// near-pure states `(1-η)P + ηI/n` with `η` spread over `1e-8..1e-80`.
fn trial_sandwich(r: &mut PropertyReport, trial: usize, cfg: &SamplerConfig, mc: &MCFunction) -> Result<()> {
    let mut s = Sampler::new(cfg, trial as u64);
    let n = cfg.dim(trial);
    let rho = match trial % 4 {
        0 | 1 => s.density(n)?,
        2 => {
            let eta = 10f64.powf(-s.uniform(8.0, 80.0));
            s.near_pure(n, eta)?
        }
        _ => s.pure(n)?,
    };
    let a = s.observable(n)?;
    let i = qig::skew_info(mc, &rho, &a)?;
    let var = qig::variance(&rho, &a)?;
    r.check(trial, "lower-bound", (-i).max(0.0), 0.0, || format!("I = {i}"));
    r.check(trial, "upper-bound", (i - var).max(0.0), 1e-12, || {
        format!("I = {i}, Var = {var}, n = {n}, min eig {:e}", rho.min_eigenvalue())
    });
    Ok(())
}

fn trial_pure_equality(r: &mut PropertyReport, trial: usize, cfg: &SamplerConfig, mc: &MCFunction) -> Result<()> {
    let mut s = Sampler::new(cfg, trial as u64);
    let n = cfg.dim(trial);
    let rho = s.pure(n)?;
    let a = s.observable(n)?;
    let i = qig::skew_info(mc, &rho, &a)?;
    let var = qig::variance(&rho, &a)?;
    r.check(trial, "pure-equality", (i - var).abs(), 1e-10, || format!("I = {i}, Var = {var}"));
    Ok(())
}

fn trial_convexity(r: &mut PropertyReport, trial: usize, cfg: &SamplerConfig, mc: &MCFunction) -> Result<()> {
    let mut s = Sampler::new(cfg, trial as u64);
    let n = cfg.dim(trial);
    let (r1, r2) = (s.density(n)?, s.density(n)?);
    let a = s.observable(n)?;
    let (i1, i2) = (qig::skew_info(mc, &r1, &a)?, qig::skew_info(mc, &r2, &a)?);
    let (v1, v2) = (qig::variance(&r1, &a)?, qig::variance(&r2, &a)?);
    for t in [0.25, 0.5, 0.75] {
        let rt = r1.mix(&r2, t)?;
        let it = qig::skew_info(mc, &rt, &a)?;
        let vt = qig::variance(&rt, &a)?;
        let chord = (1.0 - t) * i1 + t * i2;
        r.check(trial, "skew-convexity", (it - chord).max(0.0), 1e-12, || format!("t={t}: {it} > {chord}"));
        let vchord = (1.0 - t) * v1 + t * v2;
        r.check(trial, "variance-concavity", (vchord - vt).max(0.0), 1e-12, || format!("t={t}: {vt} < {vchord}"));
    }
    Ok(())
}

fn trial_additivity(r: &mut PropertyReport, trial: usize, cfg: &SamplerConfig, mc: &MCFunction) -> Result<()> {
    let mut s = Sampler::new(cfg, trial as u64);
    let k = cfg.dims.len();
    let (n1, n2) = (cfg.dims[trial % k], cfg.dims[(trial / k) % k]);
    let (r1, r2) = (s.density(n1)?, s.density(n2)?);
    let (a1, a2) = (s.observable(n1)?, s.observable(n2)?);
    let (rho, a) = qig::aggregate(&r1, &r2, &a1, &a2)?;
    let split = linalg::kron(&linalg::commutator(r1.matrix(), a1.matrix()), r2.matrix())
        + linalg::kron(r1.matrix(), &linalg::commutator(r2.matrix(), a2.matrix()));
    let comm = linalg::commutator(rho.matrix(), a.matrix());
    r.check(trial, "commutator-split", linalg::max_abs(&(comm - split)), 1e-12, || format!("{n1}x{n2}"));
    let i = qig::skew_info(mc, &rho, &a)?;
    let sum = qig::skew_info(mc, &r1, &a1)? + qig::skew_info(mc, &r2, &a2)?;
    r.check(trial, "additivity", (i - sum).abs() / (1.0 + i.abs()), 1e-10, || format!("{i} vs {sum}"));
    Ok(())
}

fn trial_time_invariance(r: &mut PropertyReport, trial: usize, cfg: &SamplerConfig, mc: &MCFunction) -> Result<()> {
    let mut s = Sampler::new(cfg, trial as u64);
    let n = cfg.dim(trial);
    let rho = s.density(n)?;
    let a = s.observable(n)?;
    let h = Observable::new(a.matrix() * a.matrix() - a.matrix())?;
    let i0 = qig::skew_info(mc, &rho, &a)?;
    for t in [0.1, 1.0, 10.0] {
        let rt = qig::evolve(&rho, &h, t)?;
        let spec: f64 = rt
            .eigenvalues()
            .iter()
            .zip(rho.eigenvalues())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        r.check(trial, "spectrum-preserved", spec, 1e-10, || format!("t={t}"));
        let it = qig::skew_info(mc, &rt, &a)?;
        r.check(trial, "time-invariance", (it - i0).abs() / (1.0 + i0.abs()), 1e-10, || {
            format!("t={t}: {it} vs {i0}")
        });
    }
    Ok(())
}

/// Even trials use a partial trace over a random bipartition, odd trials a
/// random Kraus channel.
fn trial_monotonicity(r: &mut PropertyReport, trial: usize, cfg: &SamplerConfig, mc: &MCFunction) -> Result<()> {
    let mut s = Sampler::new(cfg, trial as u64);
    let k = cfg.dims.len();
    let (channel, n) = if trial.is_multiple_of(2) {
        let (d1, d2) = (cfg.dims[(trial / 2) % k], cfg.dims[(trial / 2 / k) % k].min(3));
        let ch = if (trial / 2).is_multiple_of(2) {
            QuantumChannel::partial_trace_second(d1, d2)
        } else {
            QuantumChannel::partial_trace_first(d1, d2)
        };
        (ch, d1 * d2)
    } else {
        let n = cfg.dim(trial / 2);
        let m = cfg.dims[(trial / 2 + 1) % k];
        let kraus = 1 + (trial / 2) % 3;
        // k·m ≥ n for trace preservation, k·n ≥ m for a full-rank output
        let kraus = kraus.max(n.div_ceil(m)).max(m.div_ceil(n));
        (s.channel(n, m, kraus)?, n)
    };
    let rho = s.density(n)?;
    let a = s.observable(n)?;
    let before = qig::metric(mc, &rho, a.matrix(), a.matrix())?.re;
    let t_rho = channel.apply_state(&rho)?;
    let t_a = qig::apply_channel(&channel, a.matrix())?;
    let after = qig::metric(mc, &t_rho, &t_a, &t_a)?.re;
    r.check(trial, "metric-monotonicity", (after - before).max(0.0) / before.max(1.0), 1e-12, || {
        format!("{n} -> {}: {after} > {before}", channel.output_dim())
    });
    Ok(())
}

fn trial_correlation(r: &mut PropertyReport, trial: usize, cfg: &SamplerConfig, mc: &MCFunction) -> Result<()> {
    let mut s = Sampler::new(cfg, trial as u64);
    let n = cfg.dim(trial);
    let rho = if trial % 5 == 4 { s.pure(n)? } else { s.density(n)? };
    let (a, b) = (s.observable(n)?, s.observable(n)?);
    let ia = qig::skew_info(mc, &rho, &a)?;
    let ib = qig::skew_info(mc, &rho, &b)?;
    let caa = qig::correlation(mc, &rho, a.matrix(), a.matrix())?;
    r.check(trial, "diagonal", (caa - ia).norm() / (1.0 + ia), 1e-10, || format!("Corr(A,A) = {caa}, I = {ia}"));
    let cab = qig::correlation(mc, &rho, a.matrix(), b.matrix())?;
    let half_tr = 0.5 * linalg::trace(&(rho.matrix() * linalg::commutator(a.matrix(), b.matrix()))).norm();
    r.check(trial, "imaginary-part", (half_tr - cab.im.abs()).abs(), 1e-10, || {
        format!("½|tr ρ[A,B]| = {half_tr}, Im Corr = {}", cab.im)
    });
    let bound = (ia * ib).sqrt();
    r.check(trial, "cauchy-schwarz", (cab.re.abs() - bound).max(0.0), 1e-12, || {
        format!("|Re Corr| = {} > {bound}", cab.re.abs())
    });
    Ok(())
}

fn trial_mixture(r: &mut PropertyReport, trial: usize, cfg: &SamplerConfig, mc: &MCFunction) -> Result<()> {
    let mut s = Sampler::new(cfg, trial as u64);
    let n = cfg.dim(trial);
    let rho = s.density(n)?;
    let a = s.observable(n)?;
    let direct = qig::skew_info(mc, &rho, &a)?;
    let mix = qig::mixture_skew_info(mc, &rho, &a, &QuadratureConfig::default())?;
    r.check(trial, "mixture", (mix - direct).abs() / direct.max(1e-300), 1e-6, || format!("{mix} vs {direct}"));
    Ok(())
}

/// Finite-difference step in `p` for the variant-bridge derivative.
const FD_STEP: f64 = 1e-5;

fn trial_variant_bridge(r: &mut PropertyReport, trial: usize, cfg: &SamplerConfig, mc: &MCFunction) -> Result<()> {
    let Some(Family::VariantBridge { p }) = mc.family() else {
        return Err(Error::Unsupported(format!("{} is not a variant bridge", mc.label())));
    };
    let mut s = Sampler::new(cfg, trial as u64);
    let (x, y) = (10f64.powf(s.uniform(-6.0, 6.0)), 10f64.powf(s.uniform(-6.0, 6.0)));
    let c = mc.kernel(x, y);
    if p == 0.0 {
        r.check(trial, "bures-endpoint", rel_err(c, 2.0 / (x + y)), 1e-12, || format!("({x},{y})"));
    }
    if p == 1.0 {
        r.check(trial, "maximal-endpoint", rel_err(c, (x + y) / (2.0 * x * y)), 1e-12, || format!("({x},{y})"));
    }
    let t = 10f64.powf(s.uniform(-3.0, 3.0));
    let q = s.uniform(0.05, 0.95);
    let fd = (mcfunc::variant_bridge_f(q + FD_STEP, t) - mcfunc::variant_bridge_f(q - FD_STEP, t)) / (2.0 * FD_STEP);
    let exact = mcfunc::variant_bridge_df_dp(q, t);
    r.check(trial, "derivative", rel_err(fd, exact), 1e-6, || format!("p={q}, t={t}: {fd} vs {exact}"));
    r.check(trial, "decreasing-in-p", exact.max(0.0), 0.0, || format!("p={q}, t={t}: {exact}"));
    if p < 1.0 {
        let m = mc.metric_constant().value().unwrap_or(0.0);
        r.check(trial, "regular", (mcfunc::NON_REGULAR_THRESHOLD - m).max(0.0), 0.0, || format!("m = {m}"));
    }
    Ok(())
}

/// `-½ tr [ρ^p, A][ρ^(1-p), A]`
pub fn wyd_trace_oracle(p: f64, rho: &DensityMatrix, a: &Observable) -> Result<f64> {
    let s = linalg::spectral(rho.matrix())?;
    let rp = s.apply(|l| l.max(0.0).powf(p));
    let rq = s.apply(|l| l.max(0.0).powf(1.0 - p));
    let prod = linalg::commutator(&rp, a.matrix()) * linalg::commutator(&rq, a.matrix());
    Ok(-0.5 * linalg::trace(&prod).re)
}

fn trial_oracle(r: &mut PropertyReport, trial: usize, cfg: &SamplerConfig, mc: &MCFunction) -> Result<()> {
    let mut s = Sampler::new(cfg, trial as u64);
    let n = cfg.dim(trial);
    let rho = s.density(n)?;
    let a = s.observable(n)?;
    let i = qig::skew_info(mc, &rho, &a)?;
    let p = match mc.family() {
        Some(Family::Wyd { p }) => Some(p),
        Some(Family::WignerYanase) => Some(0.5),
        _ => None,
    };
    if let Some(p) = p {
        let oracle = wyd_trace_oracle(p, &rho, &a)?;
        r.check(trial, "trace-oracle", (i - oracle).abs() / (1.0 + i.abs()), 1e-10, || {
            format!("p={p}: {i} vs {oracle}")
        });
    }
    let ic = qig::skew_info_commutator(mc, &rho, &a)?;
    r.check(trial, "route-equivalence", (i - ic).abs() / (1.0 + i.abs()), 1e-10, || format!("{i} vs {ic}"));
    // definition: (m/2) K_ρ(i[ρ,A], i[ρ,A])
    let m = mc.require_regular()?;
    let comm = linalg::commutator(rho.matrix(), a.matrix()) * Complex64::i();
    let k = qig::metric(mc, &rho, &comm, &comm)?;
    let def = 0.5 * m * k.re;
    r.check(trial, "definition", (i - def).abs() / (1.0 + i.abs()), 1e-10, || format!("{i} vs {def}"));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: usize) -> SamplerConfig {
        SamplerConfig { trials, ..Default::default() }
    }

    #[test]
    fn density_draws() {
        let cfg = SamplerConfig::default();
        for n in [2, 3, 6] {
            let rho = sample_density(&cfg, n, 7).unwrap();
            assert!((linalg::trace(rho.matrix()).re - 1.0).abs() < 1e-12);
            assert!(rho.min_eigenvalue() >= 1e-6 * (1.0 - 1e-9));
            assert_eq!(rho, sample_density(&cfg, n, 7).unwrap());
        }
        assert_ne!(sample_density(&cfg, 3, 1).unwrap(), sample_density(&cfg, 3, 2).unwrap());
    }

    #[test]
    fn pure_draws() {
        let cfg = SamplerConfig::default();
        let rho = sample_pure(&cfg, 4, 3).unwrap();
        let p = rho.matrix();
        assert!(linalg::max_abs(&(p * p - p)) < 1e-12);
        assert!((linalg::trace(p).re - 1.0).abs() < 1e-12);
        assert_eq!(rho.eigenvalues(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn observables_have_unit_norm() {
        let mut s = Sampler::new(&SamplerConfig::default(), 0);
        let a = s.observable(5).unwrap();
        let sp = linalg::spectral(a.matrix()).unwrap();
        let norm = sp.eigenvalues[0].abs().max(sp.eigenvalues[4].abs());
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_channels_are_trace_preserving() {
        let mut s = Sampler::new(&SamplerConfig::default(), 0);
        let ch = s.channel(4, 2, 2).unwrap();
        assert_eq!(ch.kraus_operators().len(), 2);
        assert!(s.channel(6, 2, 2).is_err());
    }

    #[test]
    fn unknown_suite_and_bad_config() {
        assert!(matches!(run_suite("nope", &small(1), &[]), Err(Error::UnknownSuite(_))));
        assert!(matches!(run_suite("nope", &small(1), &[MCFunction::wy()]), Err(Error::UnknownSuite(_))));
        let bad = SamplerConfig { dims: vec![1], ..Default::default() };
        assert!(run_suite("sandwich", &bad, &[]).is_err());
        let bad = SamplerConfig { trials: 0, ..Default::default() };
        assert!(run_suite("sandwich", &bad, &[]).is_err());
    }

    #[test]
    fn every_suite_passes_on_defaults() {
        let cfg = small(12);
        for name in SUITES {
            let r = run_suite(name, &cfg, &[]).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.cases);
            assert!(r.trials > 0);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = small(20);
        let a = run_suite("sandwich", &cfg, &[]).unwrap();
        let b = run_suite("sandwich", &cfg, &[]).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn kubo_is_non_regular_in_metric_constant_suite() {
        let r = run_suite("metric-constant", &small(1), &[MCFunction::kubo()]).unwrap();
        assert!(r.passed(), "{:?}", r.cases);
        assert_eq!(MCFunction::kubo().numeric_metric_constant(), MetricConstant::NonRegular);
    }

    #[test]
    fn non_regular_metric_in_skew_suite_is_reported() {
        let r = run_suite("sandwich", &small(3), &[MCFunction::kubo()]).unwrap();
        assert_eq!(r.failures, 3);
    }
}
