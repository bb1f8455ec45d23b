//! Adaptive Gauss–Kronrod quadrature on the unit interval with power-law
//! endpoint substitutions.
//!
//! All tabulated representing densities are smooth on the open interval and
//! behave like `λ^a` near 0 and `(1-λ)^b` near 1. When an exponent lies in
//! `(-1, 0)` the integrand is integrable but unbounded, and the substitution
//! `λ = u^k` with `k = 2/(1+a)` turns `λ^a dλ` into `k·u dλ`-like smooth
//! behaviour before the adaptive rule ever sees it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and limits for [`integrate`] and [`integrate_unit`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub endpoint_substitution: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            endpoint_substitution: true,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::Domain("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// 21-point Kronrod rule with embedded 10-point Gauss error estimate.
/// Returns `(integral, error)`.
fn gk21<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let integral = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (integral, err)
}

struct Segment {
    piece: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive bisection over a set of independent pieces, each a
/// `(function, a, b)` triple. The pieces share one error budget.
fn adaptive(pieces: &[(&dyn Fn(f64) -> f64, f64, f64)], cfg: &QuadratureConfig) -> Result<Estimate> {
    cfg.validate()?;
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for (i, &(f, a, b)) in pieces.iter().enumerate() {
        if b <= a {
            continue;
        }
        let (v, e) = gk21(f, a, b);
        total += v;
        total_err += e;
        heap.push(Segment { piece: i, a, b, value: v, error: e });
    }
    let mut subdivisions = 0;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Quadrature {
                estimate: total,
                achieved_error: total_err,
                subdivisions,
            });
        }
        if total_err <= tol {
            return Ok(Estimate { value: total, error: total_err, subdivisions });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: total,
                achieved_error: total_err,
                subdivisions,
            });
        }
        let Some(worst) = heap.pop() else {
            return Ok(Estimate { value: total, error: total_err, subdivisions });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution
            return Err(Error::Quadrature {
                estimate: total,
                achieved_error: total_err,
                subdivisions,
            });
        }
        let f = pieces[worst.piece].0;
        let (v1, e1) = gk21(f, worst.a, mid);
        let (v2, e2) = gk21(f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { piece: worst.piece, a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { piece: worst.piece, a: mid, b: worst.b, value: v2, error: e2 });
        subdivisions += 1;
        if subdivisions % 64 == 0 {
            // re-sum to keep the running totals from drifting
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// Integrates `f` over `[a, b]` with adaptive GK21 bisection.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration bounds must be finite".into()));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0, subdivisions: 0 });
    }
    if b < a {
        let est = adaptive(&[(&f, b, a)], cfg)?;
        return Ok(Estimate { value: -est.value, ..est });
    }
    adaptive(&[(&f, a, b)], cfg)
}

/// Exponent of the power substitution that regularizes `λ^a` at an endpoint,
/// or `None` when no substitution is needed.
fn substitution_power(exponent: f64) -> Option<f64> {
    (exponent > -1.0 && exponent < 0.0).then(|| 2.0 / (1.0 + exponent))
}

/// Integrates `f` over `(lo, 1)` where `f(λ) ~ λ^a` as `λ → 0` and
/// `f(λ) ~ (1-λ)^b` as `λ → 1`, `a, b > -1`.
///
/// The integrand is called as `f(λ, 1 - λ)`; the complement is exact in the
/// substituted variable near 1, where recomputing `1 - λ` would cancel.
/// The interval is split at the midpoint of `(lo, 1)`; each half whose
/// endpoint exponent lies in `(-1, 0)` is integrated in the substituted
/// variable. `lo` must lie in `[0, 1)`.
pub fn integrate_from<F: Fn(f64, f64) -> f64>(
    f: F,
    lo: f64,
    exponents: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    if !(0.0..1.0).contains(&lo) {
        return Err(Error::Domain(format!("lower cutoff {lo} outside [0, 1)")));
    }
    let (a, b) = exponents;
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::Domain(format!(
            "endpoint exponents ({a}, {b}) are not integrable"
        )));
    }
    let split = 0.5 * (lo + 1.0);
    let left_power = if cfg.endpoint_substitution && lo == 0.0 {
        substitution_power(a)
    } else {
        None
    };
    let right_power = if cfg.endpoint_substitution { substitution_power(b) } else { None };

    let left_sub = |u: f64| {
        let k = left_power.unwrap_or(1.0);
        let lam = u.powf(k);
        if lam <= 0.0 {
            return 0.0;
        }
        f(lam, 1.0 - lam) * k * u.powf(k - 1.0)
    };
    let right_sub = |w: f64| {
        let k = right_power.unwrap_or(1.0);
        let one_minus = w.powf(k);
        let lam = 1.0 - one_minus;
        if one_minus <= 0.0 {
            return 0.0;
        }
        f(lam, one_minus) * k * w.powf(k - 1.0)
    };
    let plain = |lam: f64| f(lam, 1.0 - lam);

    let left: (&dyn Fn(f64) -> f64, f64, f64) = match left_power {
        Some(k) => (&left_sub, 0.0, split.powf(1.0 / k)),
        None => (&plain, lo, split),
    };
    let right: (&dyn Fn(f64) -> f64, f64, f64) = match right_power {
        Some(k) => (&right_sub, 0.0, (1.0 - split).powf(1.0 / k)),
        None => (&plain, split, 1.0),
    };
    adaptive(&[left, right], cfg)
}

/// Integrates over the whole unit interval; see [`integrate_from`].
pub fn integrate_unit<F: Fn(f64, f64) -> f64>(
    f: F,
    exponents: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    integrate_from(f, 0.0, exponents, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x| 3.0 * x * x, 0.0, 2.0, &QuadratureConfig::default()).unwrap();
        assert!((est.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let cfg = QuadratureConfig::default();
        let fwd = integrate(f64::exp, 0.0, 1.0, &cfg).unwrap().value;
        let rev = integrate(f64::exp, 1.0, 0.0, &cfg).unwrap().value;
        assert!((fwd + rev).abs() < 1e-15);
        assert!((fwd - (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_with_substitution() {
        // ∫ λ^{-0.9} (1-λ)^{-0.7} dλ = B(0.1, 0.3)
        let f = |l: f64, r: f64| l.powf(-0.9) * r.powf(-0.7);
        let est = integrate_unit(f, (-0.9, -0.7), &QuadratureConfig::default()).unwrap();
        // B(0.1,0.3) = Γ(0.1)Γ(0.3)/Γ(0.4)
        let expected = 9.513507698668732 * 2.991568987687591 / 2.218159543757688;
        assert!((est.value - expected).abs() < 1e-8 * expected, "{} vs {}", est.value, expected);
    }

    #[test]
    fn log_peaked_integrand() {
        // ∫_0^1 1/(λ + t) dλ = ln((1+t)/t)
        let t = 1e-6;
        let est = integrate_unit(|l, _| 1.0 / (l + t), (0.0, 0.0), &QuadratureConfig::default()).unwrap();
        let expected = ((1.0 + t) / t).ln();
        assert!((est.value - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn lower_cutoff() {
        let est = integrate_from(|l, _| 1.0 / l, 1e-3, (-1.0 + 1e-9, 0.0), &QuadratureConfig::default());
        // a = -1 + 1e-9 is integrable in exact arithmetic, the cutoff keeps the value finite
        let v = est.unwrap().value;
        assert!((v - 1e3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn nonconvergence_reports_achieved_error() {
        let cfg = QuadratureConfig { max_subdivisions: 3, ..Default::default() };
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &cfg).unwrap_err();
        match err {
            Error::Quadrature { achieved_error, subdivisions, .. } => {
                assert!(achieved_error > 0.0);
                assert_eq!(subdivisions, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = QuadratureConfig { rel_tol: 0.0, ..Default::default() };
        assert!(integrate(|x| x, 0.0, 1.0, &cfg).is_err());
    }
}
