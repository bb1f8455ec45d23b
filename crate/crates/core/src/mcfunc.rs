//! Morozova–Chentsov functions.
//!
//! A Morozova–Chentsov (MC) function is a kernel `c(x, y) = 1/(y f(x/y))`
//! where `f` is a positive operator monotone function with `f(t) = t f(1/t)`.
//! Every symmetric monotone metric on the state space is `tr A* c(L_ρ, R_ρ) B`
//! for some such `c`.
//!
//! The registry covers the Wigner–Yanase–Dyson family, Wigner–Yanase, Bures,
//! Kubo, the increasing bridge `c_γ`, the extreme points `c_λ` of the
//! normalized simplex, and the regular variant bridge `c_p`. Evaluation goes
//! through homogeneity: `c(x, y) = c(s, 1)/max(x, y)` with
//! `s = min(x, y)/max(x, y) ∈ (0, 1]`, which keeps arguments in a bounded
//! range and makes symmetry exact.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::report::PropertyReport;

/// Relative gap `|x - y| ≤ NEAR_DIAGONAL·(x + y)` below which removable
/// singularities switch to their diagonal Taylor expansion.
pub const NEAR_DIAGONAL: f64 = 1e-6;

/// Limits below this are classified as non-regular.
pub const NON_REGULAR_THRESHOLD: f64 = 1e-10;

/// `-ln t` ladder for the numeric metric constant. Successive points halve
/// `1/ln(1/t)`, and the extrapolation is polynomial in that variable.
const LIMIT_LADDER: [f64; 3] = [160.0, 320.0, 640.0];

/// The parametrized families with closed-form evaluators and tabulated
/// representations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    /// Wigner–Yanase–Dyson, `0 < p < 1`.
    Wyd { p: f64 },
    /// `4/(√x + √y)²`, the `p = 1/2` member of the WYD family.
    WignerYanase,
    /// `2/(x + y)`, the minimal symmetric monotone metric.
    Bures,
    /// `(log x - log y)/(x - y)`.
    Kubo,
    /// Increasing bridge `x^-γ y^-γ ((x+y)/2)^(2γ-1)`, `0 ≤ γ ≤ 1`.
    Bridge { gamma: f64 },
    /// Extreme point `((1+λ)/2)(1/(x+λy) + 1/(λx+y))`, `0 ≤ λ ≤ 1`.
    Extreme { lambda: f64 },
    /// Regular variant bridge `c_p`, `0 ≤ p ≤ 1`.
    VariantBridge { p: f64 },
}

/// `expm1(v)/v` with its Taylor series near zero.
fn exprel(v: f64) -> f64 {
    if v.abs() < 1e-5 {
        1.0 + v / 2.0 + v * v / 6.0
    } else {
        v.exp_m1() / v
    }
}

impl Family {
    fn validate(self) -> Result<Self> {
        let check = |name: &'static str, value: f64, ok: bool, range: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(Error::ParameterOutOfRange { name, value, range })
            }
        };
        match self {
            Family::Wyd { p } => check("p", p, p > 0.0 && p < 1.0, "0 < p < 1")?,
            Family::Bridge { gamma } => {
                check("gamma", gamma, (0.0..=1.0).contains(&gamma), "0 <= gamma <= 1")?
            }
            Family::Extreme { lambda } => check(
                "lambda",
                lambda,
                (0.0..=1.0).contains(&lambda),
                "0 <= lambda <= 1",
            )?,
            Family::VariantBridge { p } => {
                check("p", p, (0.0..=1.0).contains(&p), "0 <= p <= 1")?
            }
            Family::WignerYanase | Family::Bures | Family::Kubo => {}
        }
        Ok(self)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Wyd { .. } => "wyd",
            Family::WignerYanase => "wy",
            Family::Bures => "bures",
            Family::Kubo => "kubo",
            Family::Bridge { .. } => "bridge",
            Family::Extreme { .. } => "extreme",
            Family::VariantBridge { .. } => "variant-bridge",
        }
    }

    fn params(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        match *self {
            Family::Wyd { p } | Family::VariantBridge { p } => {
                m.insert("p".to_string(), p);
            }
            Family::Bridge { gamma } => {
                m.insert("gamma".to_string(), gamma);
            }
            Family::Extreme { lambda } => {
                m.insert("lambda".to_string(), lambda);
            }
            _ => {}
        }
        m
    }

    /// Closed-form `m(c) = lim_{t→0} 1/c(t, 1)`; zero for non-regular members.
    pub fn metric_constant(&self) -> f64 {
        match *self {
            Family::Wyd { p } => p * (1.0 - p),
            Family::WignerYanase => 0.25,
            Family::Bures => 0.5,
            Family::Kubo => 0.0,
            Family::Bridge { gamma } => {
                if gamma == 0.0 {
                    0.5
                } else {
                    0.0
                }
            }
            Family::Extreme { lambda } => 2.0 * lambda / ((1.0 + lambda) * (1.0 + lambda)),
            Family::VariantBridge { p } => {
                0.5 * (4.0 * (1.0 - p) / ((2.0 - p) * (2.0 - p))).powf(p)
            }
        }
    }

    /// `c(s, 1)` for `s ∈ (0, 1]`.
    fn unit(&self, s: f64, near_diagonal: bool) -> f64 {
        match *self {
            Family::Wyd { p } => {
                let q = 1.0 - p;
                let u = s.ln();
                if near_diagonal {
                    let k = (p * p + q * q - 2.0) / 24.0 + 0.125;
                    1.0 - 0.5 * u + k * u * u
                } else {
                    let e1 = exprel(u);
                    exprel(p * u) * exprel(q * u) / (e1 * e1)
                }
            }
            Family::WignerYanase => {
                let r = s.sqrt();
                4.0 / ((1.0 + r) * (1.0 + r))
            }
            Family::Bures => 2.0 / (1.0 + s),
            Family::Kubo => {
                let u = s.ln();
                if near_diagonal {
                    1.0 - 0.5 * u + u * u / 12.0
                } else {
                    1.0 / exprel(u)
                }
            }
            Family::Bridge { gamma } => {
                s.powf(-gamma) * (0.5 * (1.0 + s)).powf(2.0 * gamma - 1.0)
            }
            Family::Extreme { lambda } => {
                0.5 * (1.0 + lambda) * (1.0 / (s + lambda) + 1.0 / (lambda * s + 1.0))
            }
            Family::VariantBridge { p } => {
                let q = 1.0 - p;
                (2.0 - p).powf(2.0 * p) / ((s + q).powf(p) * (q * s + 1.0).powf(p))
                    * (0.5 * (s + 1.0)).powf(2.0 * p - 1.0)
            }
        }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let near = hi - lo <= NEAR_DIAGONAL * (hi + lo);
        self.unit(lo / hi, near) / hi
    }

    /// Closed form of the representing function `d_c` where one is cheaper
    /// or more accurate than `(x+y)/m - ĉ`. Arguments are positive.
    fn d_closed(&self, x: f64, y: f64) -> Option<f64> {
        match *self {
            Family::Wyd { p } => {
                let q = 1.0 - p;
                Some((x.powf(p) * y.powf(q) + x.powf(q) * y.powf(p)) / (p * q))
            }
            Family::WignerYanase => Some(8.0 * (x * y).sqrt()),
            Family::Bures => Some(8.0 * x * y / (x + y)),
            Family::Extreme { lambda } if lambda > 0.0 => {
                Some((1.0 + lambda) * (1.0 + lambda) / lambda * f_lambda_unchecked(lambda, x, y))
            }
            _ => None,
        }
    }

    /// Analytic continuation of `c(z, 1)` to the upper half plane using
    /// principal branches.
    pub fn unit_complex(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            Family::Wyd { p } => {
                let q = 1.0 - p;
                let zm1 = z - one;
                (z.powf(p) - one) * (z.powf(q) - one) / (zm1 * zm1 * (p * q))
            }
            Family::WignerYanase => {
                let r = z.sqrt() + one;
                Complex64::new(4.0, 0.0) / (r * r)
            }
            Family::Bures => Complex64::new(2.0, 0.0) / (z + one),
            Family::Kubo => z.ln() / (z - one),
            Family::Bridge { gamma } => {
                z.powf(-gamma) * ((z + one) * 0.5).powf(2.0 * gamma - 1.0)
            }
            Family::Extreme { lambda } => {
                (one / (z + lambda) + one / (z * lambda + one)) * (0.5 * (1.0 + lambda))
            }
            Family::VariantBridge { p } => {
                let q = 1.0 - p;
                let num = (2.0 - p).powf(2.0 * p);
                ((z + q).powf(p) * (z * q + one).powf(p)).inv()
                    * num
                    * ((z + one) * 0.5).powf(2.0 * p - 1.0)
            }
        }
    }
}

type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kernel {
    Builtin(Family),
    Custom(KernelFn),
}

/// Outcome of a metric-constant computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MetricConstant {
    Regular(f64),
    NonRegular,
}

impl MetricConstant {
    fn classify(value: f64) -> Self {
        if value.is_finite() && value >= NON_REGULAR_THRESHOLD {
            MetricConstant::Regular(value)
        } else {
            MetricConstant::NonRegular
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            MetricConstant::Regular(m) => Some(m),
            MetricConstant::NonRegular => None,
        }
    }

    pub fn is_regular(&self) -> bool {
        matches!(self, MetricConstant::Regular(_))
    }
}

impl fmt::Display for MetricConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricConstant::Regular(m) => write!(f, "{m}"),
            MetricConstant::NonRegular => f.write_str("non-regular"),
        }
    }
}

/// A Morozova–Chentsov function with its evaluator and metadata.
///
/// Values are immutable after construction and can be shared across threads.
#[derive(Clone)]
pub struct MCFunction {
    name: String,
    params: BTreeMap<String, f64>,
    kernel: Kernel,
    tabulated: Option<Family>,
    normalized: bool,
    regular: bool,
    closed_form_metric_constant: Option<f64>,
}

impl fmt::Debug for MCFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MCFunction")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("normalized", &self.normalized)
            .field("regular", &self.regular)
            .field("closed_form_metric_constant", &self.closed_form_metric_constant)
            .finish()
    }
}

impl fmt::Display for MCFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl MCFunction {
    fn from_family(family: Family) -> Result<Self> {
        let family = family.validate()?;
        let m = family.metric_constant();
        Ok(Self {
            name: family.name().to_string(),
            params: family.params(),
            kernel: Kernel::Builtin(family),
            tabulated: Some(family),
            normalized: true,
            regular: m >= NON_REGULAR_THRESHOLD,
            closed_form_metric_constant: Some(m),
        })
    }

    pub fn wyd(p: f64) -> Result<Self> {
        Self::from_family(Family::Wyd { p })
    }

    pub fn wy() -> Self {
        Self::from_family(Family::WignerYanase).expect("parameter-free")
    }

    pub fn bures() -> Self {
        Self::from_family(Family::Bures).expect("parameter-free")
    }

    pub fn kubo() -> Self {
        Self::from_family(Family::Kubo).expect("parameter-free")
    }

    pub fn bridge(gamma: f64) -> Result<Self> {
        Self::from_family(Family::Bridge { gamma })
    }

    pub fn extreme(lambda: f64) -> Result<Self> {
        Self::from_family(Family::Extreme { lambda })
    }

    pub fn variant_bridge(p: f64) -> Result<Self> {
        Self::from_family(Family::VariantBridge { p })
    }

    /// Looks up a builtin by name. Accepted names: `wyd` (`p`), `wy`,
    /// `bures`, `kubo`, `bridge` (`gamma`), `extreme` (`lambda`),
    /// `variant-bridge` (`p`).
    pub fn builtin(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |key: &str| {
            params
                .get(key)
                .copied()
                .ok_or_else(|| Error::Domain(format!("metric {name} requires parameter {key}")))
        };
        let allowed: &[&str] = match name {
            "wyd" | "variant-bridge" | "variant_bridge" => &["p"],
            "bridge" => &["gamma"],
            "extreme" => &["lambda"],
            _ => &[],
        };
        if let Some(extra) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Domain(format!("metric {name} takes no parameter {extra}")));
        }
        match name {
            "wyd" => Self::wyd(get("p")?),
            "wy" => Ok(Self::wy()),
            "bures" => Ok(Self::bures()),
            "kubo" => Ok(Self::kubo()),
            "bridge" => Self::bridge(get("gamma")?),
            "extreme" => Self::extreme(get("lambda")?),
            "variant-bridge" | "variant_bridge" => Self::variant_bridge(get("p")?),
            other => Err(Error::Unsupported(format!("unknown metric {other}"))),
        }
    }

    /// Wraps an arbitrary evaluator. Regularity is decided numerically and
    /// `normalized` is the caller's claim, checked by [`check_axioms`].
    pub fn custom<F>(name: impl Into<String>, eval: F, normalized: bool) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let kernel: KernelFn = Arc::new(eval);
        let m = numeric_limit(|t| kernel(t, 1.0));
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            kernel: Kernel::Custom(kernel),
            tabulated: None,
            normalized,
            regular: m.is_regular(),
            closed_form_metric_constant: None,
        }
    }

    /// Fault injection: the same metadata and tabulated representations as
    /// `self`, with the evaluator shifted by `delta`.
    pub fn perturbed(&self, delta: f64) -> Self {
        let base = self.clone();
        let kernel: KernelFn = Arc::new(move |x, y| base.kernel(x, y) + delta);
        Self {
            name: format!("perturbed-{}", self.name),
            params: self.params.clone(),
            kernel: Kernel::Custom(kernel),
            tabulated: self.tabulated,
            normalized: self.normalized,
            regular: self.regular,
            closed_form_metric_constant: self.closed_form_metric_constant,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// Human-readable identifier such as `wyd(p=0.3)`.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            self.name.clone()
        } else {
            let args: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{}({})", self.name, args.join(";"))
        }
    }

    /// Builtin family of the evaluator, `None` for custom kernels.
    pub fn family(&self) -> Option<Family> {
        match self.kernel {
            Kernel::Builtin(f) => Some(f),
            Kernel::Custom(_) => None,
        }
    }

    /// Family whose tabulated measure and `h` function describe this
    /// function (also set for perturbed builtins).
    pub fn tabulated_family(&self) -> Option<Family> {
        self.tabulated
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }

    pub fn closed_form_metric_constant(&self) -> Option<f64> {
        self.closed_form_metric_constant
    }

    /// `c(x, y)` for positive arguments, no validation.
    pub(crate) fn kernel(&self, x: f64, y: f64) -> f64 {
        match &self.kernel {
            Kernel::Builtin(f) => f.eval(x, y),
            Kernel::Custom(k) => k(x, y),
        }
    }

    /// `c(x, y)`.
    pub fn eval_c(&self, x: f64, y: f64) -> Result<f64> {
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("c({x}, {y}) requires positive finite arguments")));
        }
        Ok(self.kernel(x, y))
    }

    /// `ĉ(x, y) = (x - y)² c(x, y)`, extended by continuity to the closed
    /// first quadrant. On the boundary `ĉ(t, 0) = t/m(c)`, which is infinite
    /// for non-regular metrics.
    pub fn eval_c_hat(&self, x: f64, y: f64) -> Result<f64> {
        if !(x >= 0.0 && y >= 0.0 && x.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("ĉ({x}, {y}) requires nonnegative finite arguments")));
        }
        Ok(self.c_hat_unchecked(x, y))
    }

    pub(crate) fn c_hat_unchecked(&self, x: f64, y: f64) -> f64 {
        if x == y {
            return 0.0;
        }
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        if lo == 0.0 {
            return match self.metric_constant() {
                MetricConstant::Regular(m) => hi / m,
                MetricConstant::NonRegular => f64::INFINITY,
            };
        }
        let diff = x - y;
        diff * diff * self.kernel(x, y)
    }

    /// Metric constant: the closed form when tabulated, otherwise the
    /// numeric limit of `1/c(t, 1)`.
    pub fn metric_constant(&self) -> MetricConstant {
        match self.closed_form_metric_constant {
            Some(m) => MetricConstant::classify(m),
            None => self.numeric_metric_constant(),
        }
    }

    /// Numeric limit of `1/c(t, 1)` as `t → 0`, extrapolated to `t = 0`
    /// with a quadratic in `1/ln(1/t)` through `t = e^-160, e^-320, e^-640`.
    ///
    /// Power-law corrections `t^α` are already below rounding at those
    /// points for `α ≳ 0.1`, and logarithmic convergence (Kubo) is exactly
    /// polynomial in the extrapolation variable.
    pub fn numeric_metric_constant(&self) -> MetricConstant {
        numeric_limit(|t| self.kernel(t, 1.0))
    }

    /// `d_c(x, y) = (x + y)/m(c) - ĉ(x, y)`, with `d(t, 0) = d(0, t) = 0`.
    pub fn eval_d(&self, x: f64, y: f64) -> Result<f64> {
        if !(x >= 0.0 && y >= 0.0 && x.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("d({x}, {y}) requires nonnegative finite arguments")));
        }
        let m = self.require_regular()?;
        Ok(self.d_unchecked(x, y, m))
    }

    pub(crate) fn require_regular(&self) -> Result<f64> {
        self.metric_constant()
            .value()
            .ok_or_else(|| Error::NonRegular(self.label()))
    }

    /// `d` for nonnegative arguments given the metric constant `m`.
    pub(crate) fn d_unchecked(&self, x: f64, y: f64, m: f64) -> f64 {
        if x <= 0.0 || y <= 0.0 {
            return 0.0;
        }
        if let Kernel::Builtin(f) = &self.kernel {
            if let Some(d) = f.d_closed(x, y) {
                return d;
            }
        }
        (x + y) / m - self.c_hat_unchecked(x, y)
    }

    /// `c(z, 1)` continued into the upper half plane.
    pub fn eval_unit_complex(&self, z: Complex64) -> Result<Complex64> {
        match &self.kernel {
            Kernel::Builtin(f) => {
                let v = f.unit_complex(z);
                if v.re.is_finite() && v.im.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Continuation(format!("{} is not finite at {z}", self.label())))
                }
            }
            Kernel::Custom(_) => Err(Error::Continuation(format!(
                "{} has no analytic continuation",
                self.label()
            ))),
        }
    }

    /// `f(t) = 1/c(t, 1)`.
    pub fn representing_f(&self, t: f64) -> f64 {
        1.0 / self.kernel(t, 1.0)
    }
}

fn numeric_limit(c_unit: impl Fn(f64) -> f64) -> MetricConstant {
    let f: Vec<f64> = LIMIT_LADDER
        .iter()
        .map(|&l| {
            let c = c_unit((-l).exp());
            if c.is_infinite() {
                0.0
            } else {
                1.0 / c
            }
        })
        .collect();
    // Neville extrapolation to v = 0 with nodes v, v/2, v/4.
    let est = f[0] / 3.0 - 2.0 * f[1] + 8.0 / 3.0 * f[2];
    MetricConstant::classify(est)
}

fn f_lambda_unchecked(lambda: f64, x: f64, y: f64) -> f64 {
    let xy = x * y;
    if xy == 0.0 {
        return 0.0;
    }
    0.5 * (1.0 + lambda) * (xy / (x + lambda * y) + xy / (lambda * x + y))
}

/// `f_λ(x, y) = xy·c_λ(x, y)`.
pub fn eval_f_lambda(lambda: f64, x: f64, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::ParameterOutOfRange { name: "lambda", value: lambda, range: "0 <= lambda <= 1" });
    }
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::Domain(format!("f_λ({x}, {y}) requires positive finite arguments")));
    }
    Ok(f_lambda_unchecked(lambda, x, y))
}

/// `f_λ` extended by zero to the boundary of the first quadrant.
pub(crate) fn f_lambda_extended(lambda: f64, x: f64, y: f64) -> f64 {
    f_lambda_unchecked(lambda, x.max(0.0), y.max(0.0))
}

/// Extreme kernel `c_λ(x, y)` for `λ ∈ [0, 1]`, positive arguments.
pub fn extreme_kernel(lambda: f64, x: f64, y: f64) -> f64 {
    0.5 * (1.0 + lambda) * (1.0 / (x + lambda * y) + 1.0 / (lambda * x + y))
}

// Variant bridge operator monotone functions.

fn variant_ratio(p: f64, t: f64) -> f64 {
    let q = 1.0 - p;
    4.0 * (q + t) * (1.0 + q * t) / ((2.0 - p) * (2.0 - p) * (1.0 + t) * (1.0 + t))
}

/// `f_p(t) = 1/c_p(t, 1)` for the variant bridge.
pub fn variant_bridge_f(p: f64, t: f64) -> f64 {
    0.5 * (1.0 + t) * variant_ratio(p, t).powf(p)
}

/// The closed form printed alongside the variant bridge for `∂f_p/∂p`.
///
/// This is only the term coming from differentiating the ratio inside the
/// power; it omits `f_p(t)·ln Q`. See [`variant_bridge_df_dp`].
pub fn variant_bridge_df_dp_printed(p: f64, t: f64) -> f64 {
    let one_minus_t = 1.0 - t;
    -2.0 * p * p * one_minus_t * one_minus_t / ((2.0 - p).powi(3) * (1.0 + t))
        * variant_ratio(p, t).powf(p - 1.0)
}

/// Complete `∂f_p/∂p = f_p(t)·ln Q + (printed term)` where
/// `Q = 4(1-p+t)(1+(1-p)t)/((2-p)²(1+t)²) ≤ 1`.
pub fn variant_bridge_df_dp(p: f64, t: f64) -> f64 {
    variant_bridge_f(p, t) * variant_ratio(p, t).ln() + variant_bridge_df_dp_printed(p, t)
}

/// Points in the open first quadrant with optional kernel values.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelGrid {
    pub points: Vec<(f64, f64)>,
    pub values: Vec<f64>,
}

impl KernelGrid {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
            return Err(Error::Domain("grid points must be strictly positive".into()));
        }
        Ok(Self { values: vec![f64::NAN; points.len()], points })
    }

    /// `n × n` grid, log-spaced over `[lo, hi]²`.
    pub fn log_grid(n: usize, lo: f64, hi: f64) -> Result<Self> {
        if n < 2 || !(lo > 0.0 && hi > lo) {
            return Err(Error::Domain(format!("invalid log grid {n} over [{lo}, {hi}]")));
        }
        let axis: Vec<f64> = (0..n)
            .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
            .collect();
        let points = axis.iter().flat_map(|&x| axis.iter().map(move |&y| (x, y))).collect();
        Self::new(points)
    }

    pub fn evaluate(mut self, mc: &MCFunction) -> Self {
        self.values = self.points.iter().map(|&(x, y)| mc.kernel(x, y)).collect();
        self
    }
}

const AXIOM_SEED: u64 = 0x6d63_6178_696f_6d73;
const MONOTONICITY_TRIALS: usize = 64;

fn random_positive(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut m = (&g * g.adjoint()).unscale(n as f64);
    for i in 0..n {
        m[(i, i)] += shift;
    }
    m
}

/// Samples the defining properties of an MC function: symmetry,
/// homogeneity of degree −1, the functional equation `f(t) = t f(1/t)`,
/// normalization (when claimed), scalar monotonicity of `f` and matrix
/// monotonicity `A ≤ B ⇒ f(A) ≤ f(B)` on random pairs up to 3×3.
pub fn check_axioms(mc: &MCFunction, grid: &KernelGrid, tol: f64) -> Result<PropertyReport> {
    if grid.points.is_empty() {
        return Err(Error::Domain("axiom grid is empty".into()));
    }
    let mut report = PropertyReport::new("axioms", mc.label(), AXIOM_SEED);
    let scales = [1e-3, 0.5, 7.0, 1e3];
    for (i, &(x, y)) in grid.points.iter().enumerate() {
        let cxy = mc.kernel(x, y);
        let sym = (cxy - mc.kernel(y, x)).abs() / cxy.abs();
        report.check(i, "symmetry", sym, tol, || format!("c({x},{y}) vs c({y},{x})"));
        for &s in &scales {
            let hom = (s * mc.kernel(s * x, s * y) - cxy).abs() / cxy.abs();
            report.check(i, "homogeneity", hom, tol, || format!("s={s} at ({x},{y})"));
        }
        let t = x / y;
        let ft = mc.representing_f(t);
        let fe = (ft - t * mc.representing_f(1.0 / t)).abs() / ft.abs();
        report.check(i, "functional-equation", fe, tol, || format!("t={t}"));
        if mc.is_normalized() {
            let diag = (mc.kernel(x, x) * x - 1.0).abs();
            report.check(i, "normalization", diag, tol, || format!("x·c(x,x) at x={x}"));
        }
    }
    if mc.is_normalized() {
        let n11 = (mc.kernel(1.0, 1.0) - 1.0).abs();
        report.check(grid.points.len(), "normalization", n11, tol, || "c(1,1)".into());
    }
    let mut ts: Vec<f64> = grid.points.iter().map(|&(x, y)| x / y).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    for (i, w) in ts.windows(2).enumerate() {
        let (f0, f1) = (mc.representing_f(w[0]), mc.representing_f(w[1]));
        let drop = ((f0 - f1) / f1.abs().max(f64::MIN_POSITIVE)).max(0.0);
        report.check(i, "scalar-monotonicity", drop, tol, || format!("f({}) > f({})", w[0], w[1]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(AXIOM_SEED);
    for trial in 0..MONOTONICITY_TRIALS {
        let n = 1 + trial % 3;
        let a = random_positive(&mut rng, n, 0.05);
        let b = &a + random_positive(&mut rng, n, 0.0).scale(rng.random_range(0.01..2.0));
        let (Ok(sa), Ok(sb)) = (linalg::spectral(&a), linalg::spectral(&b)) else {
            report.error(trial, "matrix-monotonicity", "spectral decomposition failed".into());
            continue;
        };
        let fa = sa.apply(|l| mc.representing_f(l));
        let fb = sb.apply(|l| mc.representing_f(l));
        let diff = linalg::hermitian_part(&(fb - fa));
        match linalg::spectral(&diff) {
            Ok(sd) => {
                let min = sd.eigenvalues.last().copied().unwrap_or(0.0);
                let scale = sb.eigenvalues[0].max(1.0);
                report.check(trial, "matrix-monotonicity", (-min / scale).max(0.0), tol, || {
                    format!("min eig of f(B)-f(A) = {min:e}, n={n}")
                });
            }
            Err(e) => report.error(trial, "matrix-monotonicity", e.to_string()),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn wyd_half_at_four_one() {
        let c = MCFunction::wyd(0.5).unwrap().eval_c(4.0, 1.0).unwrap();
        assert!(rel(c, 4.0 / 9.0) < 1e-15);
        let c = MCFunction::wy().eval_c(4.0, 1.0).unwrap();
        assert!(rel(c, 4.0 / 9.0) < 1e-15);
    }

    #[test]
    fn bures_diagonal() {
        assert_eq!(MCFunction::bures().eval_c(2.0, 2.0).unwrap(), 0.5);
    }

    #[test]
    fn kubo_at_e() {
        let c = MCFunction::kubo().eval_c(E, 1.0).unwrap();
        assert!(rel(c, 1.0 / (E - 1.0)) < 1e-15);
    }

    #[test]
    fn extreme_one_is_bures() {
        let e = MCFunction::extreme(1.0).unwrap();
        for &(x, y) in &[(0.3, 7.0), (1.0, 1.0), (1e-4, 2.0)] {
            assert!(rel(e.eval_c(x, y).unwrap(), 2.0 / (x + y)) < 1e-15);
        }
    }

    #[test]
    fn bridge_one_is_maximal() {
        let b = MCFunction::bridge(1.0).unwrap();
        let e0 = MCFunction::extreme(0.0).unwrap();
        for &(x, y) in &[(0.3, 7.0), (2.0, 5.0)] {
            let max = (x + y) / (2.0 * x * y);
            assert!(rel(b.eval_c(x, y).unwrap(), max) < 1e-14);
            assert!(rel(e0.eval_c(x, y).unwrap(), max) < 1e-14);
        }
    }

    #[test]
    fn variant_bridge_zero_is_bures() {
        let v = MCFunction::variant_bridge(0.0).unwrap();
        for &(x, y) in &[(0.3, 7.0), (2.0, 5.0), (1.0, 1.0)] {
            assert!(rel(v.eval_c(x, y).unwrap(), 2.0 / (x + y)) < 1e-15);
        }
    }

    #[test]
    fn near_diagonal_matches_independent_forms() {
        // x - 1 = 2^-23 is exact, so ln_1p gives ln x to full precision
        let h = 2f64.powi(-23);
        let x = 1.0 + h;
        let wy = 4.0 / ((1.0 + x.sqrt()) * (1.0 + x.sqrt()));
        assert!(rel(MCFunction::wyd(0.5).unwrap().eval_c(x, 1.0).unwrap(), wy) < 1e-15);
        let kubo = h.ln_1p() / h;
        assert!(rel(MCFunction::kubo().eval_c(x, 1.0).unwrap(), kubo) < 1e-15);
        // p = 0.25: (x^p - 1) = expm1(p ln x) evaluated without cancellation
        let (p, q) = (0.25f64, 0.75f64);
        let l = h.ln_1p();
        let wyd = (p * l).exp_m1() * (q * l).exp_m1() / (p * q * h * h);
        assert!(rel(MCFunction::wyd(p).unwrap().eval_c(x, 1.0).unwrap(), wyd) < 1e-13);
    }

    #[test]
    fn near_diagonal_is_continuous_across_branch_switch() {
        let wyd = MCFunction::wyd(0.3).unwrap();
        let kubo = MCFunction::kubo();
        for mc in [&wyd, &kubo] {
            // just inside and just outside the switch
            let inside = mc.eval_c(1.0 + 1.9e-6, 1.0).unwrap();
            let outside = mc.eval_c(1.0 + 2.1e-6, 1.0).unwrap();
            // f is smooth with |c'| ~ 1/2, so the jump is dominated by 2e-7/2
            assert!((inside - outside).abs() < 1.1e-7 / 1.0, "{} {}", inside, outside);
            assert!((inside - outside) > 0.0);
        }
    }

    #[test]
    fn c_hat_values() {
        let wyd = MCFunction::wyd(0.3).unwrap();
        assert_eq!(wyd.eval_c_hat(3.0, 3.0).unwrap(), 0.0);
        let (x, y, p) = (2.0f64, 0.5f64, 0.3f64);
        let q = 1.0 - p;
        let expected = (x + y - x.powf(p) * y.powf(q) - x.powf(q) * y.powf(p)) / (p * q);
        assert!(rel(wyd.eval_c_hat(x, y).unwrap(), expected) < 1e-13);
        // on the line x + y = 2 the form with a constant 2 coincides
        let (x, y) = (1.5f64, 0.5f64);
        let printed = (2.0 - x.powf(p) * y.powf(q) - x.powf(q) * y.powf(p)) / (p * q);
        assert!(rel(wyd.eval_c_hat(x, y).unwrap(), printed) < 1e-13);
        assert!(rel(MCFunction::bures().eval_c_hat(1.0, 0.0).unwrap(), 2.0) < 1e-15);
        assert!(MCFunction::kubo().eval_c_hat(1.0, 0.0).unwrap().is_infinite());
        assert!(wyd.eval_c_hat(-1.0, 0.0).is_err());
    }

    #[test]
    fn metric_constants_closed_form() {
        let cases = [
            (MCFunction::wyd(0.3).unwrap(), Some(0.21)),
            (MCFunction::extreme(0.5).unwrap(), Some(2.0 * 0.5 / 2.25)),
            (MCFunction::bures(), Some(0.5)),
            (MCFunction::kubo(), None),
            (MCFunction::bridge(0.5).unwrap(), None),
            (MCFunction::extreme(0.0).unwrap(), None),
            (MCFunction::variant_bridge(1.0).unwrap(), None),
        ];
        for (mc, expected) in cases {
            match (mc.metric_constant(), expected) {
                (MetricConstant::Regular(m), Some(e)) => assert!(rel(m, e) < 1e-15, "{mc}"),
                (MetricConstant::NonRegular, None) => {}
                (got, _) => panic!("{mc}: {got:?}"),
            }
        }
    }

    #[test]
    fn numeric_limit_classifies() {
        assert_eq!(MCFunction::kubo().numeric_metric_constant(), MetricConstant::NonRegular);
        for g in [0.25, 0.5, 0.75, 1.0] {
            let mc = MCFunction::bridge(g).unwrap();
            assert_eq!(mc.numeric_metric_constant(), MetricConstant::NonRegular, "{mc}");
        }
        let m = MCFunction::wyd(0.001).unwrap().numeric_metric_constant();
        assert!(m.is_regular(), "{m:?}");
        for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let m = MCFunction::wyd(p).unwrap().numeric_metric_constant().value().unwrap();
            assert!(rel(m, p * (1.0 - p)) < 1e-6, "p={p}: {m}");
        }
    }

    #[test]
    fn d_function_endpoints() {
        for mc in [
            MCFunction::wyd(0.3).unwrap(),
            MCFunction::wy(),
            MCFunction::bures(),
            MCFunction::extreme(0.4).unwrap(),
            MCFunction::variant_bridge(0.5).unwrap(),
        ] {
            let m = mc.metric_constant().value().unwrap();
            assert_eq!(mc.eval_d(2.5, 0.0).unwrap(), 0.0);
            assert_eq!(mc.eval_d(0.0, 2.5).unwrap(), 0.0);
            assert!(rel(mc.eval_d(1.0, 1.0).unwrap(), 2.0 / m) < 1e-14, "{mc}");
        }
        assert!(matches!(MCFunction::kubo().eval_d(1.0, 2.0), Err(Error::NonRegular(_))));
    }

    #[test]
    fn bures_d_closed_form_against_grid() {
        // oracle: 2(x+y) - 2(x-y)^2/(x+y) evaluated directly
        let b = MCFunction::bures();
        for i in 1..8 {
            for j in 1..8 {
                let (x, y) = (0.37 * i as f64, 1.9 / j as f64);
                let oracle = 2.0 * (x + y) - 2.0 * (x - y) * (x - y) / (x + y);
                assert!(rel(b.eval_d(x, y).unwrap(), oracle) < 1e-13);
                assert!(rel(b.eval_d(x, y).unwrap(), 8.0 * x * y / (x + y)) < 1e-15);
            }
        }
    }

    #[test]
    fn f_lambda_values() {
        assert!(rel(eval_f_lambda(1.0, 2.0, 3.0).unwrap(), 2.0 * 6.0 / 5.0) < 1e-15);
        assert!(rel(eval_f_lambda(0.37, 1.0, 1.0).unwrap(), 1.0) < 1e-15);
        assert!(rel(eval_f_lambda(0.0, 2.0, 3.0).unwrap(), 2.5) < 1e-15);
        assert!(eval_f_lambda(0.5, 0.0, 1.0).is_err());
        assert!(eval_f_lambda(1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn builtin_lookup_and_ranges() {
        let mut params = BTreeMap::new();
        params.insert("p".to_string(), 0.5);
        let w = MCFunction::builtin("wyd", &params).unwrap();
        assert!(w.is_normalized());
        assert!((w.eval_c(1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(MCFunction::wyd(0.0).is_err());
        assert!(MCFunction::wyd(1.0).is_err());
        assert!(MCFunction::bridge(1.1).is_err());
        assert!(MCFunction::extreme(-0.1).is_err());
        assert!(MCFunction::builtin("nope", &BTreeMap::new()).is_err());
        assert!(MCFunction::builtin("wyd", &BTreeMap::new()).is_err());
        assert!(MCFunction::builtin("bures", &params).is_err());
        let flags: Vec<bool> = [
            MCFunction::wyd(0.2).unwrap(),
            MCFunction::wy(),
            MCFunction::bures(),
            MCFunction::extreme(0.3).unwrap(),
            MCFunction::variant_bridge(0.9).unwrap(),
        ]
        .iter()
        .map(MCFunction::is_regular)
        .collect();
        assert!(flags.iter().all(|&r| r));
        let flags: Vec<bool> = [
            MCFunction::kubo(),
            MCFunction::bridge(0.2).unwrap(),
            MCFunction::extreme(0.0).unwrap(),
            MCFunction::variant_bridge(1.0).unwrap(),
        ]
        .iter()
        .map(MCFunction::is_regular)
        .collect();
        assert!(flags.iter().all(|&r| !r));
    }

    #[test]
    fn eval_rejects_nonpositive() {
        let b = MCFunction::bures();
        assert!(b.eval_c(0.0, 1.0).is_err());
        assert!(b.eval_c(1.0, -1.0).is_err());
        assert!(b.eval_c(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn axioms_hold_for_wyd() {
        let grid = KernelGrid::log_grid(9, 1e-3, 1e3).unwrap();
        let r = check_axioms(&MCFunction::wyd(0.3).unwrap(), &grid, 1e-10).unwrap();
        assert_eq!(r.failures, 0, "{:?}", r.cases);
        assert!(r.max_violation <= 1e-10);
    }

    #[test]
    fn kubo_functional_equation_on_symmetric_grid() {
        let grid = KernelGrid::new(vec![(2.0, 0.5), (0.5, 2.0), (3.0, 3.0), (10.0, 0.1)]).unwrap();
        let r = check_axioms(&MCFunction::kubo(), &grid, 1e-14).unwrap();
        assert_eq!(r.failures, 0, "{:?}", r.cases);
    }

    #[test]
    fn corrupted_evaluator_fails_normalization() {
        let base = MCFunction::bures();
        let bad = MCFunction::custom("corrupted", move |x, y| base.eval_c(x, y).unwrap() + 0.01, true);
        let grid = KernelGrid::log_grid(5, 0.1, 10.0).unwrap();
        let r = check_axioms(&bad, &grid, 1e-10).unwrap();
        assert!(r.cases.iter().any(|c| c.check == "normalization"));
        assert!(r.failures > 0);
    }

    #[test]
    fn variant_bridge_derivative_is_negative() {
        for p in [0.1, 0.5, 0.9] {
            for t in [0.01, 0.5, 2.0, 100.0] {
                assert!(variant_bridge_df_dp(p, t) < 0.0);
                assert!(variant_bridge_df_dp_printed(p, t) < 0.0);
            }
            assert_eq!(variant_bridge_df_dp(p, 1.0), 0.0);
        }
    }

    #[test]
    fn complex_continuation_agrees_on_positive_axis() {
        for mc in [
            MCFunction::wyd(0.3).unwrap(),
            MCFunction::wy(),
            MCFunction::bures(),
            MCFunction::kubo(),
            MCFunction::bridge(0.4).unwrap(),
            MCFunction::extreme(0.6).unwrap(),
            MCFunction::variant_bridge(0.5).unwrap(),
        ] {
            for t in [0.1, 0.7, 3.0] {
                let z = mc.eval_unit_complex(Complex64::new(t, 1e-300)).unwrap();
                assert!(rel(z.re, mc.eval_c(t, 1.0).unwrap()) < 1e-13, "{mc} at {t}");
                assert!(z.im.abs() < 1e-200);
            }
        }
    }
}
