//! Integral representations of Morozova–Chentsov functions.
//!
//! Every MC function is a mixture of the extreme kernels
//! `c_λ(x, y) = ((1+λ)/2)(1/(x+λy) + 1/(λx+y))` against a finite measure
//! `μ_c` on `[0, 1]`, and also admits the exponential form
//! `c(x, y) = C₀/(x+y)·exp ∫ w(λ; x, y) h(λ) dλ` with `0 ≤ h ≤ 1`.
//! This module tabulates both for the builtins, reconstructs `c` from them
//! by quadrature, and recovers densities numerically from boundary values of
//! the analytic continuation.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mcfunc::{extreme_kernel, Family, MCFunction};
use crate::quad::{self, QuadratureConfig};

/// Density called as `density(λ, 1 - λ)`.
pub type DensityFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Default imaginary offset for [`boundary_density_oracle`].
pub const DEFAULT_BOUNDARY_EPS: f64 = 1e-6;

/// A finite Borel measure on `[0, 1]`: an absolutely continuous part on
/// `(0, 1)` plus point masses.
#[derive(Clone)]
pub struct RepresentingMeasure {
    density: Option<DensityFn>,
    atoms: Vec<(f64, f64)>,
    endpoint_exponents: (f64, f64),
}

impl fmt::Debug for RepresentingMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RepresentingMeasure")
            .field("has_density", &self.density.is_some())
            .field("atoms", &self.atoms)
            .field("endpoint_exponents", &self.endpoint_exponents)
            .finish()
    }
}

impl RepresentingMeasure {
    /// `density(λ) ~ λ^a` near 0 and `~ (1-λ)^b` near 1, with `a, b > -1`.
    pub fn new(
        density: Option<DensityFn>,
        atoms: Vec<(f64, f64)>,
        endpoint_exponents: (f64, f64),
    ) -> Result<Self> {
        let (a, b) = endpoint_exponents;
        if !(a > -1.0 && b > -1.0) {
            return Err(Error::Domain(format!("endpoint exponents ({a}, {b}) must exceed -1")));
        }
        for &(loc, mass) in &atoms {
            if !(0.0..=1.0).contains(&loc) || !(mass > 0.0 && mass.is_finite()) {
                return Err(Error::Domain(format!("invalid atom ({loc}, {mass})")));
            }
        }
        Ok(Self { density, atoms, endpoint_exponents })
    }

    fn absolutely_continuous(density: DensityFn, exponents: (f64, f64)) -> Self {
        Self { density: Some(density), atoms: Vec::new(), endpoint_exponents: exponents }
    }

    fn dirac(at: f64) -> Self {
        Self { density: None, atoms: vec![(at, 1.0)], endpoint_exponents: (0.0, 0.0) }
    }

    /// Density at `λ ∈ (0, 1)`; zero for purely atomic measures.
    pub fn density(&self, lambda: f64) -> f64 {
        self.density_split(lambda, 1.0 - lambda)
    }

    fn density_split(&self, lambda: f64, one_minus: f64) -> f64 {
        match &self.density {
            Some(d) => d(lambda, one_minus),
            None => 0.0,
        }
    }

    pub fn has_density(&self) -> bool {
        self.density.is_some()
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn endpoint_exponents(&self) -> (f64, f64) {
        self.endpoint_exponents
    }

    /// `∫ g(λ) dμ(λ)` for `g` bounded on `[0, 1]`. `extra` is added to
    /// the lower endpoint exponent to account for the behaviour of `g`.
    pub fn integrate<G: Fn(f64, f64) -> f64>(
        &self,
        g: G,
        lower: f64,
        extra: f64,
        cfg: &QuadratureConfig,
    ) -> Result<f64> {
        let mut total = 0.0;
        if self.density.is_some() {
            let (a, b) = self.endpoint_exponents;
            let est = quad::integrate_from(
                |l, r| g(l, r) * self.density_split(l, r),
                lower,
                (a + extra, b),
                cfg,
            )?;
            total += est.value;
        }
        for &(loc, mass) in &self.atoms {
            if loc >= lower {
                total += mass * g(loc, 1.0 - loc);
            }
        }
        Ok(total)
    }

    pub fn total_mass(&self, cfg: &QuadratureConfig) -> Result<f64> {
        self.integrate(|_, _| 1.0, 0.0, 0.0, cfg)
    }
}

fn wyd_density(p: f64) -> DensityFn {
    let q = 1.0 - p;
    let k = 2.0 * (p * std::f64::consts::PI).sin() / (std::f64::consts::PI * p * q);
    Arc::new(move |l, _| {
        let s = 1.0 + l;
        k * (l.powf(p) + l.powf(q)) / (s * s * s)
    })
}

fn bridge_density(gamma: f64) -> DensityFn {
    let k = 2.0 * (gamma * std::f64::consts::PI).sin() / std::f64::consts::PI;
    Arc::new(move |l, r| k / (1.0 + l) * l.powf(-gamma) * (0.5 * r).powf(2.0 * gamma - 1.0))
}

/// Tabulated representing measure `μ_c`.
pub fn measure_of(mc: &MCFunction) -> Result<RepresentingMeasure> {
    let unsupported = || Error::Unsupported(format!("no tabulated measure for {}", mc.label()));
    let family = mc.tabulated_family().ok_or_else(unsupported)?;
    let pi = std::f64::consts::PI;
    Ok(match family {
        Family::Wyd { p } => {
            RepresentingMeasure::absolutely_continuous(wyd_density(p), (p.min(1.0 - p), 0.0))
        }
        Family::WignerYanase => RepresentingMeasure::absolutely_continuous(
            Arc::new(move |l, _| {
                let s = 1.0 + l;
                16.0 * l.sqrt() / (pi * s * s * s)
            }),
            (0.5, 0.0),
        ),
        Family::Kubo => RepresentingMeasure::absolutely_continuous(
            Arc::new(|l, _| 2.0 / ((1.0 + l) * (1.0 + l))),
            (0.0, 0.0),
        ),
        Family::Bures => RepresentingMeasure::dirac(1.0),
        Family::Bridge { gamma } if gamma == 0.0 => RepresentingMeasure::dirac(1.0),
        Family::Bridge { gamma } if gamma == 1.0 => RepresentingMeasure::dirac(0.0),
        Family::Bridge { gamma } => RepresentingMeasure::absolutely_continuous(
            bridge_density(gamma),
            (-gamma, 2.0 * gamma - 1.0),
        ),
        Family::Extreme { lambda } => RepresentingMeasure::dirac(lambda),
        Family::VariantBridge { .. } => return Err(unsupported()),
    })
}

fn check_point(x: f64, y: f64) -> Result<()> {
    if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("reconstruction at ({x}, {y}) needs positive arguments")))
    }
}

/// `∫ c_λ(x, y) dμ(λ)`.
pub fn reconstruct_from_measure(
    measure: &RepresentingMeasure,
    x: f64,
    y: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_point(x, y)?;
    measure.integrate(|l, _| extreme_kernel(l, x, y), 0.0, 0.0, cfg)
}

/// `∫ (1+λ)²/(2λ) dμ_c(λ)`, which equals `1/m(c)` for regular `c`.
///
/// Fails with [`Error::NonRegular`] when the integral diverges at 0.
pub fn metric_constant_integral(
    measure: &RepresentingMeasure,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let a = measure.endpoint_exponents.0;
    let atom_at_zero = measure.atoms.iter().any(|&(loc, _)| loc == 0.0);
    if atom_at_zero || (measure.has_density() && a <= 0.0) {
        return Err(Error::NonRegular(format!(
            "∫ (1+λ)²/(2λ) dμ diverges at 0 (density exponent {a})"
        )));
    }
    measure.integrate(|l, _| (1.0 + l) * (1.0 + l) / (2.0 * l), 0.0, -1.0, cfg)
}

/// The same integral restricted to `[cutoff, 1]`, `0 < cutoff < 1`.
pub fn metric_constant_integral_from(
    measure: &RepresentingMeasure,
    cutoff: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::Domain(format!("cutoff {cutoff} outside (0, 1)")));
    }
    measure.integrate(|l, _| (1.0 + l) * (1.0 + l) / (2.0 * l), cutoff, 0.0, cfg)
}

/// Weight function `h` of the exponential representation.
pub type WeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `c(x, y) = C₀/(x+y)·exp ∫₀¹ ((1-λ²)/(1+λ²))·((x²+y²)/((x+λy)(λx+y)))·h(λ) dλ`.
#[derive(Clone)]
pub struct HRepresentation {
    pub c0: f64,
    pub h: WeightFn,
}

impl fmt::Debug for HRepresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HRepresentation").field("c0", &self.c0).finish_non_exhaustive()
    }
}

/// `h` for WYD(p): the angle of
/// `(1-λ-(λ^p-λ^q)cos pπ) + i(λ^p+λ^q) sin pπ`, divided by π.
pub fn wyd_h(p: f64, lambda: f64) -> f64 {
    let q = 1.0 - p;
    let pi = std::f64::consts::PI;
    let (lp, lq) = (lambda.powf(p), lambda.powf(q));
    let num = (lp + lq) * (p * pi).sin();
    let den = 1.0 - lambda - (lp - lq) * (p * pi).cos();
    num.atan2(den) / pi
}

/// `h` for Kubo: `1/2 - arctan(-ln λ/π)/π`.
pub fn kubo_h(lambda: f64) -> f64 {
    let pi = std::f64::consts::PI;
    0.5 - (-lambda.ln() / pi).atan() / pi
}

/// The alternative form `1 - arctan(π/ln λ)/π`, read with the branch of
/// the angle that lies in `(0, π)`.
pub fn kubo_h_variant(lambda: f64) -> f64 {
    let pi = std::f64::consts::PI;
    1.0 - pi.atan2(lambda.ln()) / pi
}

/// Tabulated `(C₀, h)`.
pub fn h_repr_of(mc: &MCFunction) -> Result<HRepresentation> {
    let unsupported = || Error::Unsupported(format!("no tabulated h-representation for {}", mc.label()));
    let family = mc.tabulated_family().ok_or_else(unsupported)?;
    let pi = std::f64::consts::PI;
    Ok(match family {
        Family::Wyd { p } => {
            let q = 1.0 - p;
            let c0 = std::f64::consts::SQRT_2 / (p * q)
                * (1.0 - (p * pi / 2.0).cos()).sqrt()
                * (1.0 - (q * pi / 2.0).cos()).sqrt();
            HRepresentation { c0, h: Arc::new(move |l| wyd_h(p, l)) }
        }
        Family::WignerYanase => HRepresentation {
            c0: 4.0 * (std::f64::consts::SQRT_2 - 1.0),
            h: Arc::new(|l: f64| (2.0 * l.sqrt()).atan2(1.0 - l) / std::f64::consts::PI),
        },
        Family::Kubo => HRepresentation { c0: pi / 2.0, h: Arc::new(kubo_h) },
        Family::Bridge { gamma } => {
            HRepresentation { c0: 2f64.powf(1.0 - gamma), h: Arc::new(move |_| gamma) }
        }
        Family::Bures => HRepresentation { c0: 2.0, h: Arc::new(|_| 0.0) },
        _ => return Err(unsupported()),
    })
}

/// Evaluates the exponential representation at `(x, y)` by quadrature.
pub fn reconstruct_from_h(
    hr: &HRepresentation,
    x: f64,
    y: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_point(x, y)?;
    let s2 = x * x + y * y;
    let est = quad::integrate_unit(
        |l, _| {
            let l2 = l * l;
            (1.0 - l2) / (1.0 + l2) * s2 / ((x + l * y) * (l * x + y)) * (hr.h)(l)
        },
        (0.0, 0.0),
        cfg,
    )?;
    Ok(hr.c0 / (x + y) * est.value.exp())
}

fn boundary_value(mc: &MCFunction, lambda: f64, eps: f64) -> Result<f64> {
    let g = mc.eval_unit_complex(Complex64::new(-lambda, eps))?;
    Ok(2.0 / (1.0 + lambda) * (-g.im) / std::f64::consts::PI)
}

/// Density of `μ_c` at `λ` recovered from the boundary values of
/// `g(z) = c(z, 1)` on the negative axis: `(2/(1+λ))·(1/π)·Im(-g(-λ+iε))`,
/// with one Richardson step combining `ε` and `2ε`.
pub fn boundary_density_oracle(mc: &MCFunction, lambda: f64, eps: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("boundary oracle needs 0 < λ < 1, got {lambda}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("boundary offset must be positive, got {eps}")));
    }
    let d1 = boundary_value(mc, lambda, eps)?;
    let d2 = boundary_value(mc, lambda, 2.0 * eps)?;
    let est = 2.0 * d1 - d2;
    if est < -1e-8 * d1.abs().max(1.0) {
        return Err(Error::Continuation(format!(
            "negative boundary density {est:e} for {} at λ = {lambda}",
            mc.label()
        )));
    }
    Ok(est.max(0.0))
}
