//! State-level quantities of quantum information geometry.
//!
//! Functions of the commuting pair `(L_ρ, R_ρ)` act in the eigenbasis of `ρ`
//! as entrywise kernels: if `ρ = U diag(λ) U*` and `Ã = U* A U`, then
//! `k(L_ρ, R_ρ)A` has entries `k(λ_i, λ_j) Ã_ij` in that basis. Every quantity
//! here is a weighted sum over `|Ã_ij|²` or `conj(Ã_ij) B̃_ij`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, SpectralDecomposition};
use crate::mcfunc::MCFunction;
use crate::quad::QuadratureConfig;
use crate::repr;

/// Hermiticity, trace and positivity tolerance for states and observables.
pub const STATE_TOL: f64 = 1e-12;

/// Trace-preservation tolerance for Kraus sets.
pub const KRAUS_TOL: f64 = 1e-10;

/// Computed eigenvalues at or below this are treated as exact zeros in the
/// singular-state extension. Eigensolver noise on a unit-trace state is
/// around `n·1e-16`, and kernels such as `d(x, y) ~ x^p` for WYD turn that
/// noise into visible errors.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-13;

/// Smallest eigenvalue accepted by the strictly positive routes.
pub const POSITIVITY_TOL: f64 = 1e-12;

/// Negative results down to this are rounding and are clamped to 0.
pub const NEGATIVE_TOL: f64 = 1e-12;

fn clamp_nonnegative(v: f64) -> Result<f64> {
    if v < -NEGATIVE_TOL || v.is_nan() {
        Err(Error::NegativeResult(v))
    } else {
        Ok(v.max(0.0))
    }
}

fn check_hermitian(m: &CMatrix) -> Result<usize> {
    let n = linalg::ensure_square(m)?;
    let dev = linalg::hermitian_deviation(m);
    if dev > STATE_TOL * linalg::max_abs(m).max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(n)
}

/// A density matrix with its cached spectral decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    spectrum: SpectralDecomposition,
    zero_tol: f64,
}

impl DensityMatrix {
    /// Validates a Hermitian, unit-trace, positive semidefinite matrix of
    /// dimension at least 2.
    pub fn new(m: CMatrix) -> Result<Self> {
        let n = check_hermitian(&m)?;
        if n < 2 {
            return Err(Error::Domain(format!("density matrix dimension {n} < 2")));
        }
        let m = linalg::hermitian_part(&m);
        let tr = linalg::trace(&m).re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let spectrum = linalg::spectral(&m)?;
        let min = spectrum.eigenvalues[n - 1];
        if min < -STATE_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix: m, spectrum, zero_tol: ZERO_EIGENVALUE_TOL })
    }

    /// Builds `U diag(λ) U*` and keeps the given spectrum as exact, so tiny
    /// eigenvalues are not snapped to zero. `basis` must be unitary.
    pub fn from_spectrum(eigenvalues: &[f64], basis: CMatrix) -> Result<Self> {
        let n = eigenvalues.len();
        if n < 2 {
            return Err(Error::Domain(format!("density matrix dimension {n} < 2")));
        }
        if basis.nrows() != n || basis.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: basis.nrows() });
        }
        let dev = linalg::max_abs(&(basis.adjoint() * &basis - linalg::identity(n)));
        if dev > KRAUS_TOL {
            return Err(Error::Domain(format!("basis is not unitary (deviation {dev:e})")));
        }
        if let Some(&bad) = eigenvalues.iter().find(|&&l| l < 0.0 || !l.is_finite()) {
            return Err(Error::NotPositive(bad));
        }
        let tr: f64 = eigenvalues.iter().sum();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eigenvalues[j].total_cmp(&eigenvalues[i]).then(i.cmp(&j)));
        let mut sorted_basis = CMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            sorted_basis.set_column(dst, &basis.column(src));
        }
        let spectrum = SpectralDecomposition {
            eigenvalues: order.iter().map(|&i| eigenvalues[i]).collect(),
            basis: sorted_basis,
        };
        let matrix = linalg::hermitian_part(&spectrum.reconstruct());
        Ok(Self { matrix, spectrum, zero_tol: 0.0 })
    }

    pub fn from_diag(p: &[f64]) -> Result<Self> {
        Self::from_spectrum(p, linalg::identity(p.len()))
    }

    /// The maximally mixed state `I/n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        Self::from_diag(&vec![1.0 / n as f64; n])
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum.eigenvalues[self.dim() - 1]
    }

    /// `(1-t)ρ + tσ`
    pub fn mix(&self, other: &DensityMatrix, t: f64) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("mixing weight {t} outside [0, 1]")));
        }
        Self::new(self.matrix.scale(1.0 - t) + other.matrix.scale(t))
    }

    /// Eigenvalues as used by the singular-state extension.
    fn snapped_eigenvalues(&self) -> Vec<f64> {
        self.spectrum
            .eigenvalues
            .iter()
            .map(|&l| if l <= self.zero_tol { 0.0 } else { l })
            .collect()
    }

    fn require_positive(&self) -> Result<()> {
        let min = self.min_eigenvalue();
        if min > POSITIVITY_TOL {
            Ok(())
        } else {
            Err(Error::NotPositive(min))
        }
    }
}

/// A Hermitian observable.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
}

impl Observable {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_hermitian(&m)?;
        Ok(Self { matrix: linalg::hermitian_part(&m) })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: linalg::identity(n) }
    }

    pub fn pauli_x() -> Self {
        Self { matrix: linalg::pauli_x() }
    }

    pub fn pauli_y() -> Self {
        Self { matrix: linalg::pauli_y() }
    }

    pub fn pauli_z() -> Self {
        Self { matrix: linalg::pauli_z() }
    }

    pub fn from_diag(values: &[f64]) -> Self {
        Self { matrix: linalg::diag(values) }
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

fn check_square_dim(m: &CMatrix, n: usize) -> Result<()> {
    let k = linalg::ensure_square(m)?;
    check_dims(n, k)
}

/// `Σ_ij w(λ_i, λ_j) |Ã_ij|²`
fn weighted_norm(lams: &[f64], a: &CMatrix, w: impl Fn(f64, f64) -> f64) -> f64 {
    let n = lams.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let a2 = a[(i, j)].norm_sqr();
            if a2 != 0.0 {
                total += w(lams[i], lams[j]) * a2;
            }
        }
    }
    total
}

/// `Σ_ij conj(Ã_ij) w(λ_i, λ_j) B̃_ij`
fn weighted_inner(lams: &[f64], a: &CMatrix, b: &CMatrix, w: impl Fn(f64, f64) -> f64) -> Complex64 {
    let n = lams.len();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            total += a[(i, j)].conj() * b[(i, j)] * w(lams[i], lams[j]);
        }
    }
    total
}

/// `K_ρ(A, B) = tr A* c(L_ρ, R_ρ) B` for strictly positive `ρ`.
pub fn metric(mc: &MCFunction, rho: &DensityMatrix, a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    check_square_dim(a, rho.dim())?;
    check_square_dim(b, rho.dim())?;
    rho.require_positive()?;
    let s = rho.spectrum();
    let (at, bt) = (s.to_eigenbasis(a), s.to_eigenbasis(b));
    Ok(weighted_inner(&s.eigenvalues, &at, &bt, |x, y| mc.kernel(x, y)))
}

/// Metric adjusted skew information through the representing function:
/// `tr ρA² - (m/2) tr A d(L_ρ, R_ρ) A`. Singular states are allowed.
pub fn skew_info(mc: &MCFunction, rho: &DensityMatrix, a: &Observable) -> Result<f64> {
    check_dims(rho.dim(), a.dim())?;
    let m = mc.require_regular()?;
    let lams = rho.snapped_eigenvalues();
    let at = rho.spectrum().to_eigenbasis(a.matrix());
    let second_moment = weighted_norm(rho.eigenvalues(), &at, |x, _| x);
    let d_part = weighted_norm(&lams, &at, |x, y| mc.d_unchecked(x, y, m));
    clamp_nonnegative(second_moment - 0.5 * m * d_part)
}

/// Skew information through the commutator form
/// `(m/2) Σ (λ_i - λ_j)² c(λ_i, λ_j) |Ã_ij|²`; needs strictly positive `ρ`.
pub fn skew_info_commutator(mc: &MCFunction, rho: &DensityMatrix, a: &Observable) -> Result<f64> {
    check_dims(rho.dim(), a.dim())?;
    let m = mc.require_regular()?;
    rho.require_positive()?;
    let s = rho.spectrum();
    let at = s.to_eigenbasis(a.matrix());
    let v = 0.5 * m * weighted_norm(&s.eigenvalues, &at, |x, y| mc.c_hat_unchecked(x, y));
    clamp_nonnegative(v)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda <= 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { name: "lambda", value: lambda, range: "0 < lambda <= 1" })
    }
}

/// `I_λ(ρ, A) = tr ρA² - tr A f_λ(L_ρ, R_ρ) A` for `0 < λ ≤ 1`.
pub fn lambda_skew_info(lambda: f64, rho: &DensityMatrix, a: &Observable) -> Result<f64> {
    check_lambda(lambda)?;
    check_dims(rho.dim(), a.dim())?;
    let lams = rho.snapped_eigenvalues();
    let at = rho.spectrum().to_eigenbasis(a.matrix());
    let second_moment = weighted_norm(rho.eigenvalues(), &at, |x, _| x);
    let f_part = weighted_norm(&lams, &at, |x, y| crate::mcfunc::f_lambda_extended(lambda, x, y));
    clamp_nonnegative(second_moment - f_part)
}

/// `(x+y)/2 - f_λ(x, y)` divided by `λ`, i.e. the entrywise kernel of
/// `I_λ/λ`. Bounded as `λ → 0` whenever `x, y > 0`.
fn lambda_kernel_over_lambda(lambda: f64, x: f64, y: f64) -> f64 {
    if x == y {
        return 0.0;
    }
    let d = x - y;
    d * d * (x + y) / (2.0 * (x + lambda * y) * (lambda * x + y))
}

/// Skew information as the λ-mixture
/// `(m/2) ∫ I_λ(ρ, A) (1+λ)²/λ dμ_c(λ)` of λ-skew informations.
pub fn mixture_skew_info(
    mc: &MCFunction,
    rho: &DensityMatrix,
    a: &Observable,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_dims(rho.dim(), a.dim())?;
    let m = mc.require_regular()?;
    let measure = repr::measure_of(mc)?;
    let lams = rho.snapped_eigenvalues();
    let at = rho.spectrum().to_eigenbasis(a.matrix());
    let n = lams.len();
    let pairs: Vec<(f64, f64, f64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && lams[i] != lams[j])
        .map(|(i, j)| (lams[i], lams[j], at[(i, j)].norm_sqr()))
        .filter(|&(_, _, w)| w != 0.0)
        .collect();
    let integrand = |l: f64, _: f64| {
        let s: f64 = pairs.iter().map(|&(x, y, w)| lambda_kernel_over_lambda(l, x, y) * w).sum();
        0.5 * m * (1.0 + l) * (1.0 + l) * s
    };
    let v = measure.integrate(integrand, 0.0, -1.0, cfg)?;
    clamp_nonnegative(v)
}

/// `Var_ρ(A) = tr ρA² - (tr ρA)²`
pub fn variance(rho: &DensityMatrix, a: &Observable) -> Result<f64> {
    check_dims(rho.dim(), a.dim())?;
    let ra = rho.matrix() * a.matrix();
    let mean = linalg::trace(&ra).re;
    let second = linalg::trace(&(ra * a.matrix())).re;
    clamp_nonnegative(second - mean * mean)
}

/// Metric adjusted correlation `tr ρA*B - (m/2) tr A* d(L_ρ, R_ρ) B`.
pub fn correlation(mc: &MCFunction, rho: &DensityMatrix, a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    check_square_dim(a, rho.dim())?;
    check_square_dim(b, rho.dim())?;
    let m = mc.require_regular()?;
    let lams = rho.snapped_eigenvalues();
    let s = rho.spectrum();
    let (at, bt) = (s.to_eigenbasis(a), s.to_eigenbasis(b));
    // tr ρA*B = Σ_i λ_i (Ã*B̃)_ii = Σ_ij λ_j conj(Ã_ij) B̃_ij
    let first = weighted_inner(&s.eigenvalues, &at, &bt, |_, y| y);
    let d_part = weighted_inner(&lams, &at, &bt, |x, y| mc.d_unchecked(x, y, m));
    Ok(first - d_part * (0.5 * m))
}

/// `(ρ₁ ⊗ ρ₂, A₁ ⊗ 1 + 1 ⊗ A₂)`
pub fn aggregate(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    a1: &Observable,
    a2: &Observable,
) -> Result<(DensityMatrix, Observable)> {
    check_dims(rho1.dim(), a1.dim())?;
    check_dims(rho2.dim(), a2.dim())?;
    let rho = DensityMatrix::new(linalg::kron(rho1.matrix(), rho2.matrix()))?;
    let (n1, n2) = (rho1.dim(), rho2.dim());
    let a = linalg::kron(a1.matrix(), &linalg::identity(n2)) + linalg::kron(&linalg::identity(n1), a2.matrix());
    Ok((rho, Observable::new(a)?))
}

/// `e^{itH}`
pub fn unitary_of(h: &Observable, t: f64) -> Result<CMatrix> {
    let s = linalg::spectral(h.matrix())?;
    Ok(s.apply_complex(|l| Complex64::from_polar(1.0, t * l)))
}

/// `ρ_t = e^{itH} ρ e^{-itH}`
pub fn evolve(rho: &DensityMatrix, h: &Observable, t: f64) -> Result<DensityMatrix> {
    check_dims(rho.dim(), h.dim())?;
    let u = unitary_of(h, t)?;
    DensityMatrix::new(&u * rho.matrix() * u.adjoint())
}

/// A completely positive trace preserving map `M ↦ Σ K_i M K_i*`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    /// Validates `Σ K_i* K_i = I` to [`KRAUS_TOL`].
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidKraus("empty Kraus set".into()))?;
        let (m, n) = first.shape();
        if let Some(k) = kraus.iter().find(|k| k.shape() != (m, n)) {
            return Err(Error::InvalidKraus(format!(
                "Kraus operators of shapes {m}x{n} and {}x{}",
                k.nrows(),
                k.ncols()
            )));
        }
        let sum = kraus.iter().fold(CMatrix::zeros(n, n), |acc, k| acc + k.adjoint() * k);
        let dev = linalg::max_abs(&(sum - linalg::identity(n)));
        if dev > KRAUS_TOL {
            return Err(Error::InvalidKraus(format!("Σ K*K deviates from I by {dev:e}")));
        }
        Ok(Self { kraus })
    }

    pub fn identity(n: usize) -> Self {
        Self { kraus: vec![linalg::identity(n)] }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(Error::InvalidKraus("unitary channel needs a square matrix".into()));
        }
        Self::new(vec![u])
    }

    /// Partial trace over the second factor of `C^{d1} ⊗ C^{d2}`, with Kraus
    /// operators `I ⊗ <j|`.
    pub fn partial_trace_second(d1: usize, d2: usize) -> Self {
        let kraus = (0..d2)
            .map(|j| {
                let mut bra = CMatrix::zeros(1, d2);
                bra[(0, j)] = linalg::c(1.0);
                linalg::kron(&linalg::identity(d1), &bra)
            })
            .collect();
        Self { kraus }
    }

    /// Partial trace over the first factor, with Kraus operators `<j| ⊗ I`.
    pub fn partial_trace_first(d1: usize, d2: usize) -> Self {
        let kraus = (0..d1)
            .map(|j| {
                let mut bra = CMatrix::zeros(1, d1);
                bra[(0, j)] = linalg::c(1.0);
                linalg::kron(&bra, &linalg::identity(d2))
            })
            .collect();
        Self { kraus }
    }

    /// Splits a `(k·m) × n` isometry `V` into `k` blocks of `m` rows.
    pub fn from_isometry(v: &CMatrix, output_dim: usize) -> Result<Self> {
        if output_dim == 0 || !v.nrows().is_multiple_of(output_dim) {
            return Err(Error::InvalidKraus(format!(
                "{} rows do not split into blocks of {output_dim}",
                v.nrows()
            )));
        }
        let k = v.nrows() / output_dim;
        let kraus = (0..k).map(|i| v.rows(i * output_dim, output_dim).into_owned()).collect();
        Self::new(kraus)
    }

    pub fn kraus_operators(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        self.kraus[0].ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    /// Maps a state. The output trace is renormalized, which absorbs the
    /// admissible Kraus deviation.
    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = apply_channel(self, rho.matrix())?;
        let tr = linalg::trace(&out).re;
        DensityMatrix::new(out.unscale(tr))
    }
}

/// `T(M) = Σ K_i M K_i*`
pub fn apply_channel(channel: &QuantumChannel, m: &CMatrix) -> Result<CMatrix> {
    check_square_dim(m, channel.input_dim())?;
    let out = channel.output_dim();
    Ok(channel.kraus.iter().fold(CMatrix::zeros(out, out), |acc, k| acc + k * m * k.adjoint()))
}
