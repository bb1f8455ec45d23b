//! Dense complex matrix helpers and the Hermitian spectral decomposition
//! that realizes functions of the commuting pair `(L_ρ, R_ρ)` as entrywise
//! kernels in the eigenbasis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Relative Hermiticity tolerance accepted by [`spectral`].
pub const SPECTRAL_HERMITIAN_TOL: f64 = 1e-10;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub fn pauli_y() -> CMatrix {
    let i = Complex64::i();
    CMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

pub fn diag(values: &[f64]) -> CMatrix {
    let n = values.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = c(v);
    }
    m
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `(m + m*)/2`
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    Ok(m.nrows())
}

/// Eigenvalues (descending) and a unitary basis whose columns are the
/// corresponding eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub basis: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(f(λ)) U*`
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut scaled = self.basis.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            scaled.column_mut(j).scale_mut(w);
        }
        scaled * self.basis.adjoint()
    }

    /// Complex-valued variant of [`apply`](Self::apply).
    pub fn apply_complex(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.basis.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= w;
            }
        }
        scaled * self.basis.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|x| x)
    }

    /// `U* M U`, the matrix of `M` in the eigenbasis.
    pub fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        self.basis.adjoint() * m * &self.basis
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
///
/// The input is symmetrized before factorization; inputs deviating from
/// Hermiticity by more than `1e-10·max(1, max|m_ij|)` are rejected. The
/// result is a pure function of the input bits.
pub fn spectral(m: &CMatrix) -> Result<SpectralDecomposition> {
    let n = ensure_square(m)?;
    let dev = hermitian_deviation(m);
    if dev > SPECTRAL_HERMITIAN_TOL * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    if n == 0 {
        return Ok(SpectralDecomposition { eigenvalues: vec![], basis: CMatrix::zeros(0, 0) });
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut basis = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        basis.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SpectralDecomposition { eigenvalues, basis })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input() {
        let s = spectral(&diag(&[0.3, 0.7])).unwrap();
        assert_eq!(s.eigenvalues, vec![0.7, 0.3]);
        let recon = s.reconstruct();
        assert!((recon - diag(&[0.3, 0.7])).iter().all(|z| z.norm() < 1e-15));
        // columns are (up to phase) the swapped unit vectors
        assert!((s.basis[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((s.basis[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let s = spectral(&pauli_x()).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(0.0), c(1.0)]);
        assert!(matches!(spectral(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn pauli_y_reconstructs() {
        let s = spectral(&pauli_y()).unwrap();
        let r = s.reconstruct();
        assert!((r - pauli_y()).iter().all(|z| z.norm() < 1e-15));
        let u = &s.basis;
        let err = (u.adjoint() * u - identity(2)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-14);
    }

    #[test]
    fn kron_and_commutator() {
        let k = kron(&pauli_z(), &identity(2));
        assert_eq!(k.nrows(), 4);
        assert_eq!(k[(2, 2)], c(-1.0));
        let comm = commutator(&pauli_x(), &pauli_y());
        // [σx, σy] = 2iσz
        let expected = pauli_z() * Complex64::new(0.0, 2.0);
        assert!((comm - expected).iter().all(|z| z.norm() < 1e-15));
    }
}
