//! Hermitian observables, density matrices, and the variance functionals
//! built on them.
//!
//! Both [`HermitianMatrix`] and [`DensityMatrix`] are immutable once
//! constructed. A density matrix carries its spectral decomposition with
//! eigenvalues in ascending order, so `eigenvalues()[0]` is the smallest
//! eigenvalue and `eigenvalues()[n - 1]` the largest.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, used for products that are not Hermitian in general.
pub type CMatrix = DMatrix<Complex64>;

/// Relative hermiticity tolerance (scaled by the largest entry magnitude).
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Eigenvalues in `[-NEGATIVE_EIGEN_TOL, 0)` are clamped to zero.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;
/// Allowed drift of the trace from 1 before renormalization.
pub const TRACE_TOL: f64 = 1e-10;
/// Tolerance on `U^dagger U = I` for supplied eigenvector matrices.
pub const UNITARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    /// Validates a row-major grid and returns the symmetrized matrix.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::NotSquare { rows: 0, bad_row: 0, len: 0 });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { rows: n, bad_row: i, len: row.len() });
            }
        }
        Self::from_matrix(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Validates a dense matrix. Deviations from hermiticity at or below
    /// `1e-10 * max|m_ij|` are removed by replacing `m` with `(m + m^dagger) / 2`.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), bad_row: 0, len: m.ncols() });
        }
        let n = m.nrows();
        let mut max_abs: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let z = m[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                max_abs = max_abs.max(z.norm());
            }
        }
        let mut deviation: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                deviation = deviation.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        let tolerance = HERMITICITY_TOL * max_abs;
        if deviation > tolerance {
            return Err(Error::NotHermitian { deviation, tolerance });
        }
        Ok(Self { m: symmetrize(&m) })
    }

    /// Wraps a matrix that is Hermitian by construction; only symmetrizes.
    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        Self { m: symmetrize(&m) }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: CMatrix::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { m: CMatrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.m[(i, j)]).collect()).collect()
    }
}

impl std::ops::Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.m[idx]
    }
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[(i, j)] = z;
            out[(j, i)] = z.conj();
        }
    }
    out
}

/// Positive semidefinite, unit-trace Hermitian matrix with its ascending
/// spectral decomposition `rho = sum_i lambda_i |phi_i><phi_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    base: HermitianMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl DensityMatrix {
    /// Builds a state from a row-major grid: validates hermiticity,
    /// eigendecomposes, sorts ascending, clamps tiny negative eigenvalues,
    /// and renormalizes the spectrum to unit sum.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        Self::from_hermitian(HermitianMatrix::from_rows(rows)?)
    }

    pub fn from_hermitian(base: HermitianMatrix) -> Result<Self> {
        let trace: f64 = (0..base.dim()).map(|i| base[(i, i)].re).sum();
        let eig = base.matrix().clone().symmetric_eigen();
        let n = base.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);

        if eigenvalues[0] < -NEGATIVE_EIGEN_TOL {
            return Err(Error::NotPositive { eigenvalue: eigenvalues[0] });
        }
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne { trace });
        }
        Ok(Self { base, eigenvalues: normalize_spectrum(eigenvalues)?, eigenvectors })
    }

    /// Assembles `rho = U diag(lambda) U^dagger` from a spectrum and an
    /// eigenvector matrix whose columns are the eigenvectors. The pair is
    /// re-sorted ascending if needed; the spectrum is clamped and
    /// renormalized under the same rules as [`DensityMatrix::from_rows`].
    pub fn from_spectral(eigenvalues: &[f64], eigenvectors: CMatrix) -> Result<Self> {
        let n = eigenvalues.len();
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if eigenvectors.nrows() != n || eigenvectors.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: eigenvectors.nrows() });
        }
        if let Some(&bad) = eigenvalues.iter().find(|l| !l.is_finite()) {
            return Err(Error::NotPositive { eigenvalue: bad });
        }
        let deviation = unitarity_deviation(&eigenvectors);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
        let sorted: Vec<f64> = order.iter().map(|&k| eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| eigenvectors[(i, order[j])]);

        if sorted[0] < -NEGATIVE_EIGEN_TOL {
            return Err(Error::NotPositive { eigenvalue: sorted[0] });
        }
        let trace: f64 = sorted.iter().sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne { trace });
        }
        let spectrum = normalize_spectrum(sorted)?;
        let base = HermitianMatrix::from_matrix_unchecked(reassemble(&spectrum, &vectors));
        Ok(Self { base, eigenvalues: spectrum, eigenvectors: vectors })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.base
    }

    pub fn matrix(&self) -> &CMatrix {
        self.base.matrix()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvectors as columns, in the order of [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `sum_i lambda_i |phi_i><phi_i|`.
    pub fn reconstruct(&self) -> CMatrix {
        reassemble(&self.eigenvalues, &self.eigenvectors)
    }
}

fn normalize_spectrum(mut spectrum: Vec<f64>) -> Result<Vec<f64>> {
    for l in spectrum.iter_mut() {
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    let sum: f64 = spectrum.iter().sum();
    if sum <= 0.0 {
        return Err(Error::TraceNotOne { trace: sum });
    }
    if sum != 1.0 {
        for l in spectrum.iter_mut() {
            *l /= sum;
        }
    }
    Ok(spectrum)
}

fn reassemble(spectrum: &[f64], vectors: &CMatrix) -> CMatrix {
    let n = spectrum.len();
    let scaled = CMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * spectrum[j]);
    scaled * vectors.adjoint()
}

pub(crate) fn unitarity_deviation(u: &CMatrix) -> f64 {
    let n = u.ncols();
    let gram = u.adjoint() * u;
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            dev = dev.max((gram[(i, j)] - target).norm());
        }
    }
    dev
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `Tr[rho M]` for an arbitrary square matrix `M`.
pub(crate) fn trace_product(rho: &CMatrix, m: &CMatrix) -> Complex64 {
    let n = rho.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += rho[(i, k)] * m[(k, i)];
        }
    }
    acc
}

/// Expectation value `Tr[rho A]` (real for Hermitian `A`).
pub fn expectation(rho: &DensityMatrix, a: &HermitianMatrix) -> Result<f64> {
    check_dim(rho.dim(), a.dim())?;
    Ok(trace_product(rho.matrix(), a.matrix()).re)
}

/// Returns `A - Tr[rho A] I`.
pub fn center(a: &HermitianMatrix, rho: &DensityMatrix) -> Result<HermitianMatrix> {
    let mean = expectation(rho, a)?;
    let mut m = a.matrix().clone();
    for i in 0..m.nrows() {
        m[(i, i)] -= Complex64::new(mean, 0.0);
    }
    Ok(HermitianMatrix { m })
}

/// `V_rho(A) = Tr[rho A0^2]` with `A0` the centered observable. Round-off
/// negatives are clamped to zero.
pub fn variance(rho: &DensityMatrix, a: &HermitianMatrix) -> Result<f64> {
    let a0 = center(a, rho)?;
    let sq = a0.matrix() * a0.matrix();
    Ok(trace_product(rho.matrix(), &sq).re.max(0.0))
}

/// Matrix elements `x[i][j] = <phi_i| X |phi_j>` in the eigenbasis of `rho`.
pub fn eigenbasis_elements(rho: &DensityMatrix, x: &HermitianMatrix) -> Result<CMatrix> {
    check_dim(rho.dim(), x.dim())?;
    let u = rho.eigenvectors();
    Ok(u.adjoint() * x.matrix() * u)
}
