//! Independent evaluation routes used to cross-check the production paths in
//! tests. Nothing in the library calls into this module.

use num_complex::Complex64;

use crate::error::Result;
use crate::hermitian::{eigenbasis_elements, expectation, DensityMatrix, HermitianMatrix};

/// `sum_ij (l_i - q l_j) a_ij b_ji`, the eigenbasis expansion of
/// `Tr[rho (A0 B0 - q B0 A0)]`.
pub fn q_trace_term_eigenbasis(
    rho: &DensityMatrix,
    a0: &HermitianMatrix,
    b0: &HermitianMatrix,
    q: f64,
) -> Result<Complex64> {
    let x = eigenbasis_elements(rho, a0)?;
    let y = eigenbasis_elements(rho, b0)?;
    let l = rho.eigenvalues();
    let n = rho.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += x[(i, j)] * y[(j, i)] * (l[i] - q * l[j]);
        }
    }
    Ok(acc)
}

/// `Tr[rho A^2] - Tr[rho A]^2`, without forming the centered observable.
pub fn variance_uncentered(rho: &DensityMatrix, a: &HermitianMatrix) -> Result<f64> {
    let mean = expectation(rho, a)?;
    let sq = HermitianMatrix::from_matrix(a.matrix() * a.matrix())?;
    Ok(expectation(rho, &sq)? - mean * mean)
}

/// `sum_ij l_i |x_ij|^2` for a centered `X`; equals `V_rho(X)`.
pub fn weighted_element_sum(rho: &DensityMatrix, x0: &HermitianMatrix) -> Result<f64> {
    let x = eigenbasis_elements(rho, x0)?;
    let l = rho.eigenvalues();
    let n = rho.dim();
    Ok((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| l[i] * x[(i, j)].norm_sqr()).sum())
}

/// Refined bound recomputed from scratch in the eigenbasis of `rho`,
/// sharing no code with the production dispatch beyond the eigendecomposition.
pub fn refined_bound_eigenbasis(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix, q: f64) -> Result<f64> {
    let qa = q.abs();
    let a0 = shift(a, expectation(rho, a)?);
    let b0 = shift(b, expectation(rho, b)?);
    let (l1, ln) = (rho.lambda_min(), rho.lambda_max());
    let (t, num, den) = if qa <= 1.0 {
        (q_trace_term_eigenbasis(rho, &a0, &b0, qa)?, ln + qa * l1, ln - qa * l1)
    } else {
        (q_trace_term_eigenbasis(rho, &b0, &a0, qa)?, qa * ln + l1, qa * ln - l1)
    };
    if den.abs() < 1e-14 {
        return Ok(0.0);
    }
    Ok(num * num / ((1.0 + qa) * (1.0 + qa) * den * den) * t.norm_sqr())
}

fn shift(a: &HermitianMatrix, mean: f64) -> HermitianMatrix {
    let mut m = a.matrix().clone();
    for i in 0..m.nrows() {
        m[(i, i)] -= Complex64::new(mean, 0.0);
    }
    HermitianMatrix::from_matrix(m).expect("shifted Hermitian matrix stays Hermitian")
}
