//! Pauli matrices and small constructors used throughout the examples and tests.

use num_complex::Complex64;

use crate::hermitian::HermitianMatrix;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn x() -> HermitianMatrix {
    HermitianMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]).expect("sigma_x is Hermitian")
}

pub fn y() -> HermitianMatrix {
    HermitianMatrix::from_rows(&[vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]])
        .expect("sigma_y is Hermitian")
}

pub fn z() -> HermitianMatrix {
    HermitianMatrix::from_rows(&[vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(-1., 0.)]])
        .expect("sigma_z is Hermitian")
}

/// Row-major grid of a real diagonal matrix.
pub fn diag(values: &[f64]) -> Vec<Vec<Complex64>> {
    let n = values.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { c(values[i], 0.0) } else { c(0.0, 0.0) }).collect()).collect()
}
