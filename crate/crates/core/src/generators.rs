//! Seeded random observables and states.
//!
//! States are generated spectrum-first: eigenvalues uniform on a simplex
//! (zero-padded when the rank is below the dimension) rotated by a unitary
//! drawn from the QR decomposition of a complex Gaussian matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, DensityMatrix, HermitianMatrix};

/// Counter-based generator addressed by `(seed, stream)`.
///
/// The same pair yields the same sequence on every platform; distinct
/// streams of one seed are independent ChaCha keystreams.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Child generator for work item `index`, independent of this
    /// generator's position in its own sequence.
    pub fn derive(&self, index: u64) -> SeededRng {
        SeededRng::new(splitmix64(self.seed ^ splitmix64(self.stream)), index)
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.inner.gen::<f64>()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        self.inner.gen_range(lo..=hi)
    }

    fn exp1(&mut self) -> f64 {
        self.inner.sample(Exp1)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian_matrix(n: usize, rng: &mut SeededRng) -> CMatrix {
    // row-major draw order, real part before imaginary part
    let mut entries = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        let re = rng.normal();
        let im = rng.normal();
        entries.push(Complex64::new(re, im));
    }
    DMatrix::from_row_slice(n, n, &entries)
}

/// `(M + M^dagger) / 2` with `M` complex Gaussian.
pub fn random_hermitian(n: usize, rng: &mut SeededRng) -> Result<HermitianMatrix> {
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    let m = gaussian_matrix(n, rng);
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(HermitianMatrix::from_matrix_unchecked(h))
}

/// Unitary from the QR decomposition of a complex Gaussian matrix, with the
/// phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary(n: usize, rng: &mut SeededRng) -> Result<CMatrix> {
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    let qr = gaussian_matrix(n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Random state of the given rank with a uniform spectrum on the
/// `(rank - 1)`-simplex.
pub fn random_density(n: usize, rank: usize, rng: &mut SeededRng) -> Result<DensityMatrix> {
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    if rank < 1 || rank > n {
        return Err(Error::InvalidRank { rank, dim: n });
    }
    let mut weights: Vec<f64> = (0..rank).map(|_| rng.exp1()).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let mut spectrum = vec![0.0; n - rank];
    spectrum.extend(weights);
    spectrum.sort_by(f64::total_cmp);
    let u = random_unitary(n, rng)?;
    DensityMatrix::from_spectral(&spectrum, u)
}

/// `I / n`.
pub fn maximally_mixed(n: usize) -> Result<DensityMatrix> {
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    DensityMatrix::from_spectral(&vec![1.0 / n as f64; n], CMatrix::identity(n, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::unitarity_deviation;

    #[test]
    fn hermitian_shapes() {
        let mut rng = SeededRng::new(1, 0);
        let h = random_hermitian(1, &mut rng).unwrap();
        assert_eq!(h.dim(), 1);
        assert_eq!(h[(0, 0)].im, 0.0);
        let h8 = random_hermitian(8, &mut rng).unwrap();
        assert!(HermitianMatrix::from_matrix(h8.matrix().clone()).is_ok());
        assert!(matches!(random_hermitian(0, &mut rng), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn determinism() {
        let a = random_hermitian(2, &mut SeededRng::new(42, 0)).unwrap();
        let b = random_hermitian(2, &mut SeededRng::new(42, 0)).unwrap();
        assert_eq!(a, b);
        let c = random_hermitian(2, &mut SeededRng::new(42, 1)).unwrap();
        assert_ne!(a, c);

        let r1 = random_density(2, 2, &mut SeededRng::new(9, 3)).unwrap();
        let r2 = random_density(2, 2, &mut SeededRng::new(9, 3)).unwrap();
        assert_eq!(r1.eigenvalues(), r2.eigenvalues());
    }

    #[test]
    fn derive_is_position_independent() {
        let mut rng = SeededRng::new(5, 2);
        let before = rng.derive(7).next_u64();
        rng.next_u64();
        assert_eq!(rng.derive(7).next_u64(), before);
        assert_ne!(rng.derive(8).next_u64(), before);
    }

    #[test]
    fn pure_and_faithful_states() {
        let mut rng = SeededRng::new(3, 0);
        let pure = random_density(4, 1, &mut rng).unwrap();
        assert_eq!(&pure.eigenvalues()[..3], &[0.0, 0.0, 0.0]);
        assert!((pure.lambda_max() - 1.0).abs() < 1e-15);
        let full = random_density(4, 4, &mut rng).unwrap();
        assert!(full.lambda_min() > 0.0);
        assert!(matches!(random_density(3, 0, &mut rng), Err(Error::InvalidRank { .. })));
        assert!(matches!(random_density(3, 4, &mut rng), Err(Error::InvalidRank { .. })));
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = SeededRng::new(11, 0);
        for n in 1..=8 {
            let u = random_unitary(n, &mut rng).unwrap();
            assert!(unitarity_deviation(&u) < 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_spectrum() {
        let m = maximally_mixed(3).unwrap();
        assert!(m.eigenvalues().iter().all(|&l| (l - 1.0 / 3.0).abs() < 1e-16));
        assert_eq!(maximally_mixed(1).unwrap().eigenvalues(), &[1.0]);
        let m2 = maximally_mixed(2).unwrap();
        assert_eq!(m2.matrix()[(0, 0)].re, 0.5);
        assert_eq!(m2.matrix()[(0, 1)].norm(), 0.0);
        assert!(maximally_mixed(0).is_err());
    }
}
