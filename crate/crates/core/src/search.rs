//! Tightness exploration: how close can the refined bound get to the
//! variance product?
//!
//! [`maximize_tightness`] runs a multi-start Nelder-Mead search over an
//! unconstrained real parametrization of `(rho, A, B)`:
//!
//! * `n` reals -> spectrum via softmax (always a faithful state),
//! * `n^2` reals -> Hermitian `H`, eigenframe `U = exp(iH)`,
//! * `n^2` reals each for `A` and `B`.
//!
//! Every evaluated instance is also checked against the master inequality;
//! a violation aborts the search with the offending instance attached.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bounds::{bound_report, refined_q_bound, BoundReport, INEQUALITY_REL_TOL, MIN_PRODUCT};
use crate::error::{Error, Result};
use crate::generators::SeededRng;
use crate::hermitian::{variance, CMatrix, DensityMatrix, HermitianMatrix};
use crate::instance::Instance;

/// Restarts stop once every vertex lies within this distance of the best one.
pub const SIMPLEX_DIAMETER_TOL: f64 = 1e-8;
const INITIAL_STEP: f64 = 0.5;

/// `refined / product`, or `None` when the product is below `1e-14`.
pub fn tightness_ratio(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix, q: f64) -> Result<Option<f64>> {
    let product = variance(rho, a)? * variance(rho, b)?;
    let refined = refined_q_bound(rho, a, b, q)?;
    Ok((product >= MIN_PRODUCT).then(|| refined / product))
}

/// One report per grid point, in grid order.
pub fn sweep_q(
    rho: &DensityMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    q_grid: &[f64],
) -> Result<Vec<BoundReport>> {
    if q_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    q_grid.iter().map(|&q| bound_report(rho, a, b, q)).collect()
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best_ratio: f64,
    pub best_instance: Instance,
    pub q: f64,
    pub evaluations: usize,
    /// `(evaluation index, best ratio so far)` at every improvement.
    pub trajectory: Vec<(usize, f64)>,
}

/// Number of reals needed to describe an instance of dimension `n`.
pub fn parameter_count(n: usize) -> usize {
    n + 3 * n * n
}

fn hermitian_from_params(p: &[f64], n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(p[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = Complex64::new(p[k], p[k + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

fn softmax(x: &[f64]) -> Vec<f64> {
    let max = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|v| (v - max).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Maps a parameter vector to an instance.
pub fn decode(params: &[f64], n: usize) -> Result<Instance> {
    if params.len() != parameter_count(n) {
        return Err(Error::DimensionMismatch { expected: parameter_count(n), found: params.len() });
    }
    let nn = n * n;
    let spectrum = softmax(&params[..n]);

    let frame = hermitian_from_params(&params[n..n + nn], n).symmetric_eigen();
    let v = &frame.eigenvectors;
    let phased = CMatrix::from_fn(n, n, |i, j| v[(i, j)] * Complex64::from_polar(1.0, frame.eigenvalues[j]));
    let u = phased * v.adjoint();

    let weighted = CMatrix::from_fn(n, n, |i, j| u[(i, j)] * spectrum[j]);
    let rho = DensityMatrix::from_hermitian(HermitianMatrix::from_matrix_unchecked(weighted * u.adjoint()))?;
    let a = HermitianMatrix::from_matrix_unchecked(hermitian_from_params(&params[n + nn..n + 2 * nn], n));
    let b = HermitianMatrix::from_matrix_unchecked(hermitian_from_params(&params[n + 2 * nn..], n));
    Ok(Instance { rho, a, b })
}

/// Ratio of one instance (0 when the product vanishes), failing on a
/// master-inequality violation.
fn evaluate(inst: &Instance, q: f64) -> Result<f64> {
    let var_a = variance(&inst.rho, &inst.a)?;
    let var_b = variance(&inst.rho, &inst.b)?;
    let product = var_a * var_b;
    let refined = refined_q_bound(&inst.rho, &inst.a, &inst.b, q)?;
    if product - refined < -INEQUALITY_REL_TOL * product.max(1.0) {
        return Err(Error::Violation { refined, product, instance: inst.to_json(Some(q)) });
    }
    Ok(if product >= MIN_PRODUCT { refined / product } else { 0.0 })
}

struct Restart {
    best_ratio: f64,
    best_params: Vec<f64>,
    evaluations: usize,
    trajectory: Vec<(usize, f64)>,
}

struct Objective {
    n: usize,
    q: f64,
    budget: usize,
    evaluations: usize,
    best_ratio: f64,
    best_params: Vec<f64>,
    trajectory: Vec<(usize, f64)>,
}

impl Objective {
    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }

    /// Returns `-ratio` so that the simplex minimizes.
    fn call(&mut self, x: &[f64]) -> Result<f64> {
        let ratio = evaluate(&decode(x, self.n)?, self.q)?;
        self.evaluations += 1;
        if self.trajectory.is_empty() || ratio > self.best_ratio {
            self.best_ratio = ratio;
            self.best_params = x.to_vec();
            self.trajectory.push((self.evaluations, ratio));
        }
        Ok(-ratio)
    }
}

fn nelder_mead(start: Vec<f64>, n: usize, q: f64, budget: usize) -> Result<Restart> {
    let dim = start.len();
    let d = dim as f64;
    // dimension-adapted coefficients (Gao & Han)
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / d, 0.75 - 1.0 / (2.0 * d), 1.0 - 1.0 / d);

    let mut obj =
        Objective { n, q, budget, evaluations: 0, best_ratio: 0.0, best_params: start.clone(), trajectory: Vec::new() };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = obj.call(&start)?;
    simplex.push((start.clone(), f0));
    for i in 0..dim {
        if obj.exhausted() {
            break;
        }
        let mut x = start.clone();
        x[i] += INITIAL_STEP;
        let f = obj.call(&x)?;
        simplex.push((x, f));
    }

    while !obj.exhausted() && simplex.len() == dim + 1 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if diameter < SIMPLEX_DIAMETER_TOL {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / d;
            }
        }
        let worst = simplex[dim].clone();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = along(alpha);
        let fr = obj.call(&xr)?;
        if fr < simplex[0].1 {
            if obj.exhausted() {
                simplex[dim] = (xr, fr);
                break;
            }
            let xe = along(alpha * gamma);
            let fe = obj.call(&xe)?;
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        if obj.exhausted() {
            break;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(alpha * rho);
            let fc = obj.call(&xc)?;
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = obj.call(&xc)?;
            (xc, fc)
        };
        if fc < fr.min(worst.1) {
            simplex[dim] = (xc, fc);
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if obj.exhausted() {
                break;
            }
            let x: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, v)| b + sigma * (v - b)).collect();
            let f = obj.call(&x)?;
            *vertex = (x, f);
        }
    }

    Ok(Restart {
        best_ratio: obj.best_ratio,
        best_params: obj.best_params,
        evaluations: obj.evaluations,
        trajectory: obj.trajectory,
    })
}

/// Multi-start search for the instance maximizing `refined / product` at a
/// fixed q. The budget is split evenly over `max(4, budget / 2000)` restarts
/// (never more restarts than evaluations); restart `k` draws its starting
/// point from `rng.derive(k)`, so the result does not depend on scheduling.
pub fn maximize_tightness(n: usize, q: f64, budget: usize, rng: &SeededRng) -> Result<SearchResult> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if budget == 0 {
        return Err(Error::BudgetZero);
    }
    if !q.is_finite() {
        return Err(Error::NonFiniteQ(q));
    }
    let restarts = (budget / 2000).max(4).min(budget);
    let shares: Vec<usize> = (0..restarts).map(|k| budget / restarts + usize::from(k < budget % restarts)).collect();
    let outcomes: Vec<Result<Restart>> = shares
        .par_iter()
        .enumerate()
        .map(|(k, &share)| {
            let mut sub = rng.derive(k as u64);
            let start: Vec<f64> = (0..parameter_count(n)).map(|_| sub.normal()).collect();
            nelder_mead(start, n, q, share)
        })
        .collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut evaluations = 0;
    let mut trajectory: Vec<(usize, f64)> = Vec::new();
    for outcome in outcomes {
        let r = outcome?;
        for &(i, ratio) in &r.trajectory {
            if trajectory.last().is_none_or(|&(_, b)| ratio > b) {
                trajectory.push((evaluations + i, ratio));
            }
        }
        if best.as_ref().is_none_or(|(b, _)| r.best_ratio > *b) {
            best = Some((r.best_ratio, r.best_params));
        }
        evaluations += r.evaluations;
    }
    let (best_ratio, params) = best.expect("at least one restart");
    Ok(SearchResult { best_ratio, best_instance: decode(&params, n)?, q, evaluations, trajectory })
}
