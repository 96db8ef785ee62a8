//! Lower bounds on the variance product `V_rho(A) V_rho(B)`.
//!
//! Four bounds are computed for every instance:
//!
//! * Robertson: `|Tr[rho [A,B]]|^2 / 4`
//! * naive q-bound: `|Tr[rho [A0,B0]_|q|]|^2 / (1+|q|)^2`
//! * refined q-bound: the naive trace term reweighted by a coefficient that
//!   depends only on `|q|`, the smallest eigenvalue `lambda_1` and the
//!   largest eigenvalue `lambda_n` of `rho`
//! * the `q = 1` specialization with the uncentered commutator
//!
//! For `|q| <= 1` the refined coefficient is
//! `(l_n + |q| l_1)^2 / ((1+|q|)^2 (l_n - |q| l_1)^2)`; for `|q| > 1` it is
//! `(|q| l_n + l_1)^2 / ((1+|q|)^2 (|q| l_n - l_1)^2)` and the operands of the
//! q-commutator are swapped.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{q_anticommutator, q_commutator, q_trace_term, trace_form, QParameter, Regime};
use crate::error::{Error, Result};
use crate::hermitian::{center, check_dim, eigenbasis_elements, variance, DensityMatrix, HermitianMatrix};

/// Denominator magnitudes below this make the refined coefficient infinite.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-14;
/// Trace terms below this are treated as zero when the coefficient is infinite.
pub const DEGENERATE_TRACE: f64 = 1e-12;
/// `ratio` is reported only when the variance product is at least this.
pub const MIN_PRODUCT: f64 = 1e-14;
/// Relative tolerance for the master inequality.
pub const INEQUALITY_REL_TOL: f64 = 1e-9;

/// Refinement coefficient, or a flag that its denominator vanished.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficient {
    Finite(f64),
    Infinite,
}

impl Coefficient {
    pub fn finite(self) -> Option<f64> {
        match self {
            Coefficient::Finite(c) => Some(c),
            Coefficient::Infinite => None,
        }
    }

    /// `coefficient * |trace|^2`, with the degenerate-denominator rule applied.
    fn weigh(self, trace: Complex64) -> Result<f64> {
        match self {
            Coefficient::Finite(c) => Ok(c * trace.norm_sqr()),
            Coefficient::Infinite if trace.norm() < DEGENERATE_TRACE => Ok(0.0),
            Coefficient::Infinite => Err(Error::DegenerateCoefficient { trace_term: trace.norm() }),
        }
    }
}

fn centered(
    rho: &DensityMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    check_dim(rho.dim(), a.dim())?;
    check_dim(rho.dim(), b.dim())?;
    Ok((center(a, rho)?, center(b, rho)?))
}

/// `|Tr[rho [A,B]]|^2 / 4`.
pub fn robertson_bound(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    check_dim(rho.dim(), a.dim())?;
    let t = trace_form(rho, &q_commutator(a, b, 1.0)?)?;
    Ok(0.25 * t.norm_sqr())
}

/// `|Tr[rho [A0,B0]_|q|]|^2 / (1+|q|)^2`.
pub fn naive_q_bound(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix, q: f64) -> Result<f64> {
    let q = QParameter::new(q)?.abs();
    let (a0, b0) = centered(rho, a, b)?;
    let t = q_trace_term(rho, &a0, &b0, q)?;
    Ok(t.norm_sqr() / ((1.0 + q) * (1.0 + q)))
}

/// The eigenvalue-dependent refinement coefficient for a given q.
pub fn refined_coefficient(q: f64, lambda_min: f64, lambda_max: f64) -> Result<Coefficient> {
    let q = QParameter::new(q)?.abs();
    let valid = lambda_min.is_finite()
        && lambda_max.is_finite()
        && lambda_min >= 0.0
        && lambda_min <= lambda_max
        && lambda_max > 0.0;
    if !valid {
        return Err(Error::InvalidSpectrum { lambda_min, lambda_max });
    }
    let (num, den) = if q <= 1.0 {
        (lambda_max + q * lambda_min, lambda_max - q * lambda_min)
    } else {
        (q * lambda_max + lambda_min, q * lambda_max - lambda_min)
    };
    if den.abs() < DEGENERATE_DENOMINATOR {
        return Ok(Coefficient::Infinite);
    }
    // the eigenvalue ratio is exactly 1 when lambda_min = 0
    let r = num / den;
    Ok(Coefficient::Finite((r * r) / ((1.0 + q) * (1.0 + q))))
}

fn coefficient_for(rho: &DensityMatrix, q: f64) -> Result<Coefficient> {
    refined_coefficient(q, rho.lambda_min(), rho.lambda_max())
}

/// Refined q-bound, dispatched over the five regimes of q:
///
/// | regime        | trace term                 |
/// |---------------|----------------------------|
/// | `0 < q <= 1`  | `Tr[rho [A0,B0]_q]`        |
/// | `q > 1`       | `Tr[rho [B0,A0]_q]`        |
/// | `q = 0`       | `Tr[rho A0 B0]`            |
/// | `-1 <= q < 0` | `Tr[rho {A0,B0}_q]`        |
/// | `q < -1`      | `Tr[rho {B0,A0}_q]`        |
///
/// each multiplied by the coefficient for `|q|` (which is 1 at `q = 0`).
pub fn refined_q_bound(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix, q: f64) -> Result<f64> {
    let param = QParameter::new(q)?;
    let (a0, b0) = centered(rho, a, b)?;
    let q = param.value();
    match param.regime() {
        Regime::PositiveLeqOne => coefficient_for(rho, q)?.weigh(trace_form(rho, &q_commutator(&a0, &b0, q)?)?),
        Regime::PositiveGtOne => coefficient_for(rho, q)?.weigh(trace_form(rho, &q_commutator(&b0, &a0, q)?)?),
        Regime::Zero => Ok(trace_form(rho, &(a0.matrix() * b0.matrix()))?.norm_sqr()),
        Regime::NegativeGeqMinusOne => {
            coefficient_for(rho, q)?.weigh(trace_form(rho, &q_anticommutator(&a0, &b0, q)?)?)
        }
        Regime::LtMinusOne => coefficient_for(rho, q)?.weigh(trace_form(rho, &q_anticommutator(&b0, &a0, q)?)?),
    }
}

/// The same bound written only in terms of `|q|`: the `[A0,B0]_|q|` trace for
/// `|q| <= 1` and the swapped `[B0,A0]_|q|` trace for `|q| > 1`.
pub fn theorem_bound(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix, q: f64) -> Result<f64> {
    let q = QParameter::new(q)?.abs();
    let (a0, b0) = centered(rho, a, b)?;
    let t = if q <= 1.0 { q_trace_term(rho, &a0, &b0, q)? } else { q_trace_term(rho, &b0, &a0, q)? };
    coefficient_for(rho, q)?.weigh(t)
}

/// The `q = 1` refined bound using the uncentered commutator,
/// `(l_n + l_1)^2 / (4 (l_n - l_1)^2) |Tr[rho [A,B]]|^2`.
pub fn kimura_bound(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    check_dim(rho.dim(), a.dim())?;
    check_dim(rho.dim(), b.dim())?;
    let t = trace_form(rho, &q_commutator(a, b, 1.0)?)?;
    coefficient_for(rho, 1.0)?.weigh(t)
}

/// `G(t) = ((t - |q|) / (t + |q|))^2`, defined for `t >= 1`.
pub fn lemma_g(t: f64, q: f64) -> Result<f64> {
    if t.is_nan() || t < 1.0 {
        return Err(Error::DomainError(format!("lemma_g requires t >= 1, got {t}")));
    }
    let q = QParameter::new(q)?.abs();
    let r = (t - q) / (t + q);
    Ok(r * r)
}

/// `F(t) = (1 + |q| t)^2 (t - |q|)^2 - (1 - |q| t)^2 (t + |q|)^2`, defined for `t >= 1`.
pub fn lemma_f(t: f64, q: f64) -> Result<f64> {
    if t.is_nan() || t < 1.0 {
        return Err(Error::DomainError(format!("lemma_f requires t >= 1, got {t}")));
    }
    let q = QParameter::new(q)?.abs();
    let left = (1.0 + q * t) * (t - q);
    let right = (1.0 - q * t) * (t + q);
    Ok(left * left - right * right)
}

/// Both sides of the Cauchy-Schwarz step used for `|q| <= 1`:
///
/// `lhs = |Tr[rho [A0,B0]_|q|]|^2`,
/// `rhs = (sum_ij |l_i - |q| l_j| |a_ij|^2) (sum_ij |l_i - |q| l_j| |b_ji|^2)`
///
/// with `a_ij`, `b_ji` the matrix elements in the eigenbasis of `rho`.
pub fn schwarz_intermediate(
    rho: &DensityMatrix,
    a0: &HermitianMatrix,
    b0: &HermitianMatrix,
    q: f64,
) -> Result<(f64, f64)> {
    let q = QParameter::new(q)?.abs();
    if q > 1.0 {
        return Err(Error::DomainError(format!("schwarz_intermediate requires |q| <= 1, got {q}")));
    }
    check_dim(rho.dim(), a0.dim())?;
    check_dim(rho.dim(), b0.dim())?;
    let lhs = q_trace_term(rho, a0, b0, q)?.norm_sqr();
    let x = eigenbasis_elements(rho, a0)?;
    let y = eigenbasis_elements(rho, b0)?;
    let l = rho.eigenvalues();
    let n = rho.dim();
    let (mut sa, mut sb) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let w = (l[i] - q * l[j]).abs();
            sa += w * x[(i, j)].norm_sqr();
            sb += w * y[(j, i)].norm_sqr();
        }
    }
    Ok((lhs, sa * sb))
}

/// Every bound and intermediate quantity for one `(rho, A, B, q)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub dim: usize,
    pub q: f64,
    pub regime: Regime,
    pub var_a: f64,
    pub var_b: f64,
    pub product: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub robertson: f64,
    pub naive_q: f64,
    pub refined: f64,
    /// Present only at `q = 1`.
    pub kimura: Option<f64>,
    pub slack: f64,
    /// Absent when `product < 1e-14`.
    pub ratio: Option<f64>,
}

impl BoundReport {
    /// Whether `refined <= product` holds at relative tolerance `tol`.
    pub fn satisfies(&self, tol: f64) -> bool {
        self.slack >= -tol * self.product.max(1.0)
    }
}

pub fn bound_report(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix, q: f64) -> Result<BoundReport> {
    let param = QParameter::new(q)?;
    check_dim(rho.dim(), a.dim())?;
    check_dim(rho.dim(), b.dim())?;
    let var_a = variance(rho, a)?;
    let var_b = variance(rho, b)?;
    let product = var_a * var_b;
    let refined = refined_q_bound(rho, a, b, q)?;
    let kimura = if q == 1.0 { Some(kimura_bound(rho, a, b)?) } else { None };
    Ok(BoundReport {
        dim: rho.dim(),
        q,
        regime: param.regime(),
        var_a,
        var_b,
        product,
        lambda_min: rho.lambda_min(),
        lambda_max: rho.lambda_max(),
        robertson: robertson_bound(rho, a, b)?,
        naive_q: naive_q_bound(rho, a, b, q)?,
        refined,
        kimura,
        slack: product - refined,
        ratio: (product >= MIN_PRODUCT).then(|| refined / product),
    })
}
