//! q-commutators, q-anti-commutators and the trace functionals that feed
//! every bound.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{check_dim, trace_product, CMatrix, DensityMatrix, HermitianMatrix};

/// The five sign/magnitude cases of q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `0 < q <= 1`
    PositiveLeqOne,
    /// `q > 1`
    PositiveGtOne,
    /// `q = 0`
    Zero,
    /// `-1 <= q < 0`
    NegativeGeqMinusOne,
    /// `q < -1`
    LtMinusOne,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::PositiveLeqOne => "PositiveLeqOne",
            Regime::PositiveGtOne => "PositiveGtOne",
            Regime::Zero => "Zero",
            Regime::NegativeGeqMinusOne => "NegativeGeqMinusOne",
            Regime::LtMinusOne => "LtMinusOne",
        }
    }

    /// True for the `|q| <= 1` branch (boundary `q = +-1` included).
    pub fn is_small(self) -> bool {
        matches!(self, Regime::PositiveLeqOne | Regime::Zero | Regime::NegativeGeqMinusOne)
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A finite real q together with its regime, classified once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParameter {
    q: f64,
    regime: Regime,
}

impl QParameter {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::NonFiniteQ(q));
        }
        let regime = if q == 0.0 {
            Regime::Zero
        } else if q > 0.0 && q <= 1.0 {
            Regime::PositiveLeqOne
        } else if q > 1.0 {
            Regime::PositiveGtOne
        } else if q >= -1.0 {
            Regime::NegativeGeqMinusOne
        } else {
            Regime::LtMinusOne
        };
        Ok(Self { q, regime })
    }

    pub fn value(self) -> f64 {
        self.q
    }

    pub fn abs(self) -> f64 {
        self.q.abs()
    }

    pub fn regime(self) -> Regime {
        self.regime
    }
}

/// `AB - q BA`.
pub fn q_commutator(a: &HermitianMatrix, b: &HermitianMatrix, q: f64) -> Result<CMatrix> {
    check_dim(a.dim(), b.dim())?;
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok(ab - ba * Complex64::new(q, 0.0))
}

/// `AB + q BA`. Bitwise equal to `q_commutator(A, B, -q)`.
pub fn q_anticommutator(a: &HermitianMatrix, b: &HermitianMatrix, q: f64) -> Result<CMatrix> {
    check_dim(a.dim(), b.dim())?;
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok(ab + ba * Complex64::new(q, 0.0))
}

/// `Tr[rho M]`.
pub fn trace_form(rho: &DensityMatrix, m: &CMatrix) -> Result<Complex64> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), bad_row: 0, len: m.ncols() });
    }
    check_dim(rho.dim(), m.nrows())?;
    Ok(trace_product(rho.matrix(), m))
}

/// `Tr[rho (A0 B0 - q B0 A0)]` by direct multiplication.
pub fn q_trace_term(rho: &DensityMatrix, a0: &HermitianMatrix, b0: &HermitianMatrix, q: f64) -> Result<Complex64> {
    check_dim(rho.dim(), a0.dim())?;
    trace_form(rho, &q_commutator(a0, b0, q)?)
}
