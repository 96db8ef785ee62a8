//! Refined uncertainty bounds for q-commutators.
//!
//! For a density matrix `rho` with ascending eigenvalues `l_1 <= ... <= l_n`
//! and observables `A`, `B`, the variance product `V_rho(A) V_rho(B)` is
//! bounded below by the squared trace of a q-commutator of the centered
//! observables, weighted by a coefficient built from `l_1`, `l_n` and `|q|`.
//! This crate evaluates that bound and its classical relatives
//! ([`bounds`]), supplies seeded random instances ([`generators`]), runs
//! Monte Carlo verification ([`harness`]) and searches for tight instances
//! ([`search`]).

pub mod algebra;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod generators;
pub mod harness;
pub mod hermitian;
pub mod instance;
pub mod oracle;
pub mod pauli;
pub mod search;

pub use algebra::{q_anticommutator, q_commutator, q_trace_term, trace_form, QParameter, Regime};
pub use bounds::{
    bound_report, kimura_bound, lemma_f, lemma_g, naive_q_bound, refined_coefficient, refined_q_bound, robertson_bound,
    schwarz_intermediate, theorem_bound, BoundReport, Coefficient,
};
pub use error::{Error, Result};
pub use generators::{maximally_mixed, random_density, random_hermitian, SeededRng};
pub use hermitian::{center, eigenbasis_elements, variance, CMatrix, DensityMatrix, HermitianMatrix};
pub use instance::{Instance, InstanceFile};
pub use search::{maximize_tightness, sweep_q, tightness_ratio, SearchResult};
