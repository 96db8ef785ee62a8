//! Monte Carlo verification runs and the record formats they emit.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{bound_report, BoundReport};
use crate::error::{Error, Result};
use crate::generators::{random_density, random_hermitian, SeededRng};
use crate::instance::{Instance, InstanceFile};

/// q values always mixed into a run (when they fall inside `[q_lo, q_hi]`).
pub const BOUNDARY_Q: [f64; 3] = [-1.0, 0.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RankPolicy {
    /// Every state has full rank.
    Full,
    /// Even trials full rank, odd trials rank-deficient.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialPlan {
    pub dims: Vec<usize>,
    pub trials_per_dim: usize,
    pub q_lo: f64,
    pub q_hi: f64,
    pub rank_policy: RankPolicy,
    pub seed: u64,
    pub tolerance_rel: f64,
    pub output_format: OutputFormat,
}

impl Default for TrialPlan {
    fn default() -> Self {
        Self {
            dims: vec![2, 3, 4, 8],
            trials_per_dim: 1000,
            q_lo: -3.0,
            q_hi: 3.0,
            rank_policy: RankPolicy::Mixed,
            seed: 0,
            tolerance_rel: 1e-9,
            output_format: OutputFormat::Csv,
        }
    }
}

impl TrialPlan {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.dims.is_empty() {
            return Err("at least one dimension is required".into());
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d < 1) {
            return Err(format!("dimension {d} is not positive"));
        }
        if self.trials_per_dim < 1 {
            return Err("trials per dimension must be at least 1".into());
        }
        if !self.q_lo.is_finite() || !self.q_hi.is_finite() || self.q_lo > self.q_hi {
            return Err(format!("invalid q interval [{}, {}]", self.q_lo, self.q_hi));
        }
        if !self.tolerance_rel.is_finite() || self.tolerance_rel <= 0.0 {
            return Err(format!("tolerance must be positive, got {}", self.tolerance_rel));
        }
        Ok(())
    }

    pub fn total_trials(&self) -> usize {
        self.dims.len() * self.trials_per_dim
    }

    /// The instance and q of trial `index` (counted across all dimensions).
    ///
    /// Within a dimension, trial `t` uses the boundary value
    /// `BOUNDARY_Q[t % 9]` when `t % 9 < 3` and that value lies inside the
    /// interval, and a uniform draw otherwise. Under [`RankPolicy::Mixed`],
    /// odd `t` gets a rank drawn uniformly from `1..n`.
    pub fn trial(&self, index: usize) -> Result<(Instance, f64)> {
        let dim = self.dims[index / self.trials_per_dim];
        let t = index % self.trials_per_dim;
        let mut rng = SeededRng::new(self.seed, index as u64);

        let mut q = rng.uniform(self.q_lo, self.q_hi);
        if t % 9 < 3 {
            let b = BOUNDARY_Q[t % 9];
            if b >= self.q_lo && b <= self.q_hi {
                q = b;
            }
        }
        let rank = match self.rank_policy {
            RankPolicy::Mixed if dim > 1 && t % 2 == 1 => rng.int_inclusive(1, dim - 1),
            _ => dim,
        };
        let rho = random_density(dim, rank, &mut rng)?;
        let a = random_hermitian(dim, &mut rng)?;
        let b = random_hermitian(dim, &mut rng)?;
        Ok((Instance { rho, a, b }, q))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    #[serde(flatten)]
    pub report: BoundReport,
    pub violation: bool,
    /// Serialized instance, attached only to violations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceFile>,
}

fn run_one(plan: &TrialPlan, index: usize) -> Result<TrialRecord> {
    let (inst, q) = plan.trial(index)?;
    let report = bound_report(&inst.rho, &inst.a, &inst.b, q)?;
    let violation = !report.satisfies(plan.tolerance_rel);
    let instance = violation.then(|| inst.to_file(Some(q)));
    Ok(TrialRecord { index, report, violation, instance })
}

/// Runs every trial of the plan on `threads` workers (0 = rayon default).
/// Records come back in trial-index order whatever the worker count.
pub fn run_verify(plan: &TrialPlan, threads: usize) -> Result<Vec<TrialRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::DomainError(format!("cannot build worker pool: {e}")))?;
    pool.install(|| (0..plan.total_trials()).into_par_iter().map(|i| run_one(plan, i)).collect())
}

pub const CSV_HEADER: &str =
    "dim,q,regime,lambda_min,lambda_max,var_a,var_b,product,robertson,naive_q,refined,slack,ratio";

pub fn csv_row(r: &BoundReport) -> String {
    let mut s = String::new();
    write!(
        s,
        "{},{},{},{},{},{},{},{},{},{},{},{},",
        r.dim,
        r.q,
        r.regime,
        r.lambda_min,
        r.lambda_max,
        r.var_a,
        r.var_b,
        r.product,
        r.robertson,
        r.naive_q,
        r.refined,
        r.slack
    )
    .expect("writing to a String");
    if let Some(ratio) = r.ratio {
        write!(s, "{ratio}").expect("writing to a String");
    }
    s
}

/// Header plus one line per report, newline-terminated.
pub fn reports_to_csv<'a>(reports: impl IntoIterator<Item = &'a BoundReport>) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}
