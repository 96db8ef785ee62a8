//! `qrefine` command line: `verify`, `sweep` and `search`.
//!
//! Exit status is 0 on success, 1 when a verification run finds violations
//! (or a computation fails), and 2 for invalid arguments or input files.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::generators::SeededRng;
use crate::harness::{reports_to_csv, run_verify, to_json, OutputFormat, RankPolicy, TrialPlan};
use crate::instance::InstanceFile;
use crate::search::{maximize_tightness, sweep_q};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "qrefine", version, about = "Refined q-commutator uncertainty bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the refined bound on random instances.
    Verify(VerifyArgs),
    /// Evaluate all bounds for one instance over a uniform q grid.
    Sweep(SweepArgs),
    /// Search for instances where the refined bound is tight.
    Search(SearchArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,8")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub q_lo: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub q_hi: f64,
    #[arg(long, value_enum, default_value = "mixed")]
    pub rank_policy: RankPolicy,
    /// Relative tolerance of the master inequality.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Where violation_<index>.json files go (default: next to --out, else the working directory).
    #[arg(long)]
    pub replay_dir: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Instance file (JSON).
    pub instance: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub q_lo: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub q_hi: f64,
    #[arg(long)]
    pub steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Matrix dimension.
    #[arg(long = "dim", short = 'n')]
    pub dim: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub q: f64,
    #[arg(long, default_value_t = 5000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Also write the best instance as an instance file.
    #[arg(long)]
    pub save_instance: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Uniform grid with both endpoints; a single step yields `[q_lo]`.
pub fn q_grid(q_lo: f64, q_hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![q_lo],
        _ => {
            let last = steps - 1;
            (0..steps).map(|k| if k == last { q_hi } else { q_lo + (q_hi - q_lo) * k as f64 / last as f64 }).collect()
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn failed(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_VIOLATION, message: message.into() }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| failed(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| failed(format!("cannot write output: {e}"))),
    }
}

fn verify(args: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8, Failure> {
    let plan = TrialPlan {
        dims: args.dims.clone(),
        trials_per_dim: args.trials,
        q_lo: args.q_lo,
        q_hi: args.q_hi,
        rank_policy: args.rank_policy,
        seed: args.seed,
        tolerance_rel: args.tolerance,
        output_format: args.output.format,
    };
    plan.validate().map_err(usage)?;
    let records = run_verify(&plan, args.threads).map_err(|e| failed(e.to_string()))?;

    let text = match plan.output_format {
        OutputFormat::Csv => reports_to_csv(records.iter().map(|r| &r.report)),
        OutputFormat::Json => to_json(&records),
    };
    emit(args.output.out.as_deref(), &text, stdout)?;

    let replay_dir = args
        .replay_dir
        .clone()
        .or_else(|| args.output.out.as_ref().and_then(|p| p.parent()).map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    let mut violations = 0usize;
    for rec in records.iter().filter(|r| r.violation) {
        violations += 1;
        if let Some(inst) = &rec.instance {
            let path = replay_dir.join(format!("violation_{}.json", rec.index));
            std::fs::write(&path, to_json(inst))
                .map_err(|e| failed(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    let _ =
        writeln!(stderr, "{} trials, {} violations at tolerance {:e}", records.len(), violations, plan.tolerance_rel);
    Ok(if violations == 0 { EXIT_OK } else { EXIT_VIOLATION })
}

fn sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<u8, Failure> {
    if args.steps < 1 {
        return Err(usage("--steps must be at least 1"));
    }
    if !args.q_lo.is_finite() || !args.q_hi.is_finite() {
        return Err(usage("q bounds must be finite"));
    }
    let inst = InstanceFile::read(&args.instance)
        .and_then(|f| f.validate())
        .map_err(|e| usage(format!("{}: {e}", args.instance.display())))?;
    let reports = sweep_q(&inst.rho, &inst.a, &inst.b, &q_grid(args.q_lo, args.q_hi, args.steps))
        .map_err(|e| failed(e.to_string()))?;
    let text = match args.output.format {
        OutputFormat::Csv => reports_to_csv(&reports),
        OutputFormat::Json => to_json(&reports),
    };
    emit(args.output.out.as_deref(), &text, stdout)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SearchSummary<'a> {
    dim: usize,
    q: f64,
    budget: usize,
    seed: u64,
    best_ratio: f64,
    evaluations: usize,
    trajectory: &'a [(usize, f64)],
    instance: InstanceFile,
}

fn search(args: &SearchArgs, stdout: &mut dyn Write) -> Result<u8, Failure> {
    if args.dim < 2 {
        return Err(usage("--dim must be at least 2"));
    }
    if args.budget < 1 {
        return Err(usage("--budget must be at least 1"));
    }
    if !args.q.is_finite() {
        return Err(usage("--q must be finite"));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build().map_err(|e| failed(e.to_string()))?;
    let rng = SeededRng::new(args.seed, 0);
    let result =
        pool.install(|| maximize_tightness(args.dim, args.q, args.budget, &rng)).map_err(|e| failed(e.to_string()))?;
    let instance = result.best_instance.to_file(Some(args.q));
    if let Some(path) = &args.save_instance {
        std::fs::write(path, to_json(&instance))
            .map_err(|e| failed(format!("cannot write {}: {e}", path.display())))?;
    }
    let summary = SearchSummary {
        dim: args.dim,
        q: args.q,
        budget: args.budget,
        seed: args.seed,
        best_ratio: result.best_ratio,
        evaluations: result.evaluations,
        trajectory: &result.trajectory,
        instance,
    };
    emit(args.out.as_deref(), &to_json(&summary), stdout)?;
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Verify(a) => verify(a, stdout, stderr),
        Command::Sweep(a) => sweep(a, stdout),
        Command::Search(a) => search(a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        assert_eq!(q_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(q_grid(-2.0, 5.0, 1), vec![-2.0]);
        assert_eq!(*q_grid(-3.0, 0.7, 11).last().unwrap(), 0.7);
        assert!(q_grid(0.0, 1.0, 0).is_empty());
    }
}
