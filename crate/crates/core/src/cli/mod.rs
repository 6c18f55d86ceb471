//! Command-line front end. The `rumour` binary forwards its arguments to
//! [`run`]; everything it prints goes through the writers passed in, so the
//! commands can be driven from tests.
//!
//! Data (records, tables, jsonl reports) goes to `out`; seed headers,
//! summaries and human-readable verdicts go to `err`.

mod records;
mod sweep_io;
mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::Rng;

use crate::analysis::{limit_proportion, DEFAULT_TOL};
use crate::dp::terminal_distribution_dp;
use crate::error::{Error, Result};
use crate::harness::{convergence_sweep, run_ensemble, sweep_is_converging, Engine, EnsembleConfig, DEFAULT_DELTA};
use crate::params::ModelParams;

pub use records::{write_records, OutputFormat, RunRecord};
pub use sweep_io::{read_sweep_csv, write_sweep_csv, SWEEP_HEADER};
pub use verify::{run_suite, Suite, SuiteOptions, SuiteOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rumour", version, about = "Maki-Thompson rumour process with a failure budget")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate replicates and emit one record per replicate.
    Simulate(SimulateArgs),
    /// Solve for the limiting proportion of never-informed individuals.
    Limit(LimitArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Write a convergence table over population sizes.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long, default_value_t = 1)]
    pub reps: u64,
    /// Master seed; a fresh one is drawn and printed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "geometric", value_parser = parse_engine)]
    pub engine: Engine,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: OutputFormat,
    /// Write per-step (s, i, t) trajectories as jsonl to this file.
    #[arg(long, value_name = "PATH")]
    pub trajectories: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    /// Also print the exact terminal law (small n only).
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long, default_value_t = 1)]
    pub k: u64,
    /// Print rows for k..=kmax.
    #[arg(long)]
    pub kmax: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    /// Sweep CSV to check instead of simulating (clusters suite).
    #[arg(long, value_name = "PATH")]
    pub from: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1)]
    pub k: u64,
    /// Comma-separated population sizes, e.g. 1e3,1e4,1e5.
    #[arg(long, value_parser = parse_n_list)]
    pub n_list: NList,
    #[arg(long, default_value_t = 200)]
    pub reps: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    /// Output CSV path; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NList(pub Vec<u64>);

fn parse_engine(s: &str) -> std::result::Result<Engine, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `1000,1e4,100000` into population sizes.
pub fn parse_n_list(s: &str) -> std::result::Result<NList, String> {
    let items: Vec<&str> = s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
    if items.is_empty() {
        return Err("population list is empty".into());
    }
    items
        .into_iter()
        .map(|t| {
            if let Ok(v) = t.parse::<u64>() {
                return Ok(v);
            }
            let v: f64 = t.parse().map_err(|_| format!("not a population size: '{t}'"))?;
            if v >= 1.0 && v.fract() == 0.0 && v < 2f64.powi(53) {
                Ok(v as u64)
            } else {
                Err(format!("not a population size: '{t}'"))
            }
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(NList)
}

fn resolve_seed(seed: Option<u64>, err: &mut dyn Write) -> Result<u64> {
    let seed = seed.unwrap_or_else(|| rand::rng().random());
    writeln!(err, "# seed: {seed}")?;
    Ok(seed)
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::StateSpaceTooLarge { .. } | Error::Parse(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(&a, out, err),
        Command::Limit(a) => cmd_limit(&a, out),
        Command::Verify(a) => cmd_verify(&a, out, err),
        Command::Sweep(a) => cmd_sweep(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let params = ModelParams::new(args.n, args.k)?;
    if args.trajectories.is_some() && args.engine == Engine::Geometric {
        return Err(Error::param("the geometric engine has no step trajectory; use exact or walk"));
    }
    if args.oracle {
        let law = terminal_distribution_dp(&params)?;
        writeln!(err, "# exact law of S_T (mass drift {:.3e}):", law.mass_drift)?;
        for (s, m) in law.support.iter().zip(&law.mass) {
            writeln!(err, "#   S_T={s} p={m:.12}")?;
        }
    }
    let seed = resolve_seed(args.seed, err)?;
    let cfg = EnsembleConfig::new(params, args.reps, seed, args.engine)
        .with_trajectories(args.trajectories.is_some())
        .with_delta(args.delta);
    let ens = run_ensemble(&cfg)?;

    let records: Vec<RunRecord> = ens.records.iter().map(|r| RunRecord::new(args.engine, &params, r)).collect();
    write_records(&records, args.format, out)?;

    if let Some(path) = &args.trajectories {
        let mut w = BufWriter::new(File::create(path)?);
        for rec in &ens.records {
            let states: Vec<[u64; 3]> =
                rec.trajectory.iter().flatten().map(|st| [st.s, st.i, st.t]).collect();
            serde_json::to_writer(&mut w, &serde_json::json!({ "replicate_index": rec.index, "states": states }))?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
    }

    let st = &ens.stats;
    let c = st.cluster_counts;
    writeln!(
        err,
        "# summary: engine={} n={} k={} reps={} raw_mean={:.6} stderr={:.6} conditioned_mean={} y_star={:.6}",
        args.engine,
        args.n,
        args.k,
        st.replicates,
        st.mean_fraction,
        st.stderr,
        st.conditioned_mean.map_or("n/a".to_string(), |m| format!("{m:.6}")),
        st.y_star,
    )?;
    writeln!(
        err,
        "# clusters (delta={}): extinction={} takeoff={} elsewhere={}",
        st.delta, c.near_extinction, c.near_takeoff, c.elsewhere
    )?;
    Ok(EXIT_OK)
}

pub fn cmd_limit(args: &LimitArgs, out: &mut dyn Write) -> Result<i32> {
    let kmax = args.kmax.unwrap_or(args.k);
    if args.k == 0 || kmax < args.k {
        return Err(Error::param(format!("need 1 <= k <= kmax, got k={} kmax={kmax}", args.k)));
    }
    writeln!(out, "k,y_star,x_star,exp_neg_k1,ratio,residual")?;
    for k in args.k..=kmax {
        let lp = limit_proportion(k, args.tol)?;
        let asym = lp.asymptotic();
        writeln!(
            out,
            "{},{:.17e},{:.17e},{:.17e},{:.17},{:.3e}",
            k,
            lp.y_star,
            lp.x_star,
            asym,
            lp.y_star / asym,
            lp.residual
        )?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let seed = resolve_seed(args.seed, err)?;
    let suites: Vec<Suite> = if args.suite == Suite::All {
        if args.n.is_some() || args.k.is_some() || args.reps.is_some() {
            writeln!(err, "# note: --n/--k/--reps are ignored with --suite all; each suite uses its defaults")?;
        }
        Suite::EACH.to_vec()
    } else {
        vec![args.suite]
    };
    let mut all_passed = true;
    for suite in suites {
        let opts = if args.suite == Suite::All {
            SuiteOptions { n: None, k: None, reps: None, seed, delta: args.delta, from: None }
        } else {
            SuiteOptions { n: args.n, k: args.k, reps: args.reps, seed, delta: args.delta, from: args.from.clone() }
        };
        let outcome = run_suite(suite, &opts)?;
        writeln!(err, "[{}] {}: {}", if outcome.passed { "PASS" } else { "FAIL" }, outcome.suite, outcome.summary)?;
        serde_json::to_writer(&mut *out, &outcome)?;
        out.write_all(b"\n")?;
        all_passed &= outcome.passed;
    }
    Ok(if all_passed { EXIT_OK } else { EXIT_FAILURE })
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let seed = resolve_seed(args.seed, err)?;
    let rows = convergence_sweep(args.k, &args.n_list.0, args.reps, seed, args.delta)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path)?;
            write_sweep_csv(&rows, file)?;
        }
        None => write_sweep_csv(&rows, &mut *out)?,
    }
    writeln!(
        err,
        "# abs_dev {} within noise",
        if sweep_is_converging(&rows) { "non-increasing" } else { "NOT non-increasing" }
    )?;
    Ok(EXIT_OK)
}
