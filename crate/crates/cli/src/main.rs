use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mcplan_cli::{run_experiment, solve, write_csv, ExperimentSpec, Mode, RunOptions};
use mcplan_core::domains::Domain;

#[derive(Parser)]
#[command(name = "mcplan", version, about = "Monte-Carlo planning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simple regret of each planner's recommendation per budget.
    RegretCurve(RunArgs),
    /// Total episode reward per planner and seed.
    Episode(RunArgs),
    /// Relative scores averaged over runs.
    ScoreTable(RunArgs),
    /// Solve a domain exactly and dump its action-value table.
    Solve(SolveArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment spec file.
    #[arg(long)]
    spec: PathBuf,
    /// Overrides the spec's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write a probe-trace log next to the output (or to stderr).
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Domain instance file.
    #[arg(long)]
    spec: PathBuf,
    /// Table destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn open(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(args: RunArgs, mode: Mode) -> Result<()> {
    let spec = ExperimentSpec::load(&args.spec)?;
    if spec.mode != mode {
        bail!("{} is a {:?} spec", args.spec.display(), spec.mode);
    }
    let options = RunOptions {
        seed: args.seed,
        workers: args.workers,
        trace: args.trace,
    };
    let output = run_experiment(&spec, &options)?;
    let mut out = open(args.out.as_deref())?;
    write_csv(&mut out, &output.rows)?;
    out.flush()?;
    if args.trace {
        let mut log: Box<dyn Write> = match &args.out {
            Some(p) => {
                let mut path = p.clone().into_os_string();
                path.push(".trace");
                Box::new(BufWriter::new(File::create(&path)?))
            }
            None => Box::new(io::stderr().lock()),
        };
        for line in &output.trace {
            writeln!(log, "{line}")?;
        }
        log.flush()?;
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::RegretCurve(a) => run(a, Mode::RegretCurve),
        Command::Episode(a) => run(a, Mode::Episode),
        Command::ScoreTable(a) => run(a, Mode::ScoreTable),
        Command::Solve(a) => {
            let domain = Domain::load(&a.spec)?;
            let s = solve(&domain)?;
            eprintln!("V* = {}  uniform-recommendation regret = {}  entries = {}", s.optimal_value, s.uniform_regret, s.entries);
            for (action, q) in &s.q_values {
                eprintln!("  Q*({action}) = {q}");
            }
            let mut out = open(a.out.as_deref())?;
            out.write_all(s.table.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
