//! Command-line runner: generate workloads, drive the structures, and
//! verify recorded traces. Exits nonzero on any invariant violation.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use geomis::{generate, run, verify_trace, Pattern, ShapeClass, StructureKind, Workload};

#[derive(Parser)]
#[command(name = "geomis", version, about = "Dynamic approximate independent set benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Feed a generated workload through a structure and write a CSV report.
    Run(RunArgs),
    /// Write a workload's update sequence as JSONL.
    Generate(GenerateArgs),
    /// Re-check every invariant of a recorded trace offline.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct WorkloadArgs {
    /// Shape class: squares, hypercubes:D, or disks.
    #[arg(long)]
    shape: ShapeClass,
    /// Update pattern: insert, churn:P, hashtag, or growshrink.
    #[arg(long)]
    pattern: Pattern,
    /// Target live population.
    #[arg(long)]
    n: usize,
    /// Number of updates (the hashtag pattern fixes its own length).
    #[arg(long, default_value_t = 0)]
    len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl WorkloadArgs {
    fn workload(&self) -> Workload {
        Workload {
            seed: self.seed,
            shape_class: self.shape,
            n_target: self.n,
            length: self.len,
            pattern: self.pattern,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Structure to drive: amortized or deamortized.
    #[arg(long)]
    structure: StructureKind,
    #[command(flatten)]
    workload: WorkloadArgs,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    /// CSV report destination.
    #[arg(long)]
    out: PathBuf,
    /// Also record a JSONL trace of every update and returned set.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Attach exact-oracle ratios while the live set has at most this many
    /// objects (0 disables the oracle).
    #[arg(long, default_value_t = 40)]
    oracle_prefix: usize,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    workload: WorkloadArgs,
    /// JSONL destination, one update per line.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Trace recorded by `run --trace`.
    #[arg(long)]
    trace: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Generate(args) => cmd_generate(args),
        Cmd::Verify(args) => cmd_verify(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let w = args.workload.workload();
    let mut trace_file = match &args.trace {
        Some(path) => Some(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => None,
    };
    let report = run(
        args.structure,
        &w,
        args.eps,
        args.oracle_prefix,
        trace_file.as_mut().map(|f| f as &mut dyn Write),
    )?;
    if let Some(f) = trace_file.as_mut() {
        f.flush()?;
    }

    let out = File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    report.write_csv(BufWriter::new(out))?;

    let s = &report.summary;
    println!(
        "{} on {} {}: {} updates, {} rounds, max |delta| {}",
        report.structure,
        w.shape_class,
        describe_pattern(w.pattern),
        report.updates.len(),
        report.rounds.len(),
        s.max_delta,
    );
    if let Some(r) = s.min_ratio {
        println!("min approximation ratio over the oracle prefix: {r:.4}");
    }
    if let Some(e) = s.fitted_work_exponent {
        println!("fitted work exponent: {e:.3}");
    }
    Ok(())
}

fn describe_pattern(p: Pattern) -> String {
    match p {
        Pattern::InsertOnly => "insert".into(),
        Pattern::Churn(rate) => format!("churn:{rate}"),
        Pattern::AdversarialHashtag => "hashtag".into(),
        Pattern::GrowShrink => "growshrink".into(),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let w = args.workload.workload();
    let updates = generate(&w)?;
    let file = File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let mut out = BufWriter::new(file);
    for u in &updates {
        writeln!(out, "{}", serde_json::to_string(u)?)?;
    }
    out.flush()?;
    println!("wrote {} updates to {}", updates.len(), args.out.display());
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let file = File::open(&args.trace)
        .with_context(|| format!("opening {}", args.trace.display()))?;
    let summary = verify_trace(BufReader::new(file))?;
    println!(
        "trace ok: {} updates, final |I| {}, final |S| {}, max |delta| {}",
        summary.updates, summary.final_i_len, summary.final_s_len, summary.max_delta
    );
    Ok(())
}
