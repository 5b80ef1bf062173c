//! `cdgraph`: build citation-graph caches, compute CD_t indices and reduce
//! them to the tables behind each figure.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or consistency error.

mod aggregate;
mod build;
mod compute;
mod manifest;
mod synth;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cdgraph", version, about = "CD index engine for patent citation graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse input tables into a binary graph cache.
    Build(build::BuildArgs),
    /// Compute per-focal CD_t results from a cache.
    Compute(compute::ComputeArgs),
    /// Reduce result files into yearly tables or conversion matrices.
    Aggregate(aggregate::AggregateArgs),
    /// Write a seeded synthetic population in the input formats.
    Synth(synth::SynthArgs),
    /// Time the batch computation on a synthetic preset.
    Bench(synth::BenchArgs),
}

/// A failed command, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl From<cdgraph::Error> for Failure {
    fn from(e: cdgraph::Error) -> Self {
        match e {
            cdgraph::Error::Config(msg) => Failure::Usage(msg),
            other => Failure::Runtime(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

/// Fails with a usage error naming `flag` when `path` does not exist.
pub fn require_file(flag: &str, path: &Path) -> CmdResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("{flag}: no such file: {}", path.display())))
    }
}

pub fn threads_or_default(threads: Option<usize>) -> usize {
    threads
        .filter(|&k| k > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// `FROM-TO` or a single year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct YearRange {
    pub from: i32,
    pub to: i32,
}

impl FromStr for YearRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected YEAR or FROM-TO, got `{s}`");
        let (a, b) = s.split_once('-').unwrap_or((s, s));
        let (from, to) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if from > to {
            return Err(format!("empty year range `{s}`"));
        }
        Ok(YearRange { from, to })
    }
}

impl YearRange {
    pub fn range(self) -> std::ops::RangeInclusive<i32> {
        self.from..=self.to
    }
}

pub fn parse_day(s: &str) -> Result<cdgraph::Day, String> {
    cdgraph::Day::parse(s).ok_or_else(|| format!("expected a YYYY-MM-DD date, got `{s}`"))
}

/// `<out>.manifest.json` next to the output unless overridden.
pub fn manifest_path(out: &Path, explicit: Option<&PathBuf>) -> PathBuf {
    explicit.cloned().unwrap_or_else(|| {
        let mut name = out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        out.with_file_name(name)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => build::run(a),
        Command::Compute(a) => compute::run(a),
        Command::Aggregate(a) => aggregate::run(a),
        Command::Synth(a) => synth::run_synth(a),
        Command::Bench(a) => synth::run_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
