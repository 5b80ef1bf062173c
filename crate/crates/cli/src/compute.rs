use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use cdgraph::cd::CiterPopulation;
use cdgraph::oracle::cd_naive_batch;
use cdgraph::results::{rows_from_results, write_results};
use cdgraph::{cache, cd_batch, focal_set, CdConfig, CitationGraph, Day, FocalResult, Methodology, NodeId, WindowRule};

use crate::manifest::Manifest;
use crate::{manifest_path, parse_day, require_file, threads_or_default, CmdResult, YearRange};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Fast,
    /// Set-based reference implementation, single-threaded.
    Naive,
}

#[derive(Args)]
pub struct ComputeArgs {
    #[arg(long)]
    cache: PathBuf,
    /// Methodology: I, II, III or IV.
    #[arg(long)]
    mode: Methodology,
    #[arg(long, default_value_t = 5)]
    t: u32,
    #[arg(long)]
    out: PathBuf,
    /// Backward truncation date for methodology I (default 1976-01-01).
    #[arg(long, value_parser = parse_day)]
    cutoff: Option<Day>,
    /// calendar_year or day_exact.
    #[arg(long, default_value = "calendar_year")]
    window_rule: WindowRule,
    #[arg(long, value_enum, default_value_t)]
    engine: Engine,
    /// all or utility.
    #[arg(long, default_value = "all")]
    citer_population: CiterPopulation,
    /// Focal grant years.
    #[arg(long, value_name = "FROM-TO")]
    years: Option<YearRange>,
    /// Worker threads (default: available parallelism).
    #[arg(long, env = "CDGRAPH_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

pub fn config(mode: Methodology, t: u32, cutoff: Option<Day>) -> CmdResult<CdConfig> {
    let mut config = CdConfig::new(mode, t);
    if let Some(c) = cutoff {
        config = config.with_cutoff(c);
    }
    config.validate()?;
    Ok(config)
}

pub fn run_engine(graph: &CitationGraph, config: &CdConfig, focals: &[NodeId], engine: Engine, threads: usize) -> Vec<FocalResult> {
    match engine {
        Engine::Fast => cd_batch(graph, config, focals, threads),
        Engine::Naive => cd_naive_batch(graph, config, focals),
    }
}

pub fn run(a: ComputeArgs) -> CmdResult {
    let start = Instant::now();
    require_file("--cache", &a.cache)?;
    let mut config = config(a.mode, a.t, a.cutoff)?;
    config = config.with_window_rule(a.window_rule);
    config.citer_population = a.citer_population;
    let threads = threads_or_default(a.threads);

    let mut manifest = Manifest::new(
        "compute",
        json!({
            "mode": a.mode.as_str(),
            "t": a.t,
            "cutoff": config.truncation.cutoff.map(|d| d.to_string()),
            "window_rule": a.window_rule.as_str(),
            "citer_population": match a.citer_population {
                CiterPopulation::All => "all",
                CiterPopulation::Utility => "utility",
            },
            "engine": a.engine,
            "years": a.years,
        }),
    )?;
    manifest.input("cache", &a.cache)?;

    let graph = cache::load(&a.cache)?;
    let focals = focal_set(&graph, a.years.map(YearRange::range));
    let results = run_engine(&graph, &config, &focals, a.engine, threads);
    let rows = rows_from_results(&graph, &config, &results);
    let file = File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_results(BufWriter::new(file), &rows)?;

    let defined = rows.iter().filter(|r| r.is_defined()).count();
    manifest.output("results", &a.out)?;
    manifest.counts = json!({
        "focals": rows.len(),
        "defined": defined,
        "undefined": rows.len() - defined,
    });
    manifest.runtime("threads", threads);
    manifest.runtime("wall_time_secs", start.elapsed().as_secs_f64());
    manifest.write(&manifest_path(&a.out, a.manifest.as_ref()))?;
    Ok(())
}
