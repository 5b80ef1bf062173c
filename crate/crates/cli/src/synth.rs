use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::Args;
use serde_json::json;

use cdgraph::pipeline::BuildOptions;
use cdgraph::synth::{generate, SynthParams, FILES};
use cdgraph::{focal_set, Methodology};

use crate::compute::{self, Engine};
use crate::manifest::{peak_rss_kib, Manifest};
use crate::{manifest_path, threads_or_default, CmdResult};

#[derive(Args)]
pub struct SynthArgs {
    /// small, paper-shape or paper-shape-1m.
    #[arg(long, default_value = "paper-shape")]
    preset: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    backward_mean: Option<f64>,
    /// Geometric parameter of citation age in years.
    #[arg(long)]
    age_distribution: Option<f64>,
    /// Share of backward citations to applications for citing years after 2000.
    #[arg(long)]
    app_citation_share: Option<f64>,
    /// Share of cited applications that are never granted.
    #[arg(long)]
    ungranted_app_share: Option<f64>,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "paper-shape-1m")]
    preset: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "II")]
    mode: Methodology,
    #[arg(long, default_value_t = 5)]
    t: u32,
    #[arg(long, value_enum, default_value_t)]
    engine: Engine,
    /// Compute only the first N focals.
    #[arg(long)]
    max_focals: Option<usize>,
    #[arg(long, env = "CDGRAPH_THREADS")]
    threads: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

fn params(a: &SynthArgs) -> CmdResult<SynthParams> {
    let mut p = SynthParams::preset(&a.preset, a.seed)?;
    if let Some(v) = a.backward_mean {
        p.backward_mean = v;
    }
    if let Some(v) = a.age_distribution {
        p.age_distribution = v;
    }
    if let Some(v) = a.app_citation_share {
        p.app_citation_share_post_2000 = v;
    }
    if let Some(v) = a.ungranted_app_share {
        p.ungranted_app_share = v;
    }
    p.validate()?;
    Ok(p)
}

pub fn run_synth(a: SynthArgs) -> CmdResult {
    let start = Instant::now();
    let p = params(&a)?;
    let mut manifest = Manifest::new(
        "synth",
        json!({
            "preset": a.preset,
            "seed": p.seed,
            "backward_mean": p.backward_mean,
            "age_distribution": p.age_distribution,
            "app_citation_share_post_2000": p.app_citation_share_post_2000,
            "ungranted_app_share": p.ungranted_app_share,
        }),
    )?;
    let data = generate(&p)?;
    data.write_dir(&a.out)
        .with_context(|| format!("writing {}", a.out.display()))?;
    for name in FILES {
        manifest.output(name, &a.out.join(name))?;
    }
    manifest.counts = json!({
        "patents": data.patent_count(),
        "citations": data.citation_count(),
    });
    manifest.runtime("wall_time_secs", start.elapsed().as_secs_f64());
    // Kept outside the directory so reruns leave it byte-identical.
    manifest.write(&manifest_path(&a.out, a.manifest.as_ref()))?;
    Ok(())
}

pub fn run_bench(a: BenchArgs) -> CmdResult {
    let threads = threads_or_default(a.threads);
    let config = compute::config(a.mode, a.t, None)?;
    let p = SynthParams::preset(&a.preset, a.seed)?;

    let t0 = Instant::now();
    let data = generate(&p)?;
    let generate_secs = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let (graph, _) = data.build_graph(&BuildOptions::default())?;
    let build_secs = t1.elapsed().as_secs_f64();
    drop(data);

    let mut focals = focal_set(&graph, None);
    if let Some(m) = a.max_focals {
        focals.truncate(m);
    }
    let t2 = Instant::now();
    let results = compute::run_engine(&graph, &config, &focals, a.engine, threads);
    let compute_secs = t2.elapsed().as_secs_f64();
    let defined = results.iter().filter(|r| r.is_defined()).count();

    let mut manifest = Manifest::new(
        "bench",
        json!({
            "preset": a.preset,
            "seed": a.seed,
            "mode": a.mode.as_str(),
            "t": a.t,
            "engine": a.engine,
            "max_focals": a.max_focals,
        }),
    )?;
    manifest.counts = json!({
        "nodes": graph.node_count(),
        "edges": graph.edge_count(),
        "focals": focals.len(),
        "defined": defined,
    });
    manifest.runtime("threads", threads);
    manifest.runtime("generate_secs", generate_secs);
    manifest.runtime("build_secs", build_secs);
    manifest.runtime("compute_secs", compute_secs);
    manifest.runtime("patents_per_sec", focals.len() as f64 / compute_secs.max(1e-9));
    manifest.runtime("peak_rss_kib", peak_rss_kib());
    match &a.manifest {
        Some(path) => manifest.write(path)?,
        None => print!("{}", manifest.to_json()),
    }
    Ok(())
}
