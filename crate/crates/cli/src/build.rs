use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use cdgraph::cache;
use cdgraph::ingest::{AppWindowRule, ColumnMap, PatentFilter, ResolveMode, ResolveOptions};
use cdgraph::pipeline::{self, BuildOptions, Source, Sources};
use cdgraph::Day;

use crate::manifest::Manifest;
use crate::{manifest_path, parse_day, require_file, CmdResult, YearRange};

#[derive(Debug, Clone, Copy, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AppWindowArg {
    #[default]
    Loose,
    Strict,
}

#[derive(Args)]
pub struct BuildArgs {
    #[arg(long)]
    patents: PathBuf,
    #[arg(long)]
    citations: PathBuf,
    #[arg(long)]
    app_citations: Option<PathBuf>,
    #[arg(long)]
    app_grants: Option<PathBuf>,
    /// Dates for cited grants absent from the patent table (e.g. pre-1976).
    #[arg(long)]
    exogenous_dates: Option<PathBuf>,
    /// Validated and reported only; pass it to `aggregate` for grouping.
    #[arg(long)]
    wipo: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Override a column name, e.g. `patents.date=grant_date`. Repeatable.
    #[arg(long = "column", value_name = "LOGICAL=HEADER")]
    columns: Vec<String>,
    /// Keep non-utility patents (design, plant, reissue) in the population.
    #[arg(long)]
    all_types: bool,
    /// Keep only patents granted in these years.
    #[arg(long, value_name = "FROM-TO")]
    years: Option<YearRange>,
    /// Applications granted after this date count as ungranted.
    #[arg(long, value_parser = parse_day, default_value = "2021-12-31")]
    resolution_cutoff: Day,
    /// `strict` drops rewritten application citations whose grant year is
    /// after the citing patent's year plus `--t`; `loose` keeps them.
    #[arg(long, value_enum, default_value_t)]
    app_window_rule: AppWindowArg,
    /// Window length used by `--app-window-rule strict`.
    #[arg(long, default_value_t = 5)]
    t: u32,
    /// Write the parse summary JSON here instead of standard error.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Serialize)]
struct BuildConfig<'a> {
    columns: &'a [String],
    utility_only: bool,
    years: Option<YearRange>,
    resolution_cutoff: String,
    app_window_rule: AppWindowArg,
    t: u32,
}

pub fn run(a: BuildArgs) -> CmdResult {
    let start = Instant::now();
    let inputs: Vec<(&str, &str, Option<&PathBuf>)> = vec![
        ("patents", "--patents", Some(&a.patents)),
        ("citations", "--citations", Some(&a.citations)),
        ("app_citations", "--app-citations", a.app_citations.as_ref()),
        ("app_grants", "--app-grants", a.app_grants.as_ref()),
        ("exogenous_dates", "--exogenous-dates", a.exogenous_dates.as_ref()),
        ("wipo", "--wipo", a.wipo.as_ref()),
    ];
    for (_, flag, path) in &inputs {
        if let Some(p) = path {
            require_file(flag, p)?;
        }
    }
    if a.t == 0 {
        return Err(crate::usage("--t must be positive"));
    }
    let mut columns = ColumnMap::default();
    for spec in &a.columns {
        columns.apply_override(spec)?;
    }
    let options = BuildOptions {
        columns,
        filter: PatentFilter {
            utility_only: !a.all_types,
            year_range: a.years.map(YearRange::range),
        },
        resolve: ResolveOptions {
            mode: ResolveMode::IV,
            resolution_cutoff: a.resolution_cutoff,
            window_rule: match a.app_window_rule {
                AppWindowArg::Loose => AppWindowRule::Loose,
                AppWindowArg::Strict => AppWindowRule::Strict,
            },
            window_years: a.t,
        },
    };
    let mut manifest = Manifest::new(
        "build",
        BuildConfig {
            columns: &a.columns,
            utility_only: !a.all_types,
            years: a.years,
            resolution_cutoff: a.resolution_cutoff.to_string(),
            app_window_rule: a.app_window_rule,
            t: a.t,
        },
    )?;
    for (name, _, path) in &inputs {
        if let Some(p) = path {
            manifest.input(name, p)?;
        }
    }

    let open = |p: &PathBuf| Source::file(p);
    let sources = Sources {
        patents: open(&a.patents)?,
        citations: open(&a.citations)?,
        app_citations: a.app_citations.as_ref().map(open).transpose()?,
        app_grants: a.app_grants.as_ref().map(open).transpose()?,
        exogenous_dates: a.exogenous_dates.as_ref().map(open).transpose()?,
        wipo: a.wipo.as_ref().map(open).transpose()?,
    };
    let (graph, report) = pipeline::build(sources, &options)?;
    cache::save(&a.out, &graph).with_context(|| format!("writing cache {}", a.out.display()))?;

    let summary = serde_json::to_string_pretty(&report).expect("serialisable") + "\n";
    match &a.summary {
        Some(p) => std::fs::write(p, &summary).with_context(|| format!("writing summary {}", p.display()))?,
        None => eprint!("{summary}"),
    }

    manifest.output("cache", &a.out)?;
    manifest.counts = json!({
        "parse": report.parse.iter().map(|r| json!({
            "source": r.source,
            "rows_read": r.rows_read,
            "rows_kept": r.rows_kept,
            "dropped": r.dropped,
            "row_errors": r.error_count(),
        })).collect::<Vec<_>>(),
        "resolution": report.resolution,
        "graph": report.graph,
    });
    manifest.runtime("wall_time_secs", start.elapsed().as_secs_f64());
    manifest.write(&manifest_path(&a.out, a.manifest.as_ref()))?;
    Ok(())
}
