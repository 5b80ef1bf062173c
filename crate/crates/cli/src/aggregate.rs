use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use cdgraph::analytics::{
    avg_backward_age, bwd_citation_categories, conversion_matrix, highly_disruptive_counts, yearly_average, AggregateTable,
    BackwardCategories, CdBins, Grouping, TechIndex, TechWeighting,
};
use cdgraph::ingest::{parse_wipo, ColumnMap};
use cdgraph::results::{read_results, ResultRow};
use cdgraph::{cache, Day, Methodology};

use crate::compute;
use crate::manifest::Manifest;
use crate::{manifest_path, parse_day, require_file, usage, CmdResult, YearRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stat {
    /// Mean CD per grant year.
    YearlyAvg,
    /// Share of focals per backward-citation count category.
    BwdCategories,
    /// Count of focals with CD above 0.75.
    HighDisruptive,
    /// Bin-to-bin transitions between two result files for one year.
    ConversionMatrix,
    /// Mean age of backward citations; reads the cache, not results.
    BwdAge,
}

#[derive(Args)]
pub struct AggregateArgs {
    #[arg(long, value_enum)]
    stat: Stat,
    #[arg(long)]
    results: Option<PathBuf>,
    /// Second result file (rows of the conversion matrix).
    #[arg(long)]
    results_b: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// WIPO field assignments used by `--group`.
    #[arg(long)]
    wipo: Option<PathBuf>,
    /// Split every statistic by aggregate technology group.
    #[arg(long)]
    group: bool,
    /// full or fractional.
    #[arg(long, default_value = "full")]
    tech_weighting: TechWeighting,
    /// Divide high-disruptive counts by this year's count.
    #[arg(long)]
    normalize_base: Option<i32>,
    /// Focal grant year of the conversion matrix.
    #[arg(long)]
    year: Option<i32>,
    /// Bin edges for the conversion matrix.
    #[arg(long, default_value = "-1,0,0.25,0.5,0.75,1")]
    bins: String,
    /// Lower bounds of the backward-count categories.
    #[arg(long, default_value = "0,1,6,11,21")]
    categories: String,
    /// Cache for bwd-age.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Methodology for bwd-age.
    #[arg(long)]
    mode: Option<Methodology>,
    /// Truncation date for bwd-age with methodology I.
    #[arg(long, value_parser = parse_day)]
    cutoff: Option<Day>,
    /// Focal grant years for bwd-age.
    #[arg(long, value_name = "FROM-TO")]
    years: Option<YearRange>,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Serialize)]
struct AggregateConfig<'a> {
    stat: Stat,
    grouped: bool,
    tech_weighting: &'static str,
    normalize_base: Option<i32>,
    year: Option<i32>,
    bins: &'a str,
    categories: &'a str,
    mode: Option<&'static str>,
    cutoff: Option<String>,
    years: Option<YearRange>,
}

type Loaded = (Vec<ResultRow>, Option<(Methodology, u32)>);

/// Reads a result file and checks it holds a single (mode, t).
fn load_results(flag: &str, path: &Path) -> CmdResult<Loaded> {
    require_file(flag, path)?;
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let rows = read_results(std::io::BufReader::new(file), &path.display().to_string())?;
    let key = rows.first().map(|r| (r.mode, r.t));
    if let Some((mode, t)) = key {
        if let Some(r) = rows.iter().find(|r| (r.mode, r.t) != (mode, t)) {
            return Err(usage(format!(
                "{flag}: mixes mode {mode} t={t} with mode {} t={} ({})",
                r.mode, r.t, r.patent_id
            )));
        }
    }
    Ok((rows, key))
}

pub fn run(a: AggregateArgs) -> CmdResult {
    let start = Instant::now();
    let weighting_name = match a.tech_weighting {
        TechWeighting::Full => "full",
        TechWeighting::Fractional => "fractional",
    };
    let mut manifest = Manifest::new(
        "aggregate",
        AggregateConfig {
            stat: a.stat,
            grouped: a.group,
            tech_weighting: weighting_name,
            normalize_base: a.normalize_base,
            year: a.year,
            bins: &a.bins,
            categories: &a.categories,
            mode: a.mode.map(Methodology::as_str),
            cutoff: a.cutoff.map(|d| d.to_string()),
            years: a.years,
        },
    )?;

    let index = match (&a.wipo, a.group) {
        (None, true) => return Err(usage("--group needs --wipo")),
        (Some(_), false) => return Err(usage("--wipo is only used with --group")),
        (None, false) => None,
        (Some(p), true) => {
            require_file("--wipo", p)?;
            manifest.input("wipo", p)?;
            let file = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            let (assignments, _) = parse_wipo(std::io::BufReader::new(file), &p.display().to_string(), &ColumnMap::default())?;
            Some(TechIndex::new(&assignments))
        }
    };
    let grouping = index.as_ref().map(|index| Grouping {
        index,
        weighting: a.tech_weighting,
    });

    let table: AggregateTable = if a.stat == Stat::BwdAge {
        let cache_path = a.cache.as_ref().ok_or_else(|| usage("bwd-age needs --cache"))?;
        let mode = a.mode.ok_or_else(|| usage("bwd-age needs --mode"))?;
        require_file("--cache", cache_path)?;
        manifest.input("cache", cache_path)?;
        // t does not enter the backward age
        let config = compute::config(mode, 1, a.cutoff)?;
        let graph = cache::load(cache_path)?;
        avg_backward_age(&graph, &config, a.years.map(YearRange::range), grouping)
    } else {
        let path = a.results.as_ref().ok_or_else(|| usage("--results is required"))?;
        let (rows, key) = load_results("--results", path)?;
        manifest.input("results", path)?;
        match a.stat {
            Stat::YearlyAvg => yearly_average(&rows, grouping),
            Stat::BwdCategories => bwd_citation_categories(&rows, &BackwardCategories::parse(&a.categories)?),
            Stat::HighDisruptive => highly_disruptive_counts(&rows, grouping, a.normalize_base),
            Stat::ConversionMatrix => {
                let path_b = a.results_b.as_ref().ok_or_else(|| usage("conversion-matrix needs --results-b"))?;
                let year = a.year.ok_or_else(|| usage("conversion-matrix needs --year"))?;
                let (rows_b, key_b) = load_results("--results-b", path_b)?;
                manifest.input("results_b", path_b)?;
                if let (Some((_, ta)), Some((_, tb))) = (key, key_b) {
                    if ta != tb {
                        return Err(usage(format!("--results has t={ta} but --results-b has t={tb}")));
                    }
                }
                let bins = CdBins::parse(&a.bins)?;
                conversion_matrix(&rows, &rows_b, &bins, year).to_table()
            }
            Stat::BwdAge => unreachable!(),
        }
    };

    let file = File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    table.write_csv(BufWriter::new(file))?;
    manifest.output("table", &a.out)?;
    manifest.counts = json!({ "rows": table.rows.len() });
    manifest.runtime("wall_time_secs", start.elapsed().as_secs_f64());
    manifest.write(&manifest_path(&a.out, a.manifest.as_ref()))?;
    Ok(())
}
