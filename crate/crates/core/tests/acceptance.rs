//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use cdgraph::analytics::{
    avg_backward_age, bwd_citation_categories, conversion_matrix, highly_disruptive_counts, yearly_average,
    BackwardCategories, CdBins, Cell,
};
use cdgraph::graph::build_grant_graph;
use cdgraph::ingest::{CitationRow, ExogenousDate, PatentRecord};
use cdgraph::oracle::cd_naive_batch;
use cdgraph::pipeline::{self, BuildOptions, Source, Sources};
use cdgraph::results::{rows_from_results, write_results};
use cdgraph::synth::{generate, SynthParams};
use cdgraph::*;
use common::{day, random_graph};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut focals_checked = 0usize;
    for seed in 0..1000u64 {
        let g = random_graph(seed, 300, 3000);
        ensure(g.node_count() <= 300 && g.edge_count() <= 3000, || format!("seed {seed}: graph too large"))?;
        let focals: Vec<NodeId> = g.nodes().collect();
        for m in Methodology::ALL {
            for t in [3, 5, 10] {
                let config = CdConfig::new(m, t);
                let fast = cd_batch(&g, &config, &focals, max_threads());
                let naive = cd_naive_batch(&g, &config, &focals);
                if let Some(i) = (0..focals.len()).find(|&i| fast[i] != naive[i]) {
                    return Err(format!("seed {seed}, mode {m}, t={t}, focal {}: {:?} vs {:?}", g.id(focals[i]), fast[i], naive[i]));
                }
                focals_checked += focals.len();
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("1000 graphs, {focals_checked} focal evaluations, {secs:.1} s"))
}

fn fig2_fixture() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/fig2");
    let open = |name: &str| Source::file(&dir.join(name)).map_err(|e| e.to_string());
    let sources = Sources {
        patents: open("patents.csv")?,
        citations: open("citations.csv")?,
        app_citations: None,
        app_grants: None,
        exogenous_dates: Some(open("exogenous_dates.csv")?),
        wipo: None,
    };
    let (g, _) = pipeline::build(sources, &BuildOptions::default()).map_err(|e| e.to_string())?;
    ensure(g.node_count() == 4, || format!("{} nodes", g.node_count()))?;
    let f = g.node("4181011").ok_or("focal missing")?;
    let ii = cd_index(&g, &CdConfig::new(Methodology::II, 5), f);
    let i = cd_index(&g, &CdConfig::new(Methodology::I, 5), f);
    ensure(ii.cd_ratio() == Some((-1, 2)), || format!("mode II gave {:?}", ii.cd_ratio()))?;
    ensure(i.cd_ratio() == Some((1, 1)), || format!("mode I gave {:?}", i.cd_ratio()))?;
    Ok("mode II = -1/2, mode I = 1/1".into())
}

/// Focal `F` (1980) citing a pre-cutoff `P` (1970) and a kept `Q` (1978),
/// plus the given citers (1982), each with its cited ids.
fn witness(focal_cites: &[&str], citers: &[&[&str]]) -> (Option<(i64, u64)>, Option<(i64, u64)>) {
    let mut patents = vec![PatentRecord::utility("F", day("1980-05-06")), PatentRecord::utility("Q", day("1978-02-07"))];
    let mut cites: Vec<CitationRow> = focal_cites.iter().map(|c| CitationRow::grant("F", *c)).collect();
    for (i, cited) in citers.iter().enumerate() {
        let id = format!("C{i}");
        patents.push(PatentRecord::utility(id.clone(), day("1982-09-14")));
        cites.extend(cited.iter().map(|c| CitationRow::grant(id.clone(), *c)));
    }
    let exo = [ExogenousDate { patent_id: "P".into(), date: day("1970-03-17") }];
    let (g, _) = build_grant_graph(&patents, &cites, &exo).expect("witness graph");
    let f = g.node("F").unwrap();
    let tr = cd_index(&g, &CdConfig::new(Methodology::I, 5), f).cd_ratio();
    let full = cd_index(&g, &CdConfig::new(Methodology::II, 5), f).cd_ratio();
    (tr, full)
}

fn cmp(a: (i64, u64), b: (i64, u64)) -> std::cmp::Ordering {
    (i128::from(a.0) * i128::from(b.1)).cmp(&(i128::from(b.0) * i128::from(a.1)))
}

fn truncation_witnesses() -> Outcome {
    use std::cmp::Ordering::*;
    let cases: [(&str, &[&str], &[&[&str]], std::cmp::Ordering, bool); 6] = [
        // (i) nothing truncated
        ("i", &["Q"], &[&["F"], &["Q"], &["F", "Q"]], Equal, false),
        // (ii) P truncated but uncited in the window
        ("ii", &["P", "Q"], &[&["F"], &["Q"]], Equal, false),
        // (iii) P cited in the window only by a non-citer of F
        ("iii", &["P", "Q"], &[&["F"], &["P"]], Greater, true),
        // (iv) P also cited by a citer of F
        ("iv", &["P", "Q"], &[&["F"], &["F"], &["F", "P"], &["P"]], Greater, true),
        // negative summation, downward: N shrinks around a consolidating citer
        ("neg-down", &["P", "Q"], &[&["F", "Q"], &["P"], &["P"]], Less, false),
        // negative summation, upward: a consolidating citer turns disruptive
        ("neg-up", &["P", "Q"], &[&["F", "P"], &["F", "Q"], &["F", "Q"]], Greater, false),
    ];
    let mut out = Vec::new();
    for (name, focal, citers, expect, positive) in cases {
        let (tr, full) = witness(focal, citers);
        let (tr, full) = (tr.ok_or(format!("{name}: truncated undefined"))?, full.ok_or(format!("{name}: undefined"))?);
        ensure(cmp(tr, full) == expect, || format!("case {name}: tr {tr:?} vs non-tr {full:?}, expected {expect:?}"))?;
        if name.starts_with("neg") {
            ensure(tr.0 < 0 || full.0 < 0, || format!("case {name}: summation not negative"))?;
        } else if positive {
            ensure(tr.0 > 0, || format!("case {name}: summation not positive"))?;
        }
        out.push(format!("{name}: {}/{} vs {}/{}", tr.0, tr.1, full.0, full.1));
    }
    Ok(out.join("; "))
}

fn range_and_accounting() -> Outcome {
    let bins = CdBins::default();
    let cats = BackwardCategories::default();
    let (mut results, mut columns, mut rows) = (0usize, 0usize, 0usize);
    let mut graphs: Vec<CitationGraph> = (0..200).map(|s| random_graph(10_000 + s, 300, 3000)).collect();
    graphs.push(generate(&SynthParams::preset("small", 5).unwrap()).unwrap().build_graph(&BuildOptions::default()).unwrap().0);
    for g in &graphs {
        let focals = focal_set(g, None);
        let mut by_mode = Vec::new();
        for m in Methodology::ALL {
            for t in [3, 5, 10] {
                let config = CdConfig::new(m, t);
                let r = cd_batch(g, &config, &focals, 1);
                for x in &r {
                    ensure(x.n() == x.n_f + x.n_b + x.n_r, || "n != n_f + n_b + n_r".into())?;
                    if let Some(cd) = x.cd() {
                        ensure((-1.0..=1.0).contains(&cd), || format!("cd {cd} out of range"))?;
                    }
                }
                results += r.len();
                if t == 5 {
                    by_mode.push(rows_from_results(g, &config, &r));
                }
            }
        }
        let years: std::collections::BTreeSet<i32> = by_mode[0].iter().filter_map(|r| r.year()).collect();
        for &year in &years {
            let mx = conversion_matrix(&by_mode[0], &by_mode[3], &bins, year);
            for c in (0..bins.len()).filter(|&c| !mx.column_is_empty(c)) {
                let s: f64 = (0..bins.len()).map(|r| mx.share(r, c)).sum();
                ensure((s - 1.0).abs() <= 1e-9, || format!("column sums to {s}"))?;
                columns += 1;
            }
        }
        let t = bwd_citation_categories(&by_mode[1], &cats);
        for row in 0..t.rows.len() {
            let s: f64 = cats.labels().iter().map(|l| t.value(row, &format!("share_{l}")).and_then(Cell::as_f64).unwrap()).sum();
            ensure((s - 1.0).abs() <= 1e-9, || format!("share row sums to {s}"))?;
            rows += 1;
        }
    }
    Ok(format!("{results} results, {columns} matrix columns, {rows} share rows"))
}

fn yearly_series(g: &CitationGraph, config: &CdConfig) -> Vec<(i32, f64)> {
    let rows = rows_from_results(g, config, &cd_batch(g, config, &focal_set(g, None), max_threads()));
    let t = yearly_average(&rows, None);
    t.rows
        .iter()
        .filter_map(|r| Some((r[0].as_f64()? as i32, r[1].as_f64()?)))
        .collect()
}

fn fig1_shape() -> Outcome {
    let data = generate(&SynthParams::preset("paper-shape", 2024).unwrap()).map_err(|e| e.to_string())?;
    let (g, _) = data.build_graph(&BuildOptions::default()).map_err(|e| e.to_string())?;
    let i = yearly_series(&g, &CdConfig::new(Methodology::I, 5));
    let ii = yearly_series(&g, &CdConfig::new(Methodology::II, 5));
    let gap = |year: i32| -> Result<f64, String> {
        let a = i.iter().find(|p| p.0 == year).ok_or(format!("no mode I average for {year}"))?.1;
        let b = ii.iter().find(|p| p.0 == year).ok_or(format!("no mode II average for {year}"))?.1;
        Ok(a - b)
    };
    let early: Vec<f64> = (1976..=1980).map(gap).collect::<Result<_, _>>()?;
    ensure(early.iter().all(|&d| d > 0.1), || format!("early gaps {early:?}"))?;
    let late = gap(2001)?;
    ensure(late.abs() < 0.2 * early[0], || format!("gap at year 25 {late} vs initial {}", early[0]))?;
    Ok(format!("gaps 1976-1980 {:.3?}, 2001 {late:.4} ({:.1}% of initial)", early, 100.0 * late / early[0]))
}

fn all_outputs(g: &CitationGraph, threads: usize) -> Vec<u8> {
    let focals = focal_set(g, None);
    let mut out = Vec::new();
    let mut rows = Vec::new();
    for m in Methodology::ALL {
        let config = CdConfig::new(m, 5);
        let r = rows_from_results(g, &config, &cd_batch(g, &config, &focals, threads));
        write_results(&mut out, &r).unwrap();
        out.extend(yearly_average(&r, None).to_csv_string().bytes());
        out.extend(bwd_citation_categories(&r, &BackwardCategories::default()).to_csv_string().bytes());
        out.extend(highly_disruptive_counts(&r, None, Some(1980)).to_csv_string().bytes());
        out.extend(avg_backward_age(g, &config, None, None).to_csv_string().bytes());
        rows.push(r);
    }
    for year in [1980, 2005] {
        out.extend(conversion_matrix(&rows[0], &rows[3], &CdBins::default(), year).to_table().to_csv_string().bytes());
    }
    out
}

fn determinism() -> Outcome {
    let data = generate(&SynthParams::preset("small", 9).unwrap()).map_err(|e| e.to_string())?;
    let mut graphs = vec![data.build_graph(&BuildOptions::default()).map_err(|e| e.to_string())?.0];
    graphs.extend((0..5).map(|s| random_graph(777 + s, 300, 3000)));
    let counts = [1, 4, max_threads()];
    let mut bytes = 0;
    for g in &graphs {
        let reference = all_outputs(g, 1);
        for &k in &counts[1..] {
            ensure(all_outputs(g, k) == reference, || format!("outputs differ with {k} threads"))?;
        }
        bytes += reference.len();
    }
    Ok(format!("threads {counts:?}, {bytes} bytes compared per thread count"))
}

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn performance() -> Outcome {
    let t0 = Instant::now();
    let data = generate(&SynthParams::preset("paper-shape-1m", 1).unwrap()).map_err(|e| e.to_string())?;
    let gen = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let (g, _) = data.build_graph(&BuildOptions::default()).map_err(|e| e.to_string())?;
    drop(data);
    let build = t1.elapsed().as_secs_f64();
    let focals = focal_set(&g, None);
    let t2 = Instant::now();
    let r = cd_batch(&g, &CdConfig::new(Methodology::II, 5), &focals, max_threads());
    let compute = t2.elapsed().as_secs_f64();
    let defined = r.iter().filter(|x| x.is_defined()).count();
    ensure(focals.len() >= 990_000, || format!("only {} patents", focals.len()))?;
    ensure(build + compute < 60.0, || format!("ingest+build {build:.1} s, compute {compute:.1} s"))?;
    let rss = peak_rss_kib();
    if let Some(kib) = rss {
        ensure(kib < 4 * 1024 * 1024, || format!("peak RSS {} MiB", kib / 1024))?;
    }
    Ok(format!(
        "{} patents, {} edges, {} threads; generate {gen:.1} s, ingest+build {build:.1} s, CD_5 mode II {compute:.2} s ({:.0} patents/s, {defined} defined); peak RSS {}",
        focals.len(),
        g.edge_count(),
        max_threads(),
        focals.len() as f64 / compute,
        rss.map_or("n/a".into(), |k| format!("{} MiB", k / 1024)),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("oracle equivalence", oracle_equivalence),
        ("Fig. 2 fixture", fig2_fixture),
        ("truncation witnesses (cases i-iv, negative summation)", truncation_witnesses),
        ("range and accounting invariants", range_and_accounting),
        ("Fig. 1 shape on paper-shape preset", fig1_shape),
        ("determinism across thread counts", determinism),
        ("performance on paper-shape-1m", performance),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} [{secs:.1}s]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} [{secs:.1}s]: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
