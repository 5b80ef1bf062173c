use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/fig2").join(name)
}

fn cdgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdgraph"))
        .args(args)
        .env_remove("CDGRAPH_THREADS")
        .output()
        .expect("spawn cdgraph")
}

fn ok(args: &[&str]) -> Output {
    let out = cdgraph(args);
    assert!(
        out.status.success(),
        "cdgraph {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build_fig2(dir: &Path, name: &str) -> PathBuf {
    let cache = dir.join(name);
    ok(&[
        "build",
        "--patents",
        s(&fixture("patents.csv")),
        "--citations",
        s(&fixture("citations.csv")),
        "--exogenous-dates",
        s(&fixture("exogenous_dates.csv")),
        "--out",
        s(&cache),
        "--summary",
        s(&dir.join(format!("{name}.summary.json"))),
    ]);
    cache
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn cell<'a>(header: &[String], row: &'a [String], col: &str) -> &'a str {
    &row[header.iter().position(|h| h == col).unwrap_or_else(|| panic!("no column {col}"))]
}

fn manifest(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fig2_through_the_cli() {
    let dir = TempDir::new().unwrap();
    let cache = build_fig2(dir.path(), "g.cdg");
    for (mode, want) in [("I", "1.00000000"), ("II", "-0.500000000")] {
        let out = dir.path().join(format!("{mode}.csv"));
        ok(&["compute", "--cache", s(&cache), "--mode", mode, "--t", "5", "--out", s(&out)]);
        let (h, rows) = read_csv(&out);
        let focal = rows.iter().find(|r| cell(&h, r, "patent_id") == "4181011").unwrap();
        assert_eq!(cell(&h, focal, "cd"), want, "mode {mode}");
    }
}

#[test]
fn missing_input_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = cdgraph(&[
        "build",
        "--patents",
        s(&fixture("patents.csv")),
        "--citations",
        s(&dir.path().join("absent.csv")),
        "--out",
        s(&dir.path().join("g.cdg")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--citations"));
}

#[test]
fn cutoff_outside_methodology_one_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cache = build_fig2(dir.path(), "g.cdg");
    let out = cdgraph(&[
        "compute",
        "--cache",
        s(&cache),
        "--mode",
        "II",
        "--cutoff",
        "1976-01-01",
        "--out",
        s(&dir.path().join("r.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rebuild_gives_identical_digests() {
    let dir = TempDir::new().unwrap();
    let a = build_fig2(dir.path(), "a.cdg");
    let b = build_fig2(dir.path(), "b.cdg");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (ma, mb) = (manifest(&dir.path().join("a.cdg.manifest.json")), manifest(&dir.path().join("b.cdg.manifest.json")));
    assert_eq!(ma["config_digest"], mb["config_digest"]);
    assert_eq!(ma["outputs"]["cache"]["sha256"], mb["outputs"]["cache"]["sha256"]);
    assert_eq!(ma["counts"], mb["counts"]);
}

#[test]
fn synth_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        ok(&["synth", "--preset", "small", "--seed", "1", "--out", s(out)]);
    }
    let list = |d: &Path| {
        let mut names: Vec<_> = std::fs::read_dir(d).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        names
    };
    assert_eq!(list(&a), list(&b));
    assert_eq!(list(&a).len(), 6);
    for name in list(&a) {
        assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

/// Builds and computes mode II on the small preset; returns (dir, results).
fn small_results(dir: &Path) -> PathBuf {
    let data = dir.join("data");
    ok(&["synth", "--preset", "small", "--seed", "3", "--out", s(&data)]);
    let cache = dir.join("g.cdg");
    let f = |n: &str| data.join(n);
    ok(&[
        "build",
        "--patents",
        s(&f("patents.csv")),
        "--citations",
        s(&f("citations.csv")),
        "--app-citations",
        s(&f("app_citations.csv")),
        "--app-grants",
        s(&f("app_grants.csv")),
        "--exogenous-dates",
        s(&f("exogenous_dates.csv")),
        "--wipo",
        s(&f("wipo.csv")),
        "--out",
        s(&cache),
        "--summary",
        s(&dir.join("summary.json")),
    ]);
    let results = dir.join("II.csv");
    ok(&["compute", "--cache", s(&cache), "--mode", "II", "--out", s(&results)]);
    results
}

#[test]
fn aggregates_on_synthetic_data() {
    let dir = TempDir::new().unwrap();
    let results = small_results(dir.path());

    // A against itself is the identity on every non-empty column.
    let cm = dir.path().join("cm.csv");
    ok(&[
        "aggregate",
        "--stat",
        "conversion-matrix",
        "--results",
        s(&results),
        "--results-b",
        s(&results),
        "--year",
        "1995",
        "--out",
        s(&cm),
    ]);
    let (h, rows) = read_csv(&cm);
    let labels = &h[1..];
    let empty = rows.iter().find(|r| r[0] == "empty").unwrap();
    let mut checked = 0;
    for (c, label) in labels.iter().enumerate() {
        if empty[c + 1] == "1" {
            continue;
        }
        for (r, row_label) in labels.iter().enumerate() {
            let want = if r == c { 1.0 } else { 0.0 };
            let got: f64 = rows[r][c + 1].parse().unwrap();
            assert_eq!(got, want, "cell ({row_label}, {label})");
        }
        checked += 1;
    }
    assert!(checked > 0);

    // Normalising by a year makes that year's row all ones.
    let hd = dir.path().join("hd.csv");
    ok(&[
        "aggregate",
        "--stat",
        "high-disruptive",
        "--results",
        s(&results),
        "--wipo",
        s(&dir.path().join("data/wipo.csv")),
        "--group",
        "--normalize-base",
        "1990",
        "--out",
        s(&hd),
    ]);
    let (h, rows) = read_csv(&hd);
    let base: Vec<_> = rows.iter().filter(|r| cell(&h, r, "grant_year") == "1990").collect();
    assert!(!base.is_empty());
    let mut defined = 0;
    for r in base {
        if cell(&h, r, "normalization_defined") == "1" {
            assert_eq!(cell(&h, r, "normalized"), "1");
            defined += 1;
        }
    }
    assert!(defined > 0);

    for stat in ["yearly-avg", "bwd-categories"] {
        ok(&["aggregate", "--stat", stat, "--results", s(&results), "--out", s(&dir.path().join(format!("{stat}.csv")))]);
    }
    ok(&[
        "aggregate",
        "--stat",
        "bwd-age",
        "--cache",
        s(&dir.path().join("g.cdg")),
        "--mode",
        "I",
        "--out",
        s(&dir.path().join("age.csv")),
    ]);
}

#[test]
fn mixed_result_files_are_rejected() {
    let dir = TempDir::new().unwrap();
    let cache = build_fig2(dir.path(), "g.cdg");
    let (r5, r10) = (dir.path().join("t5.csv"), dir.path().join("t10.csv"));
    ok(&["compute", "--cache", s(&cache), "--mode", "II", "--t", "5", "--out", s(&r5)]);
    ok(&["compute", "--cache", s(&cache), "--mode", "II", "--t", "10", "--out", s(&r10)]);
    let out = cdgraph(&[
        "aggregate",
        "--stat",
        "conversion-matrix",
        "--results",
        s(&r5),
        "--results-b",
        s(&r10),
        "--year",
        "1980",
        "--out",
        s(&dir.path().join("cm.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let mixed = dir.path().join("mixed.csv");
    let text5 = std::fs::read_to_string(&r5).unwrap();
    let text10 = std::fs::read_to_string(&r10).unwrap();
    let body10: String = text10.lines().skip(1).map(|l| format!("{l}\n")).collect();
    std::fs::write(&mixed, text5 + &body10).unwrap();
    let out = cdgraph(&["aggregate", "--stat", "yearly-avg", "--results", s(&mixed), "--out", s(&dir.path().join("y.csv"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn naive_bench_runs() {
    let out = ok(&[
        "bench",
        "--preset",
        "small",
        "--engine",
        "naive",
        "--max-focals",
        "1000",
        "--threads",
        "1",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["counts"]["focals"], 1000);
    assert!(report["runtime"]["patents_per_sec"].as_f64().unwrap() > 0.0);
}
