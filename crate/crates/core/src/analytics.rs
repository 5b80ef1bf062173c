//! Reductions of per-focal results into yearly tables and conversion matrices.
//!
//! All means are accumulated in 64.64 fixed point from the exact integer
//! ratios, so every table is independent of input order and of how the
//! results were partitioned across threads.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;

use crate::cd::{focal_set, CdConfig};
use crate::error::{Error, Result};
use crate::graph::CitationGraph;
use crate::ingest::{TechAssignment, TechGroup};
use crate::results::ResultRow;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }
}

/// Rows keyed by grant year (and technology group when grouped), with a
/// declared column schema.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl AggregateTable {
    fn new(columns: Vec<String>) -> Self {
        AggregateTable { columns, rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn value(&self, row: usize, column: &str) -> Option<&Cell> {
        self.rows.get(row)?.get(self.column(column)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string())).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("UTF-8 cells")
    }
}

/// Exact sum of rationals in 64.64 fixed point; each term is rounded once.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct FixedSum(i128);

impl FixedSum {
    const ONE: i128 = 1 << 64;

    fn add(&mut self, num: i64, den: u64) {
        let a = i128::from(num) * Self::ONE;
        let d = i128::from(den);
        let half = d / 2;
        self.0 += if a >= 0 { (a + half) / d } else { (a - half) / d };
    }

    fn to_f64(self) -> f64 {
        self.0 as f64 / Self::ONE as f64
    }

    fn ratio(self, weight: FixedSum) -> Option<f64> {
        (weight.0 != 0).then(|| self.0 as f64 / weight.0 as f64)
    }
}

/// Distinct aggregate groups per patent id.
#[derive(Debug, Clone, Default)]
pub struct TechIndex {
    groups: HashMap<String, Vec<TechGroup>>,
}

impl TechIndex {
    pub fn new(assignments: &[TechAssignment]) -> Self {
        let mut groups: HashMap<String, Vec<TechGroup>> = HashMap::new();
        for a in assignments {
            let g = groups.entry(a.patent_id.clone()).or_default();
            if let Err(i) = g.binary_search(&a.aggregate_group) {
                g.insert(i, a.aggregate_group);
            }
        }
        TechIndex { groups }
    }

    pub fn groups(&self, patent_id: &str) -> &[TechGroup] {
        self.groups.get(patent_id).map_or(&[], |v| v.as_slice())
    }
}

/// How a patent assigned to k groups is counted in each of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TechWeighting {
    /// Weight 1 in every group.
    #[default]
    Full,
    /// Weight 1/k in every group.
    Fractional,
}

impl std::str::FromStr for TechWeighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(TechWeighting::Full),
            "fractional" => Ok(TechWeighting::Fractional),
            _ => Err(Error::Config(format!("unknown tech weighting `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Grouping<'a> {
    pub index: &'a TechIndex,
    pub weighting: TechWeighting,
}

type Key = (i32, Option<TechGroup>);

/// Keys a patent contributes to, each with its weight denominator.
fn keys(year: i32, patent_id: &str, grouping: Option<Grouping<'_>>) -> Vec<(Key, u64)> {
    match grouping {
        None => vec![((year, None), 1)],
        Some(g) => {
            let groups = g.index.groups(patent_id);
            let den = match g.weighting {
                TechWeighting::Full => 1,
                TechWeighting::Fractional => groups.len() as u64,
            };
            groups.iter().map(|&grp| ((year, Some(grp)), den)).collect()
        }
    }
}

fn key_columns(grouping: Option<Grouping<'_>>) -> Vec<String> {
    let mut c = vec!["grant_year".to_string()];
    if grouping.is_some() {
        c.push("group".to_string());
    }
    c
}

fn key_cells(key: Key) -> Vec<Cell> {
    let mut c = vec![Cell::Int(i64::from(key.0))];
    if let Some(g) = key.1 {
        c.push(Cell::Text(g.as_str().to_string()));
    }
    c
}

fn opt_float(v: Option<f64>) -> Cell {
    v.map_or(Cell::Empty, Cell::Float)
}

/// Mean of defined CD values per year (× group), with defined/undefined counts.
pub fn yearly_average(rows: &[ResultRow], grouping: Option<Grouping<'_>>) -> AggregateTable {
    #[derive(Default)]
    struct Acc {
        sum: FixedSum,
        weight: FixedSum,
        defined: i64,
        undefined: i64,
    }
    let mut acc: BTreeMap<Key, Acc> = BTreeMap::new();
    for r in rows {
        let Some(year) = r.year() else { continue };
        for (key, den) in keys(year, &r.patent_id, grouping) {
            let a = acc.entry(key).or_default();
            match r.cd_ratio() {
                Some((num, n)) => {
                    a.sum.add(num, n * den);
                    a.weight.add(1, den);
                    a.defined += 1;
                }
                None => a.undefined += 1,
            }
        }
    }
    let mut columns = key_columns(grouping);
    columns.extend(["avg_cd", "defined_count", "undefined_count"].map(String::from));
    let mut t = AggregateTable::new(columns);
    for (key, a) in acc {
        let mut row = key_cells(key);
        row.extend([opt_float(a.sum.ratio(a.weight)), Cell::Int(a.defined), Cell::Int(a.undefined)]);
        t.rows.push(row);
    }
    t
}

/// Backward-citation count categories given by their lower bounds. The first
/// category is exactly `{0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackwardCategories {
    lower_bounds: Vec<u32>,
}

impl Default for BackwardCategories {
    fn default() -> Self {
        BackwardCategories { lower_bounds: vec![0, 1, 6, 11, 21] }
    }
}

impl BackwardCategories {
    pub fn new(lower_bounds: Vec<u32>) -> Result<Self> {
        if lower_bounds.first() != Some(&0) || lower_bounds.get(1).is_some_and(|&b| b != 1) {
            return Err(Error::Config("backward categories must start with {0} (lower bounds 0, 1, ...)".into()));
        }
        if lower_bounds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("backward category bounds must be strictly increasing".into()));
        }
        Ok(BackwardCategories { lower_bounds })
    }

    /// Parses `0,1,6,11,21`.
    pub fn parse(text: &str) -> Result<Self> {
        let bounds = text
            .split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| Error::Config(format!("bad category bound `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(bounds)
    }

    pub fn category(&self, count: u32) -> usize {
        self.lower_bounds.partition_point(|&b| b <= count) - 1
    }

    pub fn labels(&self) -> Vec<String> {
        let b = &self.lower_bounds;
        (0..b.len())
            .map(|i| match b.get(i + 1) {
                None => format!("{}+", b[i]),
                Some(&next) if next == b[i] + 1 => b[i].to_string(),
                Some(&next) => format!("{}-{}", b[i], next - 1),
            })
            .collect()
    }
}

/// Per-year share of focals in each backward-citation category.
pub fn bwd_citation_categories(rows: &[ResultRow], categories: &BackwardCategories) -> AggregateTable {
    let k = categories.lower_bounds.len();
    let mut acc: BTreeMap<i32, Vec<i64>> = BTreeMap::new();
    for r in rows {
        let Some(year) = r.year() else { continue };
        acc.entry(year).or_insert_with(|| vec![0; k])[categories.category(r.backward_count)] += 1;
    }
    let labels = categories.labels();
    let mut columns = vec!["grant_year".to_string(), "total".to_string()];
    columns.extend(labels.iter().map(|l| format!("n_{l}")));
    columns.extend(labels.iter().map(|l| format!("share_{l}")));
    let mut t = AggregateTable::new(columns);
    for (year, counts) in acc {
        let total: i64 = counts.iter().sum();
        let mut row = vec![Cell::Int(i64::from(year)), Cell::Int(total)];
        row.extend(counts.iter().map(|&c| Cell::Int(c)));
        row.extend(counts.iter().map(|&c| Cell::Float(c as f64 / total as f64)));
        t.rows.push(row);
    }
    t
}

/// Breakpoints for binning CD values. The first bin is closed `[b0, b1]`,
/// later bins are half-open `(lo, hi]`. Breakpoints are exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdBins {
    breakpoints: Vec<(i64, i64)>,
    labels: Vec<String>,
}

impl Default for CdBins {
    fn default() -> Self {
        CdBins::parse("-1,0,0.25,0.5,0.75,1").expect("valid default bins")
    }
}

impl CdBins {
    /// Parses decimal breakpoints such as `-1,0,0.25,0.5,0.75,1`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let mut breakpoints = Vec::with_capacity(parts.len());
        for p in &parts {
            let bad = || Error::Config(format!("bad bin breakpoint `{p}`"));
            let (neg, body) = p.strip_prefix('-').map_or((false, *p), |b| (true, b));
            let (int, frac) = body.split_once('.').unwrap_or((body, ""));
            if int.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 9 {
                return Err(bad());
            }
            let den = 10i64.pow(frac.len() as u32);
            let num = int.parse::<i64>().map_err(|_| bad())? * den + if frac.is_empty() { 0 } else { frac.parse::<i64>().map_err(|_| bad())? };
            breakpoints.push((if neg { -num } else { num }, den));
        }
        if breakpoints.len() < 2 {
            return Err(Error::Config("need at least two bin breakpoints".into()));
        }
        if breakpoints.windows(2).any(|w| w[0].0 * w[1].1 >= w[1].0 * w[0].1) {
            return Err(Error::Config("bin breakpoints must be strictly increasing".into()));
        }
        let (first, last) = (breakpoints[0], breakpoints[breakpoints.len() - 1]);
        if first.0 != -first.1 || last.0 != last.1 {
            return Err(Error::Config("bins must span [-1, 1]".into()));
        }
        let labels = parts.windows(2).map(|w| format!("{}, {}", w[0], w[1])).collect();
        Ok(CdBins { breakpoints, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Bin of the value `num / n` (with `n > 0`).
    pub fn bin(&self, num: i64, n: u64) -> usize {
        let n = n as i128;
        let num = num as i128;
        // first upper breakpoint the value does not exceed
        self.breakpoints[1..]
            .iter()
            .position(|&(bn, bd)| num * bd as i128 <= bn as i128 * n)
            .unwrap_or(self.len() - 1)
    }
}

fn is_highly_disruptive(num: i64, n: u64) -> bool {
    // cd > 0.75
    4 * num as i128 > 3 * n as i128
}

/// Count of CD values in (0.75, 1] per year (× group), optionally normalised
/// by each group's count in a base year.
pub fn highly_disruptive_counts(rows: &[ResultRow], grouping: Option<Grouping<'_>>, normalize_base_year: Option<i32>) -> AggregateTable {
    #[derive(Default)]
    struct Acc {
        count: FixedSum,
        undefined: i64,
    }
    let mut acc: BTreeMap<Key, Acc> = BTreeMap::new();
    for r in rows {
        let Some(year) = r.year() else { continue };
        for (key, den) in keys(year, &r.patent_id, grouping) {
            let a = acc.entry(key).or_default();
            match r.cd_ratio() {
                Some((num, n)) if is_highly_disruptive(num, n) => a.count.add(1, den),
                Some(_) => {}
                None => a.undefined += 1,
            }
        }
    }
    let mut columns = key_columns(grouping);
    columns.extend(["count", "undefined_count"].map(String::from));
    if normalize_base_year.is_some() {
        columns.extend(["normalized", "normalization_defined"].map(String::from));
    }
    let base: HashMap<Option<TechGroup>, f64> = match normalize_base_year {
        Some(y) => acc
            .iter()
            .filter(|((year, _), _)| *year == y)
            .map(|((_, g), a)| (*g, a.count.to_f64()))
            .collect(),
        None => HashMap::new(),
    };
    let mut t = AggregateTable::new(columns);
    for (key, a) in &acc {
        let count = a.count.to_f64();
        let mut row = key_cells(*key);
        row.extend([Cell::Float(count), Cell::Int(a.undefined)]);
        if normalize_base_year.is_some() {
            match base.get(&key.1).copied().filter(|&b| b > 0.0) {
                Some(b) => row.extend([Cell::Float(count / b), Cell::Int(1)]),
                None => row.extend([Cell::Empty, Cell::Int(0)]),
            }
        }
        t.rows.push(row);
    }
    t
}

/// Cross-tabulation of the CD bins of the same focals under two methodologies.
#[derive(Debug, Clone, PartialEq)]
pub struct ConversionMatrix {
    pub labels: Vec<String>,
    /// `counts[r][c]`: focals in bin `c` under A and bin `r` under B.
    pub counts: Vec<Vec<u64>>,
    pub undefined_in_either: u64,
    pub missing_in_b: u64,
}

impl ConversionMatrix {
    pub fn column_total(&self, c: usize) -> u64 {
        self.counts.iter().map(|row| row[c]).sum()
    }

    pub fn column_is_empty(&self, c: usize) -> bool {
        self.column_total(c) == 0
    }

    /// Share of focals in A-bin `c` that fall in B-bin `r`; zero for an
    /// empty column.
    pub fn share(&self, r: usize, c: usize) -> f64 {
        let total = self.column_total(c);
        if total == 0 {
            0.0
        } else {
            self.counts[r][c] as f64 / total as f64
        }
    }

    pub fn to_table(&self) -> AggregateTable {
        let k = self.labels.len();
        let mut columns = vec!["bin".to_string()];
        columns.extend(self.labels.iter().cloned());
        let mut t = AggregateTable::new(columns);
        for r in 0..k {
            let mut row = vec![Cell::Text(self.labels[r].clone())];
            row.extend((0..k).map(|c| Cell::Float(self.share(r, c))));
            t.rows.push(row);
        }
        let mut n = vec![Cell::Text("n".into())];
        n.extend((0..k).map(|c| Cell::Int(self.column_total(c) as i64)));
        t.rows.push(n);
        let mut empty = vec![Cell::Text("empty".into())];
        empty.extend((0..k).map(|c| Cell::Int(i64::from(self.column_is_empty(c)))));
        t.rows.push(empty);
        for (label, v) in [("excluded_undefined", self.undefined_in_either), ("missing_in_b", self.missing_in_b)] {
            let mut row = vec![Cell::Text(label.into()), Cell::Int(v as i64)];
            row.extend((1..k).map(|_| Cell::Empty));
            t.rows.push(row);
        }
        t
    }
}

/// Bins focals granted in `year` under methodology A (columns) and B (rows).
pub fn conversion_matrix(a: &[ResultRow], b: &[ResultRow], bins: &CdBins, year: i32) -> ConversionMatrix {
    let by_id: HashMap<&str, &ResultRow> = b.iter().map(|r| (r.patent_id.as_str(), r)).collect();
    let k = bins.len();
    let mut m = ConversionMatrix {
        labels: bins.labels().to_vec(),
        counts: vec![vec![0; k]; k],
        undefined_in_either: 0,
        missing_in_b: 0,
    };
    for ra in a.iter().filter(|r| r.year() == Some(year)) {
        let Some(rb) = by_id.get(ra.patent_id.as_str()) else {
            m.missing_in_b += 1;
            continue;
        };
        match (ra.cd_ratio(), rb.cd_ratio()) {
            (Some((na, da)), Some((nb, db))) => m.counts[bins.bin(nb, db)][bins.bin(na, da)] += 1,
            _ => m.undefined_in_either += 1,
        }
    }
    m
}

/// Mean age in years (grant year of the focal minus the year of each cited
/// document) of the methodology-filtered backward citations, averaged per
/// focal and then over focals per year (× group). Focals without dated
/// backward citations are excluded and counted.
pub fn avg_backward_age(
    graph: &CitationGraph,
    config: &CdConfig,
    years: Option<std::ops::RangeInclusive<i32>>,
    grouping: Option<Grouping<'_>>,
) -> AggregateTable {
    #[derive(Default)]
    struct Acc {
        sum: FixedSum,
        weight: FixedSum,
        focals: i64,
        excluded: i64,
    }
    let view = config.view(graph);
    let mut acc: BTreeMap<Key, Acc> = BTreeMap::new();
    for focal in focal_set(graph, years) {
        let year = graph.date(focal).year().expect("focal set is dated");
        let (mut total, mut k) = (0i64, 0u64);
        for (_, cited_date) in view.backward_dated(focal) {
            if let Some(cy) = cited_date.year() {
                total += i64::from(year - cy);
                k += 1;
            }
        }
        for (key, den) in keys(year, graph.id(focal), grouping) {
            let a = acc.entry(key).or_default();
            if k == 0 {
                a.excluded += 1;
            } else {
                a.sum.add(total, k * den);
                a.weight.add(1, den);
                a.focals += 1;
            }
        }
    }
    let mut columns = key_columns(grouping);
    columns.extend(["avg_age_years", "focal_count", "excluded_no_backward"].map(String::from));
    let mut t = AggregateTable::new(columns);
    for (key, a) in acc {
        let mut row = key_cells(key);
        row.extend([opt_float(a.sum.ratio(a.weight)), Cell::Int(a.focals), Cell::Int(a.excluded)]);
        t.rows.push(row);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cd::Methodology;
    use crate::date::Day;
    use crate::graph::build_graph;
    use crate::ingest::{EdgeOrigin, PatentRecord, ResolvedCitation};

    fn row(id: &str, year: i32, counts: (u32, u32, u32), bwd: u32) -> ResultRow {
        ResultRow {
            patent_id: id.to_string(),
            grant_date: Day::from_ymd(year, 6, 1).unwrap(),
            mode: Methodology::II,
            t: 5,
            n_f: counts.0,
            n_b: counts.1,
            n_r: counts.2,
            backward_count: bwd,
        }
    }

    #[test]
    fn yearly_average_excludes_undefined() {
        let rows = vec![row("a", 1980, (1, 0, 0), 0), row("b", 1980, (0, 1, 0), 0), row("c", 1980, (0, 0, 0), 0), row("d", 1981, (2, 0, 0), 1)];
        let t = yearly_average(&rows, None);
        assert_eq!(t.columns, ["grant_year", "avg_cd", "defined_count", "undefined_count"]);
        assert_eq!(t.rows[0], vec![Cell::Int(1980), Cell::Float(0.0), Cell::Int(2), Cell::Int(1)]);
        assert_eq!(t.rows[1], vec![Cell::Int(1981), Cell::Float(1.0), Cell::Int(1), Cell::Int(0)]);
    }

    #[test]
    fn yearly_average_by_group_and_weighting() {
        let wipo = vec![
            TechAssignment { patent_id: "a".into(), wipo_field_id: 6, aggregate_group: TechGroup::IT },
            TechAssignment { patent_id: "a".into(), wipo_field_id: 13, aggregate_group: TechGroup::Pharma },
            TechAssignment { patent_id: "b".into(), wipo_field_id: 16, aggregate_group: TechGroup::Pharma },
        ];
        let index = TechIndex::new(&wipo);
        let rows = vec![row("a", 1990, (1, 0, 0), 0), row("b", 1990, (0, 1, 0), 0)];
        let full = yearly_average(&rows, Some(Grouping { index: &index, weighting: TechWeighting::Full }));
        let csv = full.to_csv_string();
        assert_eq!(csv, "grant_year,group,avg_cd,defined_count,undefined_count\n1990,IT,1,1,0\n1990,Pharma,0,2,0\n");
        let frac = yearly_average(&rows, Some(Grouping { index: &index, weighting: TechWeighting::Fractional }));
        // Pharma: (1·½ + (−1)·1) / (½ + 1) = −1/3
        let pharma = frac.value(1, "avg_cd").unwrap().as_f64().unwrap();
        assert!((pharma + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn categories() {
        let c = BackwardCategories::default();
        assert_eq!(c.labels(), ["0", "1-5", "6-10", "11-20", "21+"]);
        assert_eq!([0, 1, 5, 6, 10, 11, 20, 21, 500].map(|n| c.category(n)), [0, 1, 1, 2, 2, 3, 3, 4, 4]);
        assert!(BackwardCategories::parse("1,2").is_err());
        assert!(BackwardCategories::parse("0,3").is_err());
        assert!(BackwardCategories::parse("0,1,1").is_err());
        let rows = vec![row("a", 1976, (0, 0, 0), 0), row("b", 1976, (0, 0, 0), 0), row("c", 1977, (0, 0, 0), 7)];
        let t = bwd_citation_categories(&rows, &c);
        assert_eq!(t.value(0, "share_0"), Some(&Cell::Float(1.0)));
        assert_eq!(t.value(1, "share_6-10"), Some(&Cell::Float(1.0)));
        assert_eq!(t.value(1, "total"), Some(&Cell::Int(1)));
    }

    #[test]
    fn bins_edges() {
        let b = CdBins::default();
        assert_eq!(b.labels(), ["-1, 0", "0, 0.25", "0.25, 0.5", "0.5, 0.75", "0.75, 1"]);
        assert_eq!(b.bin(-1, 1), 0);
        assert_eq!(b.bin(0, 5), 0);
        assert_eq!(b.bin(1, 4), 1);
        assert_eq!(b.bin(1, 3), 2);
        assert_eq!(b.bin(3, 4), 3);
        assert_eq!(b.bin(4, 5), 4);
        assert_eq!(b.bin(1, 1), 4);
        assert!(CdBins::parse("0,1").is_err());
        assert!(CdBins::parse("-1,0.5,0.25,1").is_err());
    }

    #[test]
    fn highly_disruptive_open_lower_bound() {
        // 0.8, 0.75, 1.0
        let rows = vec![row("a", 2000, (4, 0, 1), 0), row("b", 2000, (3, 0, 1), 0), row("c", 2000, (1, 0, 0), 0)];
        let t = highly_disruptive_counts(&rows, None, None);
        assert_eq!(t.value(0, "count"), Some(&Cell::Float(2.0)));
    }

    #[test]
    fn normalization_and_zero_base() {
        let rows = vec![row("a", 1980, (1, 0, 0), 0), row("b", 1990, (1, 0, 0), 0), row("c", 1990, (1, 0, 0), 0)];
        let t = highly_disruptive_counts(&rows, None, Some(1980));
        assert_eq!(t.value(0, "normalized"), Some(&Cell::Float(1.0)));
        assert_eq!(t.value(1, "normalized"), Some(&Cell::Float(2.0)));
        let t = highly_disruptive_counts(&rows, None, Some(1985));
        assert_eq!(t.value(0, "normalized"), Some(&Cell::Empty));
        assert_eq!(t.value(0, "normalization_defined"), Some(&Cell::Int(0)));
    }

    #[test]
    fn conversion_identity_and_flags() {
        let rows = vec![row("a", 1980, (1, 0, 0), 0), row("b", 1980, (0, 1, 0), 0), row("c", 1980, (0, 0, 0), 0), row("d", 1980, (1, 0, 3), 0)];
        let m = conversion_matrix(&rows, &rows, &CdBins::default(), 1980);
        for r in 0..5 {
            for c in 0..5 {
                let expect = if r == c && !m.column_is_empty(c) { 1.0 } else { 0.0 };
                assert_eq!(m.share(r, c), expect);
            }
        }
        assert_eq!(m.undefined_in_either, 1);
        assert!(m.column_is_empty(2));
        let csv = m.to_table().to_csv_string();
        assert!(csv.starts_with("bin,\"-1, 0\",\"0, 0.25\",\"0.25, 0.5\",\"0.5, 0.75\",\"0.75, 1\"\n\"-1, 0\",1,0,0,0,0\n"), "{csv}");
    }

    #[test]
    fn backward_age() {
        let d = |s| Day::parse(s).unwrap();
        let patents = vec![
            PatentRecord::utility("F", d("1990-05-01")),
            PatentRecord::utility("X", d("1980-02-02")),
            PatentRecord::utility("Y", d("1986-07-07")),
            PatentRecord::utility("G", d("2008-01-01")),
            PatentRecord::utility("H", d("2006-01-01")),
        ];
        let cites = vec![
            ResolvedCitation { citing_id: "F".into(), cited_id: "X".into(), origin: EdgeOrigin::Grant, cited_date: None },
            ResolvedCitation { citing_id: "F".into(), cited_id: "Y".into(), origin: EdgeOrigin::Grant, cited_date: None },
            ResolvedCitation { citing_id: "G".into(), cited_id: "H".into(), origin: EdgeOrigin::ResolvedApplication, cited_date: Some(d("2002-01-01")) },
        ];
        let (g, _) = build_graph(&patents, &cites, &[]).unwrap();
        let t = avg_backward_age(&g, &CdConfig::new(Methodology::II, 5), Some(1990..=1990), None);
        assert_eq!(t.rows, vec![vec![Cell::Int(1990), Cell::Float(7.0), Cell::Int(1), Cell::Int(0)]]);
        // III dates the rewritten edge by the grant, IV by the application.
        let iii = avg_backward_age(&g, &CdConfig::new(Methodology::III, 5), Some(2008..=2008), None);
        assert_eq!(iii.value(0, "avg_age_years"), Some(&Cell::Float(2.0)));
        let iv = avg_backward_age(&g, &CdConfig::new(Methodology::IV, 5), Some(2008..=2008), None);
        assert_eq!(iv.value(0, "avg_age_years"), Some(&Cell::Float(6.0)));
    }

    #[test]
    fn fixed_sum_rounding_is_symmetric() {
        let mut a = FixedSum::default();
        a.add(1, 3);
        a.add(-1, 3);
        assert_eq!(a.0, 0);
    }
}
