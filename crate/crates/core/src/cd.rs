//! The CD_t index.
//!
//! For a focal patent with publication date `d` and window end `e`, a node
//! `i` dated in `(d, e]` is a citer when it cites the focal (`f = 1`) or at
//! least one of the focal's backward citations (`b = 1`). With `N` such
//! citers, `CD_t = (1/N) Σ (f_i − 2 f_i b_i)`, which reduces to
//! `(N_F − N_B) / N` where `N_F` counts `f=1,b=0`, `N_B` counts `f=1,b=1`
//! and `N_R` counts `f=0,b=1`. Results are kept as integer counts; the ratio
//! is only turned into a float for output.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::date::Day;
use crate::error::{Error, Result};
use crate::graph::{CitationGraph, EdgeMask, GraphView, NodeId, NodeKind, TruncationFilter};

/// Methodology I: grants only, backward citations truncated before 1976.
/// II: grants only, untruncated. III: grants plus application citations
/// rewritten to their grants. IV: III plus ungranted applications as nodes.
#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Methodology {
    I,
    II,
    III,
    IV,
}

impl Methodology {
    pub const ALL: [Methodology; 4] = [Methodology::I, Methodology::II, Methodology::III, Methodology::IV];

    pub fn mask(self) -> EdgeMask {
        match self {
            Methodology::I | Methodology::II => EdgeMask::GRANT,
            Methodology::III => EdgeMask::GRANT.union(EdgeMask::RESOLVED_APPLICATION),
            Methodology::IV => EdgeMask::ALL,
        }
    }

    pub fn default_truncation(self) -> TruncationFilter {
        match self {
            Methodology::I => TruncationFilter::before(dataset_start()),
            _ => TruncationFilter::NONE,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Methodology::I => "I",
            Methodology::II => "II",
            Methodology::III => "III",
            Methodology::IV => "IV",
        }
    }
}

/// First day covered by the grant tables (1976-01-01).
pub fn dataset_start() -> Day {
    Day::from_ymd(1976, 1, 1).expect("valid date")
}

impl fmt::Display for Methodology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Methodology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Methodology::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown methodology `{s}` (expected I, II, III or IV)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowRule {
    /// Citer's grant year ≤ focal grant year + t.
    #[default]
    CalendarYear,
    /// Citer dated no later than the focal date shifted by t years.
    DayExact,
}

impl WindowRule {
    pub fn as_str(self) -> &'static str {
        match self {
            WindowRule::CalendarYear => "calendar_year",
            WindowRule::DayExact => "day_exact",
        }
    }
}

impl FromStr for WindowRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "calendar_year" => Ok(WindowRule::CalendarYear),
            "day_exact" => Ok(WindowRule::DayExact),
            _ => Err(Error::Config(format!("unknown window rule `{s}`"))),
        }
    }
}

/// Which nodes may count as citers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CiterPopulation {
    #[default]
    All,
    Utility,
}

impl FromStr for CiterPopulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(CiterPopulation::All),
            "utility" => Ok(CiterPopulation::Utility),
            _ => Err(Error::Config(format!("unknown citer population `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CdConfig {
    pub window_years: u32,
    pub truncation: TruncationFilter,
    pub methodology: Methodology,
    pub window_rule: WindowRule,
    pub citer_population: CiterPopulation,
}

impl CdConfig {
    pub fn new(methodology: Methodology, window_years: u32) -> Self {
        CdConfig {
            window_years,
            truncation: methodology.default_truncation(),
            methodology,
            window_rule: WindowRule::default(),
            citer_population: CiterPopulation::default(),
        }
    }

    /// Overrides the truncation cutoff (methodology I sensitivity runs).
    pub fn with_cutoff(mut self, cutoff: Day) -> Self {
        self.truncation = TruncationFilter::before(cutoff);
        self
    }

    pub fn with_window_rule(mut self, rule: WindowRule) -> Self {
        self.window_rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_years == 0 {
            return Err(Error::Config("window length t must be a positive number of years".into()));
        }
        match (self.methodology, self.truncation.cutoff) {
            (Methodology::I, None) => Err(Error::Config("methodology I requires a truncation cutoff".into())),
            (Methodology::I, Some(_)) => Ok(()),
            (m, Some(_)) => Err(Error::Config(format!(
                "methodology {m} uses untruncated backward citations; a cutoff is only valid with methodology I"
            ))),
            (_, None) => Ok(()),
        }
    }

    pub fn view<'g>(&self, graph: &'g CitationGraph) -> GraphView<'g> {
        graph.view(self.methodology.mask(), self.truncation)
    }

    pub(crate) fn admits_citer(&self, kind: NodeKind) -> bool {
        match self.citer_population {
            CiterPopulation::All => true,
            CiterPopulation::Utility => kind == NodeKind::Utility,
        }
    }
}

/// Last day (inclusive) of the citation window of a focal published on `focal`.
pub fn window_end(focal: Day, window_years: u32, rule: WindowRule) -> Day {
    match rule {
        WindowRule::CalendarYear => {
            let year = focal.year().expect("focal must be dated");
            Day::end_of_year(year + window_years as i32)
        }
        WindowRule::DayExact => focal.add_years(window_years).expect("date in range"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CiterClass {
    pub citer: NodeId,
    /// Cites the focal.
    pub f: bool,
    /// Cites at least one of the focal's backward citations.
    pub b: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UndefinedReason {
    UndatedFocal,
    NoCiters,
}

impl UndefinedReason {
    pub fn as_str(self) -> &'static str {
        match self {
            UndefinedReason::UndatedFocal => "undated_focal",
            UndefinedReason::NoCiters => "no_citers",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FocalResult {
    pub focal: NodeId,
    pub n_f: u32,
    pub n_b: u32,
    pub n_r: u32,
    pub backward_count: u32,
    pub focal_dated: bool,
}

impl FocalResult {
    pub fn undated(focal: NodeId) -> Self {
        FocalResult {
            focal,
            n_f: 0,
            n_b: 0,
            n_r: 0,
            backward_count: 0,
            focal_dated: false,
        }
    }

    pub fn n(&self) -> u32 {
        self.n_f + self.n_b + self.n_r
    }

    pub fn is_defined(&self) -> bool {
        self.n() > 0
    }

    /// `(N_F − N_B, N)` when defined.
    pub fn cd_ratio(&self) -> Option<(i64, u64)> {
        self.is_defined()
            .then(|| (i64::from(self.n_f) - i64::from(self.n_b), u64::from(self.n())))
    }

    pub fn cd(&self) -> Option<f64> {
        self.cd_ratio().map(|(num, n)| num as f64 / n as f64)
    }

    pub fn undefined_reason(&self) -> Option<UndefinedReason> {
        if !self.focal_dated {
            Some(UndefinedReason::UndatedFocal)
        } else if !self.is_defined() {
            Some(UndefinedReason::NoCiters)
        } else {
            None
        }
    }
}

const F_BIT: u8 = 1;
const B_BIT: u8 = 2;

/// Reusable per-worker scratch for computing the index of many focals.
///
/// Each focal scans only its own forward list and the forward lists of its
/// backward citations, restricted by binary search to the citer index range
/// of its window (node indices are date ordered). Citers are marked in an
/// epoch-stamped array, so nothing is cleared between focals.
pub struct CdEngine<'g> {
    view: GraphView<'g>,
    config: CdConfig,
    stamp: Vec<u32>,
    bits: Vec<u8>,
    touched: Vec<NodeId>,
    epoch: u32,
}

impl<'g> CdEngine<'g> {
    pub fn new(graph: &'g CitationGraph, config: &CdConfig) -> Self {
        let n = graph.node_count();
        CdEngine {
            view: config.view(graph),
            config: *config,
            stamp: vec![0; n],
            bits: vec![0; n],
            touched: Vec::new(),
            epoch: 0,
        }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.touched.clear();
    }

    #[inline]
    fn mark(&mut self, citer: NodeId, bit: u8) {
        let i = citer as usize;
        if self.stamp[i] != self.epoch {
            self.stamp[i] = self.epoch;
            self.bits[i] = bit;
            self.touched.push(citer);
        } else {
            self.bits[i] |= bit;
        }
    }

    /// Fills `touched`/`bits` for `focal`; returns the focal's backward count,
    /// or `None` when the focal is undated.
    fn scan(&mut self, focal: NodeId) -> Option<u32> {
        let graph = self.view.graph();
        let date = graph.date(focal);
        if !date.is_dated() {
            return None;
        }
        self.next_epoch();
        let end = window_end(date, self.config.window_years, self.config.window_rule);
        let (lo, hi) = (graph.first_after(date), graph.first_after(end));
        let view = self.view;
        for c in view.forward_between(focal, lo, hi) {
            if self.config.admits_citer(graph.kind(c)) {
                self.mark(c, F_BIT);
            }
        }
        let mut backward_count = 0;
        for p in view.backward(focal) {
            backward_count += 1;
            for c in view.forward_between(p, lo, hi) {
                if self.config.admits_citer(graph.kind(c)) {
                    self.mark(c, B_BIT);
                }
            }
        }
        Some(backward_count)
    }

    pub fn compute(&mut self, focal: NodeId) -> FocalResult {
        let Some(backward_count) = self.scan(focal) else {
            return FocalResult::undated(focal);
        };
        let mut r = FocalResult {
            focal,
            n_f: 0,
            n_b: 0,
            n_r: 0,
            backward_count,
            focal_dated: true,
        };
        for &c in &self.touched {
            match self.bits[c as usize] {
                F_BIT => r.n_f += 1,
                B_BIT => r.n_r += 1,
                _ => r.n_b += 1,
            }
        }
        r
    }

    pub fn classify(&mut self, focal: NodeId) -> Result<Vec<CiterClass>, UndefinedReason> {
        self.scan(focal).ok_or(UndefinedReason::UndatedFocal)?;
        let mut out: Vec<CiterClass> = self
            .touched
            .iter()
            .map(|&c| {
                let bits = self.bits[c as usize];
                CiterClass {
                    citer: c,
                    f: bits & F_BIT != 0,
                    b: bits & B_BIT != 0,
                }
            })
            .collect();
        out.sort_unstable_by_key(|c| c.citer);
        Ok(out)
    }
}

/// In-window citers of `focal` with their f/b bits, ordered by node index.
pub fn classify_citers(graph: &CitationGraph, config: &CdConfig, focal: NodeId) -> Result<Vec<CiterClass>, UndefinedReason> {
    CdEngine::new(graph, config).classify(focal)
}

pub fn cd_index(graph: &CitationGraph, config: &CdConfig, focal: NodeId) -> FocalResult {
    CdEngine::new(graph, config).compute(focal)
}

const BATCH_CHUNK: usize = 2048;

/// Computes every focal in `focals`, in order, on `threads` workers. Output is
/// identical for every thread count.
pub fn cd_batch(graph: &CitationGraph, config: &CdConfig, focals: &[NodeId], threads: usize) -> Vec<FocalResult> {
    let threads = threads.max(1).min(focals.len().div_ceil(BATCH_CHUNK).max(1));
    if threads == 1 {
        let mut engine = CdEngine::new(graph, config);
        return focals.iter().map(|&f| engine.compute(f)).collect();
    }
    let chunks: Vec<&[NodeId]> = focals.chunks(BATCH_CHUNK).collect();
    let next = AtomicUsize::new(0);
    let done: Mutex<Vec<(usize, Vec<FocalResult>)>> = Mutex::new(Vec::with_capacity(chunks.len()));
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| {
                let mut engine = CdEngine::new(graph, config);
                let mut local = Vec::new();
                loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(chunk) = chunks.get(i) else { break };
                    local.push((i, chunk.iter().map(|&f| engine.compute(f)).collect::<Vec<_>>()));
                }
                done.lock().expect("worker panicked").extend(local);
            });
        }
    });
    let mut parts = done.into_inner().expect("worker panicked");
    parts.sort_unstable_by_key(|(i, _)| *i);
    parts.into_iter().flat_map(|(_, r)| r).collect()
}

/// Granted utility patents, dated, optionally restricted to grant years, in
/// node (date) order.
pub fn focal_set(graph: &CitationGraph, years: Option<std::ops::RangeInclusive<i32>>) -> Vec<NodeId> {
    graph
        .nodes()
        .filter(|&n| graph.kind(n) == NodeKind::Utility && graph.date(n).is_dated())
        .filter(|&n| match &years {
            None => true,
            Some(r) => graph.date(n).year().is_some_and(|y| r.contains(&y)),
        })
        .collect()
}
