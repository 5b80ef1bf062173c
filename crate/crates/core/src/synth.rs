//! Seeded synthetic patent populations in the ingest file formats.
//!
//! Population: utility patents granted on Tuesdays with sequential numbers
//! (the 1976 cohort starts at 3930271), plus an older population of grants
//! that are cited but absent from the patent table, numbered from 2000000
//! and dated through the auxiliary date file.
//!
//! Each patent draws a Poisson number of backward citations. A target is
//! drawn age first: a geometric gap of `k ≥ 1` years, then a uniform document
//! from that year. Patents granted after 2000 send a configured share of
//! citations to published applications instead; those are either pre-grant
//! publications of later-granted patents (with a resolution row) or
//! applications that were never granted.
//!
//! Randomness is split per citing year: the stream for year `y` and purpose
//! `s` is ChaCha8 seeded with `splitmix64(seed ^ splitmix64((y << 8) | s))`,
//! so years can be generated independently without changing any output.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Poisson};

use crate::date::Day;
use crate::error::{Error, Result};
use crate::graph::CitationGraph;
use crate::ingest::{
    write_app_grants, write_citations, write_exogenous_dates, write_patents, write_wipo, AppResolution, CitationRow,
    CitedKind, ExogenousDate, PatentRecord, TechAssignment, TechGroup,
};
use crate::pipeline::{self, BuildOptions, BuildReport, Source, Sources};

pub const FIRST_UTILITY_NUMBER: u32 = 3_930_271;
pub const FIRST_EXOGENOUS_NUMBER: u32 = 2_000_000;
/// Sequence offset of never-granted applications within a publication year.
const UNGRANTED_SEQ: u64 = 5_000_000;
const SECOND_FIELD_SHARE: f64 = 0.3;
const MAX_REDRAWS: usize = 64;

const STREAM_CITES: u64 = 1;
const STREAM_WIPO: u64 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub patents_per_year: BTreeMap<i32, u32>,
    /// Cited grants outside the patent table, per year.
    pub exogenous_per_year: BTreeMap<i32, u32>,
    pub backward_mean: f64,
    /// Geometric parameter of the citation age in years: `P(k) = p(1-p)^(k-1)`.
    pub age_distribution: f64,
    pub app_citation_share_post_2000: f64,
    pub ungranted_app_share: f64,
    pub seed: u64,
}

impl SynthParams {
    pub const PRESETS: [&'static str; 3] = ["small", "paper-shape", "paper-shape-1m"];

    /// `base · growth^(y − 1976)` patents per year for 1976–`last`, a flat
    /// older population for 1926–1975.
    fn growing(base: f64, growth: f64, last: i32, exogenous: u32, seed: u64) -> Self {
        SynthParams {
            patents_per_year: (1976..=last)
                .map(|y| (y, (base * growth.powi(y - 1976)).round() as u32))
                .collect(),
            exogenous_per_year: (1926..1976).map(|y| (y, exogenous)).collect(),
            backward_mean: 10.0,
            age_distribution: 0.07,
            app_citation_share_post_2000: 0.25,
            ungranted_app_share: 0.2,
            seed,
        }
    }

    pub fn preset(name: &str, seed: u64) -> Result<Self> {
        match name {
            "small" => {
                let mut p = Self::growing(60.0, 1.03, 2010, 40, seed);
                p.exogenous_per_year = (1956..1976).map(|y| (y, 40)).collect();
                p.backward_mean = 6.0;
                Ok(p)
            }
            "paper-shape" => Ok(Self::growing(1000.0, 1.035, 2016, 1000, seed)),
            // 41 cohorts summing to about one million patents
            "paper-shape-1m" => Ok(Self::growing(11300.0, 1.035, 2016, 8000, seed)),
            _ => Err(Error::Config(format!(
                "unknown preset `{name}` (expected one of {})",
                Self::PRESETS.join(", ")
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let share = |v: f64, name: &str| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be in [0, 1], got {v}")))
            }
        };
        share(self.app_citation_share_post_2000, "app_citation_share_post_2000")?;
        share(self.ungranted_app_share, "ungranted_app_share")?;
        if !(self.age_distribution > 0.0 && self.age_distribution <= 1.0) {
            return Err(Error::Config("age_distribution must be in (0, 1]".into()));
        }
        if !(self.backward_mean >= 0.0 && self.backward_mean.is_finite()) {
            return Err(Error::Config("backward_mean must be finite and nonnegative".into()));
        }
        if let (Some((&last_exo, _)), Some((&first, _))) =
            (self.exogenous_per_year.last_key_value(), self.patents_per_year.first_key_value())
        {
            if last_exo >= first {
                return Err(Error::Config("exogenous years must precede the patent years".into()));
            }
        }
        let exogenous: u64 = self.exogenous_per_year.values().map(|&c| u64::from(c)).sum();
        if exogenous > u64::from(FIRST_UTILITY_NUMBER - FIRST_EXOGENOUS_NUMBER) {
            return Err(Error::Config("population too large for the numbering scheme".into()));
        }
        Ok(())
    }

    pub fn patent_count(&self) -> u64 {
        self.patents_per_year.values().map(|&c| u64::from(c)).sum()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn year_rng(seed: u64, year: i32, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(((year as i64 as u64) << 8) | stream)))
}

/// Days of `year` falling on the given weekday (0 = Thursday, 5 = Tuesday).
fn weekdays(year: i32, weekday: i32) -> Vec<Day> {
    let start = Day::from_ymd(year, 1, 1).expect("valid year").0;
    let end = Day::end_of_year(year).0;
    let first = start + (weekday - start).rem_euclid(7);
    (first..=end).step_by(7).map(Day).collect()
}

fn spread(days: &[Day], k: usize, count: usize) -> Day {
    days[k * days.len() / count]
}

const TUESDAY: i32 = 5;
const THURSDAY: i32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Node {
    number: u32,
    date: Day,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Target {
    Grant(u32),
    /// Index into the granted-application list.
    GrantedApp(u32),
    UngrantedApp { year: i32, seq: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct GrantedApp {
    app_id: u64,
    pub_date: Day,
    patent: u32,
    grant_date: Day,
}

/// A generated population, held compactly; record views are produced on
/// demand.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    patents: Vec<Node>,
    exogenous: Vec<Node>,
    granted_apps: Vec<GrantedApp>,
    ungranted_pool: BTreeMap<i32, (u32, Vec<Day>)>,
    /// Backward citations in citing order.
    citations: Vec<(u32, Target)>,
    wipo: Vec<(u32, u8)>,
}

pub fn generate(params: &SynthParams) -> Result<SynthData> {
    params.validate()?;

    let mut exogenous = Vec::new();
    let mut number = FIRST_EXOGENOUS_NUMBER;
    let mut pools: BTreeMap<i32, (usize, usize, bool)> = BTreeMap::new();
    for (&year, &count) in &params.exogenous_per_year {
        let days = weekdays(year, TUESDAY);
        pools.insert(year, (exogenous.len(), count as usize, false));
        for k in 0..count as usize {
            exogenous.push(Node { number, date: spread(&days, k, count as usize) });
            number += 1;
        }
    }
    let mut patents = Vec::new();
    let mut number = FIRST_UTILITY_NUMBER;
    for (&year, &count) in &params.patents_per_year {
        let days = weekdays(year, TUESDAY);
        pools.insert(year, (patents.len(), count as usize, true));
        for k in 0..count as usize {
            patents.push(Node { number, date: spread(&days, k, count as usize) });
            number += 1;
        }
    }

    // Pre-grant publications (first possible: 2001-03-15), 40–160 weeks
    // before grant, on Thursdays.
    let first_pub = Day::from_ymd(2001, 3, 15).expect("valid date");
    let mut by_pub_year: BTreeMap<i32, Vec<(Day, u32, Day)>> = BTreeMap::new();
    for p in &patents {
        let weeks = 40 + (splitmix64(params.seed ^ u64::from(p.number)) % 121) as i32;
        let pub_date = Day(p.date.0 - 7 * weeks - TUESDAY);
        if pub_date >= first_pub {
            by_pub_year.entry(pub_date.year().expect("dated")).or_default().push((pub_date, p.number, p.date));
        }
    }
    let mut granted_apps = Vec::new();
    let mut granted_pools: BTreeMap<i32, (usize, usize)> = BTreeMap::new();
    for (year, mut apps) in by_pub_year {
        apps.sort_unstable();
        granted_pools.insert(year, (granted_apps.len(), apps.len()));
        for (seq, (pub_date, patent, grant_date)) in apps.into_iter().enumerate() {
            granted_apps.push(GrantedApp {
                app_id: year as u64 * 10_000_000 + seq as u64,
                pub_date,
                patent,
                grant_date,
            });
        }
    }
    let ungranted_pool: BTreeMap<i32, (u32, Vec<Day>)> = granted_pools
        .iter()
        .map(|(&y, &(_, n))| (y, (n.max(1) as u32, weekdays(y, THURSDAY))))
        .collect();

    let poisson = (params.backward_mean > 0.0).then(|| Poisson::new(params.backward_mean).expect("positive mean"));
    let geometric = Geometric::new(params.age_distribution).expect("validated parameter");
    let mut citations = Vec::new();
    let mut wipo = Vec::new();
    for &year in params.patents_per_year.keys() {
        let (start, count, _) = pools[&year];
        let mut rng = year_rng(params.seed, year, STREAM_CITES);
        let app_share = if year > 2000 { params.app_citation_share_post_2000 } else { 0.0 };
        for p in &patents[start..start + count] {
            let n = poisson.as_ref().map_or(0, |d| d.sample(&mut rng) as usize);
            let mut drawn: Vec<Target> = Vec::with_capacity(n);
            for _ in 0..n {
                let to_app = app_share > 0.0 && rng.random::<f64>() < app_share;
                let ungranted = to_app && rng.random::<f64>() < params.ungranted_app_share;
                for _ in 0..MAX_REDRAWS {
                    let cited_year = year - 1 - geometric.sample(&mut rng).min(10_000) as i32;
                    let target = if to_app {
                        let Some(&(gstart, glen)) = granted_pools.get(&cited_year) else { continue };
                        if ungranted || glen == 0 {
                            let size = ungranted_pool[&cited_year].0;
                            Target::UngrantedApp { year: cited_year, seq: rng.random_range(0..size) }
                        } else {
                            Target::GrantedApp((gstart + rng.random_range(0..glen)) as u32)
                        }
                    } else {
                        let Some(&(pstart, plen, is_patent)) = pools.get(&cited_year) else { continue };
                        if plen == 0 {
                            continue;
                        }
                        let i = pstart + rng.random_range(0..plen);
                        Target::Grant(if is_patent { patents[i].number } else { exogenous[i].number })
                    };
                    if !drawn.contains(&target) {
                        drawn.push(target);
                        break;
                    }
                }
            }
            citations.extend(drawn.into_iter().map(|t| (p.number, t)));
        }

        let mut rng = year_rng(params.seed, year, STREAM_WIPO);
        for p in &patents[start..start + count] {
            let first = rng.random_range(1..=35u8);
            wipo.push((p.number, first));
            if rng.random::<f64>() < SECOND_FIELD_SHARE {
                let second = rng.random_range(1..=34u8);
                let second = if second >= first { second + 1 } else { second };
                wipo.push((p.number, second));
            }
        }
    }

    Ok(SynthData {
        patents,
        exogenous,
        granted_apps,
        ungranted_pool,
        citations,
        wipo,
    })
}

impl SynthData {
    pub fn patent_count(&self) -> usize {
        self.patents.len()
    }

    /// Backward citations of all kinds.
    pub fn citation_count(&self) -> usize {
        self.citations.len()
    }

    pub fn patent_records(&self) -> impl Iterator<Item = PatentRecord> + '_ {
        self.patents.iter().map(|p| PatentRecord::utility(p.number.to_string(), p.date))
    }

    pub fn grant_citation_rows(&self) -> impl Iterator<Item = CitationRow> + '_ {
        self.citations.iter().filter_map(|&(citing, t)| match t {
            Target::Grant(cited) => Some(CitationRow::grant(citing.to_string(), cited.to_string())),
            _ => None,
        })
    }

    fn ungranted(&self, year: i32, seq: u32) -> (String, Day) {
        let (size, days) = &self.ungranted_pool[&year];
        let id = year as u64 * 10_000_000 + UNGRANTED_SEQ + u64::from(seq);
        (id.to_string(), spread(days, seq as usize, *size as usize))
    }

    /// Application citations, dated by the application's publication date.
    pub fn application_citation_rows(&self) -> impl Iterator<Item = CitationRow> + '_ {
        self.citations.iter().filter_map(move |&(citing, t)| {
            let (app, date) = match t {
                Target::Grant(_) => return None,
                Target::GrantedApp(i) => {
                    let a = &self.granted_apps[i as usize];
                    (a.app_id.to_string(), a.pub_date)
                }
                Target::UngrantedApp { year, seq } => self.ungranted(year, seq),
            };
            Some(CitationRow::application(citing.to_string(), app, Some(date)))
        })
    }

    /// Resolution rows for every cited application that was granted.
    pub fn app_resolutions(&self) -> Vec<AppResolution> {
        let cited: BTreeSet<u32> = self
            .citations
            .iter()
            .filter_map(|&(_, t)| match t {
                Target::GrantedApp(i) => Some(i),
                _ => None,
            })
            .collect();
        cited
            .into_iter()
            .map(|i| {
                let a = &self.granted_apps[i as usize];
                AppResolution {
                    application_id: a.app_id.to_string(),
                    grant_id: a.patent.to_string(),
                    grant_date: a.grant_date,
                    application_pub_date: Some(a.pub_date),
                }
            })
            .collect()
    }

    /// Dates of the cited grants outside the patent table.
    pub fn exogenous_dates(&self) -> Vec<ExogenousDate> {
        let cited: BTreeSet<u32> = self
            .citations
            .iter()
            .filter_map(|&(_, t)| match t {
                Target::Grant(n) if n < FIRST_UTILITY_NUMBER => Some(n),
                _ => None,
            })
            .collect();
        let first = FIRST_EXOGENOUS_NUMBER;
        cited
            .into_iter()
            .map(|n| {
                let node = &self.exogenous[(n - first) as usize];
                ExogenousDate { patent_id: n.to_string(), date: node.date }
            })
            .collect()
    }

    pub fn tech_assignments(&self) -> impl Iterator<Item = TechAssignment> + '_ {
        self.wipo.iter().map(|&(p, field)| TechAssignment {
            patent_id: p.to_string(),
            wipo_field_id: field,
            aggregate_group: TechGroup::from_field(field).expect("field in range"),
        })
    }

    /// Renders every table into `sink(file name, bytes)`.
    fn render(&self, mut sink: impl FnMut(&'static str, Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        write_patents(&mut buf, self.patent_records())?;
        sink(FILES[0], std::mem::take(&mut buf))?;
        write_citations(&mut buf, CitedKind::Grant, self.grant_citation_rows())?;
        sink(FILES[1], std::mem::take(&mut buf))?;
        write_citations(&mut buf, CitedKind::Application, self.application_citation_rows())?;
        sink(FILES[2], std::mem::take(&mut buf))?;
        write_app_grants(&mut buf, self.app_resolutions())?;
        sink(FILES[3], std::mem::take(&mut buf))?;
        write_wipo(&mut buf, self.tech_assignments())?;
        sink(FILES[4], std::mem::take(&mut buf))?;
        write_exogenous_dates(&mut buf, self.exogenous_dates())?;
        sink(FILES[5], buf)
    }

    /// Writes the ingest files into `dir` (created if missing).
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.render(|name, bytes| Ok(File::create(dir.join(name))?.write_all(&bytes)?))
    }

    /// The ingest files as in-memory sources.
    pub fn sources(&self) -> Result<Sources> {
        let mut files: BTreeMap<&str, Vec<u8>> = BTreeMap::new();
        self.render(|name, bytes| {
            files.insert(name, bytes);
            Ok(())
        })?;
        let mut take = |name: &'static str| Source::bytes(name, files.remove(name).expect("rendered"));
        Ok(Sources {
            patents: take(FILES[0]),
            citations: take(FILES[1]),
            app_citations: Some(take(FILES[2])),
            app_grants: Some(take(FILES[3])),
            wipo: Some(take(FILES[4])),
            exogenous_dates: Some(take(FILES[5])),
        })
    }

    /// Runs the generated files through the regular ingest pipeline.
    pub fn build_graph(&self, options: &BuildOptions) -> Result<(CitationGraph, BuildReport)> {
        pipeline::build(self.sources()?, options)
    }
}

pub const FILES: [&str; 6] = [
    "patents.csv",
    "citations.csv",
    "app_citations.csv",
    "app_grants.csv",
    "wipo.csv",
    "exogenous_dates.csv",
];
