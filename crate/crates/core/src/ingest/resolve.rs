//! Rewriting of citations to published applications.
//!
//! Methodology III rewrites each cited application that was granted by the
//! resolution cutoff into a citation of the grant and drops the rest.
//! Methodology IV rewrites the same way but remembers the application's
//! publication date on the edge, and keeps ungranted applications as dated
//! placeholder nodes.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;

use serde::Serialize;

use super::{ColumnMap, Delimited, ParseReport, PatentKind, PatentRecord};
use super::citations::CitationRow;
use crate::date::Day;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppResolution {
    pub application_id: String,
    pub grant_id: String,
    pub grant_date: Day,
    pub application_pub_date: Option<Day>,
}

pub fn parse_app_grants<R: Read>(source: R, source_name: &str, map: &ColumnMap) -> Result<(Vec<AppResolution>, ParseReport)> {
    let reader = Delimited::open(
        source,
        source_name,
        map,
        &["app_grants.application", "app_grants.grant", "app_grants.grant_date"],
        &["app_grants.pub_date"],
    )?;
    let mut report = ParseReport::new(source_name);
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    reader.for_each_row(&mut report, |line, fields, report| {
        let app = fields[0].unwrap_or("");
        let grant = fields[1].unwrap_or("");
        if app.is_empty() || grant.is_empty() {
            return report.reject(line, "empty_id", "application or grant id is empty");
        }
        let grant_text = fields[2].unwrap_or("");
        let Some(grant_date) = Day::parse(grant_text) else {
            return report.reject(line, "malformed_date", format!("grant date `{grant_text}`"));
        };
        let application_pub_date = match fields[3] {
            None | Some("") => None,
            Some(text) => match Day::parse(text) {
                Some(d) => Some(d),
                None => return report.reject(line, "malformed_date", format!("publication date `{text}`")),
            },
        };
        if application_pub_date.is_some_and(|p| p > grant_date) {
            return report.reject(line, "pub_after_grant", format!("application {app} published after grant {grant}"));
        }
        if !seen.insert(app.to_string()) {
            return report.reject(line, "duplicate_id", format!("application {app} repeated"));
        }
        report.rows_kept += 1;
        out.push(AppResolution {
            application_id: app.to_string(),
            grant_id: grant.to_string(),
            grant_date,
            application_pub_date,
        });
    })?;
    Ok((out, report))
}

#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolveMode {
    III,
    IV,
}

/// How rewritten application citations interact with the citation window.
///
/// * `Loose`: every application granted by the resolution cutoff is rewritten.
/// * `Strict`: a rewritten citation is additionally dropped when the grant was
///   published after the citing patent's window, i.e. its grant year exceeds
///   the citing patent's grant year plus the window length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AppWindowRule {
    #[default]
    Loose,
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolveOptions {
    pub mode: ResolveMode,
    pub resolution_cutoff: Day,
    pub window_rule: AppWindowRule,
    pub window_years: u32,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions {
            mode: ResolveMode::III,
            resolution_cutoff: Day::from_ymd(2021, 12, 31).expect("valid date"),
            window_rule: AppWindowRule::Loose,
            window_years: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EdgeOrigin {
    Grant,
    ResolvedApplication,
    UnresolvedApplication,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedCitation {
    pub citing_id: String,
    pub cited_id: String,
    pub origin: EdgeOrigin,
    /// Date attribute carried by the edge. Methodology IV stores the
    /// application publication date here for rewritten citations.
    pub cited_date: Option<Day>,
}

impl ResolvedCitation {
    pub fn from_grant(row: &CitationRow) -> Self {
        ResolvedCitation {
            citing_id: row.citing_id.clone(),
            cited_id: row.cited_id.clone(),
            origin: EdgeOrigin::Grant,
            cited_date: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ResolutionSummary {
    pub application_citations: u64,
    pub resolved: u64,
    pub kept_unresolved: u64,
    pub dropped_unresolved: u64,
    pub dropped_window_rule: u64,
    pub dropped_self_citations: u64,
    pub placeholder_nodes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Resolution {
    pub citations: Vec<ResolvedCitation>,
    /// Ungranted applications kept as nodes (methodology IV only).
    pub placeholders: Vec<PatentRecord>,
    /// Grant dates of every grant an application was rewritten to; dates
    /// grants that are absent from the patent table.
    pub grant_dates: BTreeMap<String, Day>,
    pub summary: ResolutionSummary,
}

/// Row-at-a-time application resolver, for streaming large citation files.
pub struct Resolver<'a> {
    by_app: HashMap<&'a str, &'a AppResolution>,
    opts: ResolveOptions,
    placeholders: BTreeMap<String, Day>,
    grant_dates: BTreeMap<String, Day>,
    summary: ResolutionSummary,
}

impl<'a> Resolver<'a> {
    pub fn new(resolutions: &'a [AppResolution], opts: ResolveOptions) -> Self {
        Resolver {
            by_app: resolutions.iter().map(|r| (r.application_id.as_str(), r)).collect(),
            opts,
            placeholders: BTreeMap::new(),
            grant_dates: BTreeMap::new(),
            summary: ResolutionSummary::default(),
        }
    }

    /// `citing_date` is the citing patent's grant date, needed only by the
    /// strict window rule.
    pub fn resolve(&mut self, citing_id: &str, application_id: &str, row_date: Option<Day>, citing_date: Option<Day>) -> Option<ResolvedCitation> {
        self.summary.application_citations += 1;
        let granted = self
            .by_app
            .get(application_id)
            .filter(|r| r.grant_date <= self.opts.resolution_cutoff)
            .copied();
        match granted {
            Some(res) => {
                if res.grant_id == citing_id {
                    self.summary.dropped_self_citations += 1;
                    return None;
                }
                if self.opts.window_rule == AppWindowRule::Strict {
                    let grant_year = res.grant_date.year();
                    let citing_year = citing_date.and_then(Day::year);
                    if let (Some(g), Some(c)) = (grant_year, citing_year) {
                        if g > c + self.opts.window_years as i32 {
                            self.summary.dropped_window_rule += 1;
                            return None;
                        }
                    }
                }
                self.summary.resolved += 1;
                self.grant_dates.insert(res.grant_id.clone(), res.grant_date);
                let cited_date = match self.opts.mode {
                    ResolveMode::III => None,
                    ResolveMode::IV => res.application_pub_date.or(row_date),
                };
                Some(ResolvedCitation {
                    citing_id: citing_id.to_string(),
                    cited_id: res.grant_id.clone(),
                    origin: EdgeOrigin::ResolvedApplication,
                    cited_date,
                })
            }
            None if self.opts.mode == ResolveMode::III => {
                self.summary.dropped_unresolved += 1;
                None
            }
            None => {
                if application_id == citing_id {
                    self.summary.dropped_self_citations += 1;
                    return None;
                }
                self.summary.kept_unresolved += 1;
                let known = self.by_app.get(application_id).and_then(|r| r.application_pub_date);
                let date = match (row_date, known) {
                    (Some(a), Some(b)) => a.min(b),
                    (a, b) => a.or(b).unwrap_or(Day::UNDATED),
                };
                let entry = self.placeholders.entry(application_id.to_string()).or_insert(date);
                if date.is_dated() && (!entry.is_dated() || date < *entry) {
                    *entry = date;
                }
                Some(ResolvedCitation {
                    citing_id: citing_id.to_string(),
                    cited_id: application_id.to_string(),
                    origin: EdgeOrigin::UnresolvedApplication,
                    cited_date: None,
                })
            }
        }
    }

    pub fn finish(mut self) -> Resolution {
        self.summary.placeholder_nodes = self.placeholders.len() as u64;
        Resolution {
            citations: Vec::new(),
            placeholders: self
                .placeholders
                .into_iter()
                .map(|(id, date)| PatentRecord {
                    patent_id: id,
                    grant_date: date,
                    kind: PatentKind::Other,
                    is_application_placeholder: true,
                })
                .collect(),
            grant_dates: self.grant_dates,
            summary: self.summary,
        }
    }
}

pub fn resolve_applications(
    app_cites: &[CitationRow],
    resolutions: &[AppResolution],
    opts: &ResolveOptions,
    citing_date: impl Fn(&str) -> Option<Day>,
) -> Resolution {
    let mut resolver = Resolver::new(resolutions, opts.clone());
    let citations: Vec<ResolvedCitation> = app_cites
        .iter()
        .filter_map(|row| resolver.resolve(&row.citing_id, &row.cited_id, row.cited_date, citing_date(&row.citing_id)))
        .collect();
    let mut out = resolver.finish();
    out.citations = citations;
    out
}
