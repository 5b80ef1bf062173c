use std::io::Read;

use super::{ColumnMap, Delimited, ParseReport};
use crate::date::Day;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CitedKind {
    Grant,
    Application,
}

impl CitedKind {
    fn prefix(self) -> &'static str {
        match self {
            CitedKind::Grant => "citations",
            CitedKind::Application => "app_citations",
        }
    }
}

/// One backward citation as it appears in the input, duplicates included.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CitationRow {
    pub citing_id: String,
    pub cited_id: String,
    pub cited_kind: CitedKind,
    /// Publication date of the cited document, when the file carries one.
    /// Only read for application citations, where it dates unresolved
    /// applications.
    pub cited_date: Option<Day>,
}

impl CitationRow {
    pub fn grant(citing: impl Into<String>, cited: impl Into<String>) -> Self {
        CitationRow {
            citing_id: citing.into(),
            cited_id: cited.into(),
            cited_kind: CitedKind::Grant,
            cited_date: None,
        }
    }

    pub fn application(citing: impl Into<String>, cited: impl Into<String>, date: Option<Day>) -> Self {
        CitationRow {
            citing_id: citing.into(),
            cited_id: cited.into(),
            cited_kind: CitedKind::Application,
            cited_date: date,
        }
    }
}

/// Streams citation rows to `sink` without materialising the table.
pub fn scan_citations<R: Read>(
    source: R,
    source_name: &str,
    map: &ColumnMap,
    kind: CitedKind,
    mut sink: impl FnMut(&str, &str, Option<Day>),
) -> Result<ParseReport> {
    let p = kind.prefix();
    let optional_date = format!("{p}.date");
    let optional: Vec<&str> = match kind {
        CitedKind::Grant => vec![],
        CitedKind::Application => vec![optional_date.as_str()],
    };
    let reader = Delimited::open(
        source,
        source_name,
        map,
        &[&format!("{p}.citing"), &format!("{p}.cited")],
        &optional,
    )?;
    let mut report = ParseReport::new(source_name);
    reader.for_each_row(&mut report, |line, fields, report| {
        let citing = fields[0].unwrap_or("");
        let cited = fields[1].unwrap_or("");
        if citing.is_empty() || cited.is_empty() {
            return report.reject(line, "empty_id", "citing or cited id is empty");
        }
        let date = match fields.get(2).copied().flatten() {
            None | Some("") => None,
            Some(text) => match Day::parse(text) {
                Some(d) => Some(d),
                None => return report.reject(line, "malformed_date", format!("`{text}`")),
            },
        };
        report.rows_kept += 1;
        sink(citing, cited, date);
    })?;
    Ok(report)
}

fn collect<R: Read>(source: R, source_name: &str, map: &ColumnMap, kind: CitedKind) -> Result<(Vec<CitationRow>, ParseReport)> {
    let mut rows = Vec::new();
    let report = scan_citations(source, source_name, map, kind, |citing, cited, date| {
        rows.push(CitationRow {
            citing_id: citing.to_string(),
            cited_id: cited.to_string(),
            cited_kind: kind,
            cited_date: date,
        })
    })?;
    Ok((rows, report))
}

pub fn parse_grant_citations<R: Read>(source: R, source_name: &str, map: &ColumnMap) -> Result<(Vec<CitationRow>, ParseReport)> {
    collect(source, source_name, map, CitedKind::Grant)
}

pub fn parse_application_citations<R: Read>(
    source: R,
    source_name: &str,
    map: &ColumnMap,
) -> Result<(Vec<CitationRow>, ParseReport)> {
    collect(source, source_name, map, CitedKind::Application)
}

/// Publication date for a cited grant that is not part of the patent table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExogenousDate {
    pub patent_id: String,
    pub date: Day,
}

pub fn parse_exogenous_dates<R: Read>(source: R, source_name: &str, map: &ColumnMap) -> Result<(Vec<ExogenousDate>, ParseReport)> {
    let reader = Delimited::open(source, source_name, map, &["exogenous.id", "exogenous.date"], &[])?;
    let mut report = ParseReport::new(source_name);
    let mut out = Vec::new();
    reader.for_each_row(&mut report, |line, fields, report| {
        let (id, date) = (fields[0].unwrap_or(""), fields[1].unwrap_or(""));
        if id.is_empty() {
            return report.reject(line, "empty_id", "patent id is empty");
        }
        match Day::parse(date) {
            Some(date) => {
                report.rows_kept += 1;
                out.push(ExogenousDate { patent_id: id.to_string(), date });
            }
            None => report.reject(line, "malformed_date", format!("`{date}` for {id}")),
        }
    })?;
    Ok((out, report))
}
