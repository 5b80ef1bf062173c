//! Parsing of PatentsView-shaped delimited files.
//!
//! Every parser accepts a header-bearing comma- or tab-delimited byte stream
//! (the delimiter is detected from the header line) and a [`ColumnMap`] that
//! maps logical columns onto the header names of a particular PatentsView
//! revision. A missing required column is fatal; everything else is a row-level
//! problem that drops the row and is recorded in the [`ParseReport`].

mod citations;
mod columns;
mod patents;
mod resolve;
mod wipo;
mod write;

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Cursor, Read};

use serde::Serialize;

use crate::error::{Error, Result};

pub use citations::{
    parse_application_citations, parse_exogenous_dates, parse_grant_citations, scan_citations,
    CitationRow, CitedKind, ExogenousDate,
};
pub use columns::ColumnMap;
pub use patents::{parse_patents, PatentFilter, PatentKind, PatentRecord, PatentTable};
pub use resolve::{
    parse_app_grants, resolve_applications, AppResolution, AppWindowRule, EdgeOrigin, Resolution,
    ResolutionSummary, ResolveMode, ResolveOptions, ResolvedCitation, Resolver,
};
pub use wipo::{parse_wipo, TechAssignment, TechGroup};
pub use write::{
    write_app_grants, write_citations, write_exogenous_dates, write_patents, write_wipo,
};

/// Row errors kept verbatim in a report; the rest are only counted.
const MAX_REPORTED_ERRORS: usize = 1000;

const MAX_COLUMNS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    pub line: u64,
    pub reason: &'static str,
    pub detail: String,
}

/// Rows read / kept / dropped per reason for one input file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    pub source: String,
    pub rows_read: u64,
    pub rows_kept: u64,
    pub dropped: BTreeMap<&'static str, u64>,
    pub errors: Vec<RowError>,
    pub errors_not_listed: u64,
}

impl ParseReport {
    pub fn new(source: impl Into<String>) -> Self {
        ParseReport {
            source: source.into(),
            ..Default::default()
        }
    }

    /// Counts a filtered row. Not an error.
    pub fn drop_row(&mut self, reason: &'static str) {
        *self.dropped.entry(reason).or_default() += 1;
    }

    pub fn reject(&mut self, line: u64, reason: &'static str, detail: impl Into<String>) {
        self.drop_row(reason);
        if self.errors.len() < MAX_REPORTED_ERRORS {
            self.errors.push(RowError {
                line,
                reason,
                detail: detail.into(),
            });
        } else {
            self.errors_not_listed += 1;
        }
    }

    pub fn error_count(&self) -> u64 {
        self.errors.len() as u64 + self.errors_not_listed
    }

    pub fn rows_dropped(&self) -> u64 {
        self.dropped.values().sum()
    }
}

/// A delimited reader positioned after the header, with the requested
/// logical columns resolved to field positions.
pub(crate) struct Delimited<'a> {
    reader: csv::Reader<Box<dyn Read + 'a>>,
    source_name: String,
    columns: Vec<Option<usize>>,
    record: csv::ByteRecord,
    empty: bool,
}

/// Detects the delimiter from the first line: tab if present, else comma.
fn sniff<'a, R: Read + 'a>(source: R) -> Result<(u8, Box<dyn Read + 'a>)> {
    let mut buffered = BufReader::new(source);
    let mut first = Vec::new();
    buffered.read_until(b'\n', &mut first)?;
    let delimiter = if first.contains(&b'\t') { b'\t' } else { b',' };
    Ok((delimiter, Box::new(Cursor::new(first).chain(buffered))))
}

impl<'a> Delimited<'a> {
    /// `required` columns must exist; `optional` ones may be absent.
    pub(crate) fn open<R: Read + 'a>(
        source: R,
        source_name: &str,
        map: &ColumnMap,
        required: &[&str],
        optional: &[&str],
    ) -> Result<Self> {
        let (delimiter, stream) = sniff(source)?;
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .flexible(true)
            .has_headers(true)
            .from_reader(stream);
        let header: Vec<String> = match reader.byte_headers() {
            Ok(h) => h
                .iter()
                .map(|f| {
                    String::from_utf8_lossy(f)
                        .trim_start_matches('\u{feff}')
                        .trim()
                        .to_string()
                })
                .collect(),
            Err(e) => {
                return Err(Error::Format {
                    source_name: source_name.to_string(),
                    line: 1,
                    message: e.to_string(),
                })
            }
        };
        let empty = header.iter().all(|h| h.is_empty());
        let mut columns = Vec::with_capacity(required.len() + optional.len());
        for (logical, is_required) in required
            .iter()
            .map(|c| (c, true))
            .chain(optional.iter().map(|c| (c, false)))
        {
            let accepted = map.names(logical);
            let position = accepted
                .iter()
                .find_map(|name| header.iter().position(|h| h == name));
            // An empty stream has no header at all and parses as an empty table.
            if position.is_none() && is_required && !empty {
                return Err(Error::MissingColumn {
                    source_name: source_name.to_string(),
                    column: logical.to_string(),
                    accepted: accepted.join("|"),
                    header: header.join(","),
                });
            }
            columns.push(position);
        }
        Ok(Delimited {
            reader,
            source_name: source_name.to_string(),
            columns,
            record: csv::ByteRecord::new(),
            empty,
        })
    }

    /// Calls `f(line, fields)` for every data row; `fields[i]` is the value of
    /// the i-th requested column (`None` for an absent optional column).
    /// Rows that are not valid UTF-8 or are too short are rejected into `report`.
    pub(crate) fn for_each_row(
        mut self,
        report: &mut ParseReport,
        mut f: impl FnMut(u64, &[Option<&str>], &mut ParseReport),
    ) -> Result<()> {
        if self.empty {
            return Ok(());
        }
        assert!(self.columns.len() <= MAX_COLUMNS);
        loop {
            let more = self.reader.read_byte_record(&mut self.record).map_err(|e| Error::Format {
                source_name: self.source_name.clone(),
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            if !more {
                return Ok(());
            }
            let line = self.record.position().map_or(0, |p| p.line());
            if self.record.len() == 1 && self.record[0].is_empty() {
                continue;
            }
            report.rows_read += 1;
            let mut values: [Option<&str>; MAX_COLUMNS] = [None; MAX_COLUMNS];
            let mut bad = None;
            for (slot, col) in values.iter_mut().zip(&self.columns) {
                match col {
                    None => {}
                    Some(i) => match self.record.get(*i) {
                        None => {
                            bad = Some(("bad_field_count", format!("expected field {}", i + 1)));
                            break;
                        }
                        Some(raw) => match std::str::from_utf8(raw) {
                            Ok(s) => *slot = Some(s.trim()),
                            Err(_) => {
                                bad = Some(("invalid_utf8", format!("field {}", i + 1)));
                                break;
                            }
                        },
                    },
                }
            }
            match bad {
                Some((reason, detail)) => report.reject(line, reason, detail),
                None => f(line, &values[..self.columns.len()], report),
            }
        }
    }
}
