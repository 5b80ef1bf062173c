use std::collections::{BTreeSet, HashSet};
use std::io::Read;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::{ColumnMap, Delimited, ParseReport};
use crate::date::Day;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PatentKind {
    Utility,
    Other,
}

impl PatentKind {
    pub fn from_type(text: &str) -> PatentKind {
        if text.eq_ignore_ascii_case("utility") {
            PatentKind::Utility
        } else {
            PatentKind::Other
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PatentKind::Utility => "utility",
            PatentKind::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatentRecord {
    pub patent_id: String,
    pub grant_date: Day,
    pub kind: PatentKind,
    /// Set for ungranted applications kept as nodes under methodology IV.
    pub is_application_placeholder: bool,
}

impl PatentRecord {
    pub fn utility(id: impl Into<String>, grant_date: Day) -> Self {
        PatentRecord {
            patent_id: id.into(),
            grant_date,
            kind: PatentKind::Utility,
            is_application_placeholder: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatentFilter {
    pub utility_only: bool,
    pub year_range: Option<RangeInclusive<i32>>,
}

impl PatentFilter {
    pub fn utility() -> Self {
        PatentFilter {
            utility_only: true,
            year_range: None,
        }
    }
}

/// Parsed patent population. `excluded` holds ids of well-formed rows removed
/// by the filter, so citations made by them can be dropped rather than
/// treated as inconsistencies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatentTable {
    pub records: Vec<PatentRecord>,
    pub excluded: BTreeSet<String>,
}

pub fn parse_patents<R: Read>(
    source: R,
    source_name: &str,
    map: &ColumnMap,
    filter: &PatentFilter,
) -> Result<(PatentTable, ParseReport)> {
    let reader = Delimited::open(
        source,
        source_name,
        map,
        &["patents.id", "patents.date", "patents.type"],
        &[],
    )?;
    let mut report = ParseReport::new(source_name);
    let mut table = PatentTable::default();
    let mut seen: HashSet<String> = HashSet::new();
    reader.for_each_row(&mut report, |line, fields, report| {
        let (id, date, kind) = (fields[0].unwrap_or(""), fields[1].unwrap_or(""), fields[2].unwrap_or(""));
        if id.is_empty() {
            return report.reject(line, "empty_id", "patent id is empty");
        }
        let Some(grant_date) = Day::parse(date) else {
            return report.reject(line, "malformed_date", format!("`{date}` for patent {id}"));
        };
        if !seen.insert(id.to_string()) {
            return report.reject(line, "duplicate_id", format!("patent {id} repeated"));
        }
        let kind = PatentKind::from_type(kind);
        if filter.utility_only && kind != PatentKind::Utility {
            report.drop_row("not_utility");
            table.excluded.insert(id.to_string());
            return;
        }
        if let Some(range) = &filter.year_range {
            if !grant_date.year().is_some_and(|y| range.contains(&y)) {
                report.drop_row("outside_year_range");
                table.excluded.insert(id.to_string());
                return;
            }
        }
        report.rows_kept += 1;
        table.records.push(PatentRecord {
            patent_id: id.to_string(),
            grant_date,
            kind,
            is_application_placeholder: false,
        });
    })?;
    Ok((table, report))
}
