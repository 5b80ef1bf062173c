//! Serialisation of parsed tables in the canonical comma-delimited layout
//! accepted by the parsers under the default [`ColumnMap`].

use std::borrow::Borrow;
use std::io::Write;

use super::{AppResolution, CitationRow, CitedKind, ColumnMap, ExogenousDate, PatentRecord, TechAssignment};
use crate::error::{Error, Result};

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Cache(format!("{other:?}")),
    }
}

fn header<W: Write>(w: &mut csv::Writer<W>, logical: &[&str]) -> Result<()> {
    let map = ColumnMap::default();
    w.write_record(logical.iter().map(|l| map.canonical(l))).map_err(csv_err)
}

fn date_text(d: Option<crate::date::Day>) -> String {
    d.map(|d| d.to_string()).unwrap_or_default()
}

pub fn write_patents<W: Write>(out: W, records: impl IntoIterator<Item = impl Borrow<PatentRecord>>) -> Result<()> {
    let mut w = writer(out);
    header(&mut w, &["patents.id", "patents.date", "patents.type"])?;
    for r in records {
        let r = r.borrow();
        w.write_record([r.patent_id.as_str(), &r.grant_date.to_string(), r.kind.as_str()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes grant or application citations; application tables carry the
/// cited publication date column.
pub fn write_citations<W: Write>(out: W, kind: CitedKind, rows: impl IntoIterator<Item = impl Borrow<CitationRow>>) -> Result<()> {
    let mut w = writer(out);
    match kind {
        CitedKind::Grant => {
            header(&mut w, &["citations.citing", "citations.cited"])?;
            for r in rows {
                let r = r.borrow();
                w.write_record([&r.citing_id, &r.cited_id]).map_err(csv_err)?;
            }
        }
        CitedKind::Application => {
            header(&mut w, &["app_citations.citing", "app_citations.cited", "app_citations.date"])?;
            for r in rows {
                let r = r.borrow();
                w.write_record([r.citing_id.as_str(), &r.cited_id, &date_text(r.cited_date)]).map_err(csv_err)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_app_grants<W: Write>(out: W, rows: impl IntoIterator<Item = impl Borrow<AppResolution>>) -> Result<()> {
    let mut w = writer(out);
    header(
        &mut w,
        &["app_grants.application", "app_grants.grant", "app_grants.grant_date", "app_grants.pub_date"],
    )?;
    for r in rows {
        let r = r.borrow();
        w.write_record([
            r.application_id.as_str(),
            &r.grant_id,
            &r.grant_date.to_string(),
            &date_text(r.application_pub_date),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_wipo<W: Write>(out: W, rows: impl IntoIterator<Item = impl Borrow<TechAssignment>>) -> Result<()> {
    let mut w = writer(out);
    header(&mut w, &["wipo.patent", "wipo.field"])?;
    for r in rows {
        let r = r.borrow();
        w.write_record([r.patent_id.as_str(), &r.wipo_field_id.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_exogenous_dates<W: Write>(out: W, rows: impl IntoIterator<Item = impl Borrow<ExogenousDate>>) -> Result<()> {
    let mut w = writer(out);
    header(&mut w, &["exogenous.id", "exogenous.date"])?;
    for r in rows {
        let r = r.borrow();
        w.write_record([r.patent_id.as_str(), &r.date.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
