//! Per-focal result rows and their CSV form:
//!
//! `patent_id,grant_date,mode,t,cd,n,n_f,n_b,n_r,backward_count,defined`
//!
//! `cd` is written with 9 significant digits and left empty when undefined.
//! Readers never parse `cd` back: the exact ratio is recomputed from the counts.

use std::io::{Read, Write};

use crate::cd::{CdConfig, FocalResult, Methodology};
use crate::date::Day;
use crate::error::{Error, Result};
use crate::graph::CitationGraph;

pub const HEADER: [&str; 11] = [
    "patent_id",
    "grant_date",
    "mode",
    "t",
    "cd",
    "n",
    "n_f",
    "n_b",
    "n_r",
    "backward_count",
    "defined",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultRow {
    pub patent_id: String,
    pub grant_date: Day,
    pub mode: Methodology,
    pub t: u32,
    pub n_f: u32,
    pub n_b: u32,
    pub n_r: u32,
    pub backward_count: u32,
}

impl ResultRow {
    pub fn from_focal(graph: &CitationGraph, config: &CdConfig, r: &FocalResult) -> Self {
        ResultRow {
            patent_id: graph.id(r.focal).to_string(),
            grant_date: graph.date(r.focal),
            mode: config.methodology,
            t: config.window_years,
            n_f: r.n_f,
            n_b: r.n_b,
            n_r: r.n_r,
            backward_count: r.backward_count,
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

    pub fn year(&self) -> Option<i32> {
        self.grant_date.year()
    }
}

pub fn rows_from_results(graph: &CitationGraph, config: &CdConfig, results: &[FocalResult]) -> Vec<ResultRow> {
    results.iter().map(|r| ResultRow::from_focal(graph, config, r)).collect()
}

/// Fixed-point rendering with 9 significant digits.
pub fn format_sig9(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{value:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let body = if exp >= 0 {
        let split = exp as usize + 1;
        if split >= digits.len() {
            format!("{digits}{}", "0".repeat(split - digits.len()))
        } else {
            format!("{}.{}", &digits[..split], &digits[split..])
        }
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

pub fn write_results<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.patent_id.clone(),
            r.grant_date.to_string(),
            r.mode.to_string(),
            r.t.to_string(),
            r.cd().map(format_sig9).unwrap_or_default(),
            r.n().to_string(),
            r.n_f.to_string(),
            r.n_b.to_string(),
            r.n_r.to_string(),
            r.backward_count.to_string(),
            u8::from(r.is_defined()).to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results<R: Read>(input: R, source_name: &str) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let fmt_err = |line: u64, message: String| Error::Format {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let header = rdr.headers().map_err(|e| fmt_err(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(fmt_err(1, format!("expected header `{}`", HEADER.join(","))));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| fmt_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let int = |i: usize| -> Result<u32> {
            rec[i]
                .parse()
                .map_err(|_| fmt_err(line, format!("column `{}` is not an integer: `{}`", HEADER[i], &rec[i])))
        };
        let row = ResultRow {
            patent_id: rec[0].to_string(),
            grant_date: if rec[1].is_empty() {
                Day::UNDATED
            } else {
                Day::parse(&rec[1]).ok_or_else(|| fmt_err(line, format!("bad grant_date `{}`", &rec[1])))?
            },
            mode: rec[2].parse().map_err(|e: Error| fmt_err(line, e.to_string()))?,
            t: int(3)?,
            n_f: int(6)?,
            n_b: int(7)?,
            n_r: int(8)?,
            backward_count: int(9)?,
        };
        if int(5)? != row.n() || (&rec[10] == "1") != row.is_defined() {
            return Err(fmt_err(line, "n/defined inconsistent with n_f + n_b + n_r".into()));
        }
        out.push(row);
    }
    Ok(out)
}
