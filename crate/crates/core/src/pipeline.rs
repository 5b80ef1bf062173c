//! Streaming construction of a graph from input tables.
//!
//! The cache is always built with application citations resolved the
//! methodology-IV way (unresolved applications kept as placeholder nodes), and
//! every edge carries its provenance. Methodologies I–III are then edge masks
//! over the same graph.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Cursor, Read};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::graph::{BuildSummary, CitationGraph, GraphBuilder};
use crate::ingest::{
    parse_app_grants, parse_exogenous_dates, parse_patents, parse_wipo, scan_citations, CitedKind, ColumnMap, EdgeOrigin,
    ParseReport, PatentFilter, ResolutionSummary, ResolveMode, ResolveOptions, Resolver,
};

/// A named byte stream.
pub struct Source {
    pub name: String,
    reader: Box<dyn Read>,
}

impl Source {
    pub fn file(path: &Path) -> Result<Source> {
        Ok(Source {
            name: path.display().to_string(),
            reader: Box::new(File::open(path)?),
        })
    }

    pub fn bytes(name: impl Into<String>, data: Vec<u8>) -> Source {
        Source {
            name: name.into(),
            reader: Box::new(Cursor::new(data)),
        }
    }
}

pub struct Sources {
    pub patents: Source,
    pub citations: Source,
    pub app_citations: Option<Source>,
    pub app_grants: Option<Source>,
    pub exogenous_dates: Option<Source>,
    /// Parsed only for validation and reporting.
    pub wipo: Option<Source>,
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub columns: ColumnMap,
    pub filter: PatentFilter,
    pub resolve: ResolveOptions,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            columns: ColumnMap::default(),
            filter: PatentFilter::utility(),
            resolve: ResolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct BuildReport {
    pub parse: Vec<ParseReport>,
    pub resolution: Option<ResolutionSummary>,
    pub graph: BuildSummary,
}

impl BuildReport {
    pub fn row_errors(&self) -> u64 {
        self.parse.iter().map(ParseReport::error_count).sum()
    }
}

pub fn build(sources: Sources, options: &BuildOptions) -> Result<(CitationGraph, BuildReport)> {
    let map = &options.columns;
    let mut report = BuildReport::default();
    let mut b = GraphBuilder::new();

    let Source { name, reader } = sources.patents;
    let (table, r) = parse_patents(reader, &name, map, &options.filter)?;
    report.parse.push(r);
    for p in &table.records {
        b.add_patent(p);
    }
    b.exclude_citing(table.excluded);

    if let Some(Source { name, reader }) = sources.exogenous_dates {
        let (dates, r) = parse_exogenous_dates(reader, &name, map)?;
        report.parse.push(r);
        b.add_exogenous_dates(dates.iter().map(|d| (d.patent_id.as_str(), d.date)));
    }

    let Source { name, reader } = sources.citations;
    let r = scan_citations(reader, &name, map, CitedKind::Grant, |citing, cited, _| {
        b.add_citation(citing, cited, EdgeOrigin::Grant, None)
    })?;
    report.parse.push(r);

    let resolutions = match sources.app_grants {
        Some(Source { name, reader }) => {
            let (res, r) = parse_app_grants(reader, &name, map)?;
            report.parse.push(r);
            res
        }
        None => Vec::new(),
    };
    if let Some(Source { name, reader }) = sources.app_citations {
        let citing_dates: HashMap<&str, _> = table.records.iter().map(|p| (p.patent_id.as_str(), p.grant_date)).collect();
        let opts = ResolveOptions {
            mode: ResolveMode::IV,
            ..options.resolve.clone()
        };
        let mut resolver = Resolver::new(&resolutions, opts);
        let r = scan_citations(reader, &name, map, CitedKind::Application, |citing, app, date| {
            let citing_date = citing_dates.get(citing).copied();
            if let Some(c) = resolver.resolve(citing, app, date, citing_date) {
                b.add_citation(&c.citing_id, &c.cited_id, c.origin, c.cited_date);
            }
        })?;
        report.parse.push(r);
        let resolution = resolver.finish();
        for p in &resolution.placeholders {
            b.add_patent(p);
        }
        // after the auxiliary file, so its dates take precedence
        b.add_exogenous_dates(resolution.grant_dates.iter().map(|(id, &d)| (id.as_str(), d)));
        report.resolution = Some(resolution.summary);
    }

    if let Some(Source { name, reader }) = sources.wipo {
        report.parse.push(parse_wipo(reader, &name, map)?.1);
    }

    let (graph, summary) = b.finish()?;
    report.graph = summary;
    Ok((graph, report))
}
