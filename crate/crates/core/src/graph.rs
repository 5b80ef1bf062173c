//! Immutable interned citation graph.
//!
//! Nodes are numbered densely in `(date, id length, id)` order, so node
//! indices are monotone in publication date and every adjacency list, being
//! sorted by index, is also sorted by date. Backward adjacency is stored as
//! CSR with a provenance flag and an optional edge date per entry; forward
//! adjacency is its exact transpose and is always derived, never stored.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::date::Day;
use crate::error::{Error, Result};
use crate::ingest::{CitationRow, EdgeOrigin, ExogenousDate, PatentKind, PatentRecord, ResolvedCitation};

pub type NodeId = u32;

/// Set of edge provenances admitted by a view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeMask(pub u8);

impl EdgeMask {
    pub const GRANT: EdgeMask = EdgeMask(1);
    pub const RESOLVED_APPLICATION: EdgeMask = EdgeMask(2);
    pub const UNRESOLVED_APPLICATION: EdgeMask = EdgeMask(4);
    pub const ALL: EdgeMask = EdgeMask(7);

    pub fn of(origin: EdgeOrigin) -> EdgeMask {
        match origin {
            EdgeOrigin::Grant => EdgeMask::GRANT,
            EdgeOrigin::ResolvedApplication => EdgeMask::RESOLVED_APPLICATION,
            EdgeOrigin::UnresolvedApplication => EdgeMask::UNRESOLVED_APPLICATION,
        }
    }

    pub fn union(self, other: EdgeMask) -> EdgeMask {
        EdgeMask(self.0 | other.0)
    }

    #[inline]
    pub fn admits(self, flags: u8) -> bool {
        self.0 & flags != 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[repr(u8)]
pub enum NodeKind {
    /// Granted utility patent from the patent table.
    Utility = 0,
    /// Other granted patent kept in the patent table (filter disabled).
    OtherPatent = 1,
    /// Cited grant absent from the patent table (e.g. pre-1976 grants).
    Exogenous = 2,
    /// Ungranted application kept as a node under methodology IV.
    Placeholder = 3,
}

impl NodeKind {
    pub fn from_u8(v: u8) -> Option<NodeKind> {
        Some(match v {
            0 => NodeKind::Utility,
            1 => NodeKind::OtherPatent,
            2 => NodeKind::Exogenous,
            3 => NodeKind::Placeholder,
            _ => return None,
        })
    }

    pub fn is_patent(self) -> bool {
        matches!(self, NodeKind::Utility | NodeKind::OtherPatent)
    }
}

/// Global truncation of backward citations by cited publication date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TruncationFilter {
    pub cutoff: Option<Day>,
}

impl TruncationFilter {
    pub const NONE: TruncationFilter = TruncationFilter { cutoff: None };

    pub fn before(cutoff: Day) -> Self {
        TruncationFilter { cutoff: Some(cutoff) }
    }

    /// Undated nodes compare below every cutoff and are therefore removed.
    #[inline]
    pub fn keeps(self, cited_date: Day) -> bool {
        self.cutoff.is_none_or(|c| cited_date >= c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Csr {
    #[inline]
    fn range(&self, node: NodeId) -> std::ops::Range<usize> {
        self.offsets[node as usize]..self.offsets[node as usize + 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationGraph {
    ids: Vec<Box<str>>,
    by_id: Vec<NodeId>,
    dates: Vec<Day>,
    kinds: Vec<NodeKind>,
    backward: Csr,
    backward_flags: Vec<u8>,
    backward_dates: Vec<Day>,
    forward: Csr,
    forward_flags: Vec<u8>,
}

/// Raw backward adjacency of one node: targets with their provenance flags
/// and edge dates (`Day::UNDATED` when the edge carries no date of its own).
pub struct BackwardEdges<'g> {
    pub targets: &'g [NodeId],
    pub flags: &'g [u8],
    pub dates: &'g [Day],
}

impl CitationGraph {
    /// Assembles a graph from its stored sections and derives the rest.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        ids: Vec<Box<str>>,
        dates: Vec<Day>,
        kinds: Vec<NodeKind>,
        offsets: Vec<usize>,
        targets: Vec<NodeId>,
        flags: Vec<u8>,
        edge_dates: Vec<Day>,
    ) -> Result<CitationGraph> {
        let n = ids.len();
        let m = targets.len();
        let bad = |what: &str| Err(Error::Cache(format!("inconsistent sections: {what}")));
        if dates.len() != n || kinds.len() != n || offsets.len() != n + 1 {
            return bad("per-node section lengths");
        }
        if flags.len() != m || edge_dates.len() != m || offsets[0] != 0 || offsets[n] != m {
            return bad("per-edge section lengths");
        }
        if offsets.windows(2).any(|w| w[0] > w[1]) {
            return bad("offsets not monotone");
        }
        for v in 0..n {
            let list = &targets[offsets[v]..offsets[v + 1]];
            if list.windows(2).any(|w| w[0] >= w[1]) || list.iter().any(|&t| t as usize >= n || t as usize == v) {
                return bad("adjacency not sorted, unique and loop-free");
            }
        }
        let backward = Csr { offsets, targets };
        let (forward, forward_flags) = transpose(n, &backward, &flags);
        let mut by_id: Vec<NodeId> = (0..n as NodeId).collect();
        by_id.sort_unstable_by(|&a, &b| ids[a as usize].cmp(&ids[b as usize]));
        if by_id.windows(2).any(|w| ids[w[0] as usize] == ids[w[1] as usize]) {
            return bad("duplicate node id");
        }
        Ok(CitationGraph {
            ids,
            by_id,
            dates,
            kinds,
            backward,
            backward_flags: flags,
            backward_dates: edge_dates,
            forward,
            forward_flags,
        })
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.backward.targets.len()
    }

    pub fn id(&self, node: NodeId) -> &str {
        &self.ids[node as usize]
    }

    pub fn node(&self, id: &str) -> Option<NodeId> {
        self.by_id
            .binary_search_by(|&n| (*self.ids[n as usize]).cmp(id))
            .ok()
            .map(|i| self.by_id[i])
    }

    pub fn date(&self, node: NodeId) -> Day {
        self.dates[node as usize]
    }

    pub fn dates(&self) -> &[Day] {
        &self.dates
    }

    pub fn kind(&self, node: NodeId) -> NodeKind {
        self.kinds[node as usize]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.node_count() as NodeId
    }

    pub fn backward_edges(&self, node: NodeId) -> BackwardEdges<'_> {
        let r = self.backward.range(node);
        BackwardEdges {
            targets: &self.backward.targets[r.clone()],
            flags: &self.backward_flags[r.clone()],
            dates: &self.backward_dates[r],
        }
    }

    /// Citers of `node` with the flags of their edge into `node`, in index order.
    pub fn forward_edges(&self, node: NodeId) -> (&[NodeId], &[u8]) {
        let r = self.forward.range(node);
        (&self.forward.targets[r.clone()], &self.forward_flags[r])
    }

    pub fn view(&self, mask: EdgeMask, truncation: TruncationFilter) -> GraphView<'_> {
        GraphView { graph: self, mask, truncation }
    }

    pub fn full_view(&self) -> GraphView<'_> {
        self.view(EdgeMask::ALL, TruncationFilter::NONE)
    }

    /// First node index whose date is strictly after `day`.
    pub fn first_after(&self, day: Day) -> NodeId {
        self.dates.partition_point(|&d| d <= day) as NodeId
    }

    pub(crate) fn sections(&self) -> (&[Box<str>], &[Day], &[NodeKind], &[usize], &[NodeId], &[u8], &[Day]) {
        (
            &self.ids,
            &self.dates,
            &self.kinds,
            &self.backward.offsets,
            &self.backward.targets,
            &self.backward_flags,
            &self.backward_dates,
        )
    }
}

fn transpose(n: usize, backward: &Csr, flags: &[u8]) -> (Csr, Vec<u8>) {
    let mut offsets = vec![0usize; n + 1];
    for &t in &backward.targets {
        offsets[t as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut targets = vec![0 as NodeId; backward.targets.len()];
    let mut out_flags = vec![0u8; backward.targets.len()];
    for citing in 0..n {
        for e in backward.range(citing as NodeId) {
            let cited = backward.targets[e] as usize;
            let slot = cursor[cited];
            targets[slot] = citing as NodeId;
            out_flags[slot] = flags[e];
            cursor[cited] += 1;
        }
    }
    (Csr { offsets, targets }, out_flags)
}

/// A methodology-filtered view: an edge is present when its provenance is
/// admitted by the mask and its cited node survives truncation. Filtering
/// happens at traversal time; nothing is copied.
#[derive(Debug, Clone, Copy)]
pub struct GraphView<'g> {
    graph: &'g CitationGraph,
    mask: EdgeMask,
    truncation: TruncationFilter,
}

impl<'g> GraphView<'g> {
    pub fn graph(&self) -> &'g CitationGraph {
        self.graph
    }

    pub fn mask(&self) -> EdgeMask {
        self.mask
    }

    pub fn truncation(&self) -> TruncationFilter {
        self.truncation
    }

    #[inline]
    pub fn edge_present(&self, cited: NodeId, flags: u8) -> bool {
        self.mask.admits(flags) && self.truncation.keeps(self.graph.dates[cited as usize])
    }

    pub fn backward(&self, node: NodeId) -> impl Iterator<Item = NodeId> + 'g {
        let view = *self;
        let e = self.graph.backward_edges(node);
        e.targets
            .iter()
            .zip(e.flags)
            .filter(move |(&t, &f)| view.edge_present(t, f))
            .map(|(&t, _)| t)
    }

    /// Present backward edges as `(cited, date)`. Edge dates (application
    /// publication dates) apply only when the mask admits unresolved
    /// application edges; otherwise, or when the edge has no date, the cited
    /// node's date is used.
    pub fn backward_dated(&self, node: NodeId) -> impl Iterator<Item = (NodeId, Day)> + 'g {
        let view = *self;
        let use_edge_dates = self.mask.admits(EdgeMask::UNRESOLVED_APPLICATION.0);
        let e = self.graph.backward_edges(node);
        e.targets
            .iter()
            .zip(e.flags)
            .zip(e.dates)
            .filter(move |((&t, &f), _)| view.edge_present(t, f))
            .map(move |((&t, _), &d)| (t, if use_edge_dates && d.is_dated() { d } else { view.graph.dates[t as usize] }))
    }

    pub fn backward_count(&self, node: NodeId) -> usize {
        self.backward(node).count()
    }

    /// Citers of `node` present in the view.
    pub fn forward(&self, node: NodeId) -> impl Iterator<Item = NodeId> + 'g {
        self.forward_between(node, 0, self.graph.node_count() as NodeId)
    }

    /// Citers of `node` present in the view with index in `[lo, hi)`.
    pub fn forward_between(&self, node: NodeId, lo: NodeId, hi: NodeId) -> impl Iterator<Item = NodeId> + 'g {
        let (citers, flags) = self.graph.forward_edges(node);
        let (a, b) = if self.truncation.keeps(self.graph.dates[node as usize]) {
            (citers.partition_point(|&c| c < lo), citers.partition_point(|&c| c < hi))
        } else {
            (0, 0)
        };
        let mask = self.mask;
        citers[a..b.max(a)]
            .iter()
            .zip(&flags[a..b.max(a)])
            .filter(move |(_, &f)| mask.admits(f))
            .map(|(&c, _)| c)
    }

    /// Copies the view into a standalone graph containing only present edges.
    pub fn materialize(&self) -> CitationGraph {
        let g = self.graph;
        let n = g.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut flags = Vec::new();
        let mut dates = Vec::new();
        offsets.push(0);
        for v in g.nodes() {
            let e = g.backward_edges(v);
            for i in 0..e.targets.len() {
                if self.edge_present(e.targets[i], e.flags[i]) {
                    targets.push(e.targets[i]);
                    flags.push(e.flags[i]);
                    dates.push(e.dates[i]);
                }
            }
            offsets.push(targets.len());
        }
        CitationGraph::from_parts(g.ids.clone(), g.dates.clone(), g.kinds.clone(), offsets, targets, flags, dates)
            .expect("subgraph of a valid graph is valid")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BuildSummary {
    pub patent_nodes: u64,
    pub exogenous_nodes: u64,
    pub undated_exogenous_nodes: u64,
    pub placeholder_nodes: u64,
    pub citations_in: u64,
    pub edges: u64,
    pub duplicate_edges: u64,
    pub self_loops: u64,
    pub dropped_excluded_citing: u64,
}

#[derive(Clone, Copy)]
struct RawEdge {
    citing: NodeId,
    cited: NodeId,
    date: Day,
    flags: u8,
}

/// Incremental graph construction from streamed rows. Node order, and hence
/// the finished graph, does not depend on insertion order.
#[derive(Default)]
pub struct GraphBuilder {
    lookup: HashMap<Box<str>, NodeId>,
    dates: Vec<Day>,
    kinds: Vec<NodeKind>,
    edges: Vec<RawEdge>,
    excluded: BTreeSet<String>,
    fallback_dates: HashMap<Box<str>, Day>,
    unknown_citing: BTreeSet<String>,
    summary: BuildSummary,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Ids whose citations are silently dropped (patents removed by the
    /// ingest filter).
    pub fn exclude_citing(&mut self, ids: impl IntoIterator<Item = String>) {
        self.excluded.extend(ids);
    }

    fn intern(&mut self, id: &str, date: Day, kind: NodeKind) -> NodeId {
        if let Some(&n) = self.lookup.get(id) {
            return n;
        }
        let n = self.dates.len() as NodeId;
        self.lookup.insert(id.into(), n);
        self.dates.push(date);
        self.kinds.push(kind);
        n
    }

    pub fn add_patent(&mut self, record: &PatentRecord) {
        let kind = match (record.is_application_placeholder, record.kind) {
            (true, _) => NodeKind::Placeholder,
            (false, PatentKind::Utility) => NodeKind::Utility,
            (false, PatentKind::Other) => NodeKind::OtherPatent,
        };
        if let Some(&n) = self.lookup.get(record.patent_id.as_str()) {
            // A patent or placeholder supersedes an exogenous node created by
            // an earlier citation.
            if self.kinds[n as usize] == NodeKind::Exogenous {
                self.kinds[n as usize] = kind;
                self.dates[n as usize] = record.grant_date;
            }
            return;
        }
        self.intern(&record.patent_id, record.grant_date, kind);
    }

    /// Dates for cited grants that are not in the patent table. The first
    /// date supplied for an id wins.
    pub fn add_exogenous_dates<'a>(&mut self, dates: impl IntoIterator<Item = (&'a str, Day)>) {
        for (id, d) in dates {
            self.fallback_dates.entry(id.into()).or_insert(d);
        }
    }

    pub fn add_citation(&mut self, citing: &str, cited: &str, origin: EdgeOrigin, cited_date: Option<Day>) {
        self.summary.citations_in += 1;
        let Some(&citing_node) = self.lookup.get(citing).filter(|&&n| self.kinds[n as usize].is_patent()) else {
            if self.excluded.contains(citing) {
                self.summary.dropped_excluded_citing += 1;
            } else {
                self.unknown_citing.insert(citing.to_string());
            }
            return;
        };
        if citing == cited {
            self.summary.self_loops += 1;
            return;
        }
        let cited_node = self.intern(cited, Day::UNDATED, NodeKind::Exogenous);
        self.edges.push(RawEdge {
            citing: citing_node,
            cited: cited_node,
            date: cited_date.unwrap_or(Day::UNDATED),
            flags: EdgeMask::of(origin).0,
        });
    }

    pub fn finish(self) -> Result<(CitationGraph, BuildSummary)> {
        let GraphBuilder {
            lookup,
            mut dates,
            kinds,
            mut edges,
            fallback_dates,
            unknown_citing,
            mut summary,
            ..
        } = self;
        if !unknown_citing.is_empty() {
            return Err(Error::UnknownCitingIds {
                count: unknown_citing.len(),
                sample: unknown_citing.into_iter().take(20).collect(),
            });
        }
        let n = dates.len();
        let mut ids: Vec<Box<str>> = vec![Box::from(""); n];
        for (id, node) in lookup {
            ids[node as usize] = id;
        }
        for (v, kind) in kinds.iter().enumerate() {
            match kind {
                NodeKind::Exogenous => {
                    summary.exogenous_nodes += 1;
                    if let Some(&d) = fallback_dates.get(&ids[v]) {
                        dates[v] = d;
                    } else {
                        summary.undated_exogenous_nodes += 1;
                    }
                }
                NodeKind::Placeholder => summary.placeholder_nodes += 1,
                _ => summary.patent_nodes += 1,
            }
        }

        let mut order: Vec<NodeId> = (0..n as NodeId).collect();
        order.sort_unstable_by(|&a, &b| {
            let (a, b) = (a as usize, b as usize);
            (dates[a], ids[a].len(), &ids[a]).cmp(&(dates[b], ids[b].len(), &ids[b]))
        });
        let mut rank = vec![0 as NodeId; n];
        for (new, &old) in order.iter().enumerate() {
            rank[old as usize] = new as NodeId;
        }
        let new_ids: Vec<Box<str>> = order.iter().map(|&o| std::mem::take(&mut ids[o as usize])).collect();
        let new_dates: Vec<Day> = order.iter().map(|&o| dates[o as usize]).collect();
        let new_kinds: Vec<NodeKind> = order.iter().map(|&o| kinds[o as usize]).collect();

        for e in &mut edges {
            e.citing = rank[e.citing as usize];
            e.cited = rank[e.cited as usize];
        }
        edges.sort_unstable_by_key(|e| (e.citing, e.cited));

        let mut offsets = vec![0usize; n + 1];
        let mut targets = Vec::with_capacity(edges.len());
        let mut flags = Vec::with_capacity(edges.len());
        let mut edge_dates = Vec::with_capacity(edges.len());
        let mut i = 0;
        while i < edges.len() {
            let (citing, cited) = (edges[i].citing, edges[i].cited);
            let mut f = 0u8;
            let mut date = Day::UNDATED;
            let mut j = i;
            while j < edges.len() && edges[j].citing == citing && edges[j].cited == cited {
                f |= edges[j].flags;
                if edges[j].date.is_dated() && (!date.is_dated() || edges[j].date < date) {
                    date = edges[j].date;
                }
                j += 1;
            }
            summary.duplicate_edges += (j - i - 1) as u64;
            targets.push(cited);
            flags.push(f);
            edge_dates.push(date);
            offsets[citing as usize + 1] += 1;
            i = j;
        }
        for v in 0..n {
            offsets[v + 1] += offsets[v];
        }
        summary.edges = targets.len() as u64;
        drop(edges);
        let graph = CitationGraph::from_parts(new_ids, new_dates, new_kinds, offsets, targets, flags, edge_dates)?;
        Ok((graph, summary))
    }
}

/// Builds a graph from in-memory tables. `citations` may mix grant and
/// resolved application citations; `placeholders` are ungranted
/// applications kept as nodes.
pub fn build_graph(
    patents: &[PatentRecord],
    citations: &[ResolvedCitation],
    placeholders: &[PatentRecord],
) -> Result<(CitationGraph, BuildSummary)> {
    let mut b = GraphBuilder::new();
    for p in patents.iter().chain(placeholders) {
        b.add_patent(p);
    }
    for c in citations {
        b.add_citation(&c.citing_id, &c.cited_id, c.origin, c.cited_date);
    }
    b.finish()
}

/// Convenience for grant-only inputs.
pub fn build_grant_graph(
    patents: &[PatentRecord],
    citations: &[CitationRow],
    exogenous: &[ExogenousDate],
) -> Result<(CitationGraph, BuildSummary)> {
    let mut b = GraphBuilder::new();
    for p in patents {
        b.add_patent(p);
    }
    b.add_exogenous_dates(exogenous.iter().map(|e| (e.patent_id.as_str(), e.date)));
    for c in citations {
        b.add_citation(&c.citing_id, &c.cited_id, EdgeOrigin::Grant, None);
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(s: &str) -> Day {
        Day::parse(s).unwrap()
    }

    fn patents(ids: &[(&str, &str)]) -> Vec<PatentRecord> {
        ids.iter().map(|(id, d)| PatentRecord::utility(*id, day(d))).collect()
    }

    fn ids(g: &CitationGraph, nodes: impl Iterator<Item = NodeId>) -> Vec<String> {
        nodes.map(|n| g.id(n).to_string()).collect()
    }

    #[test]
    fn dedup_and_transpose() {
        let p = patents(&[("A", "1990-01-02"), ("B", "1985-01-01"), ("C", "1980-01-01")]);
        let c = [CitationRow::grant("A", "B"), CitationRow::grant("A", "B"), CitationRow::grant("B", "C")];
        let (g, s) = build_grant_graph(&p, &c, &[]).unwrap();
        let v = g.full_view();
        let a = g.node("A").unwrap();
        let b = g.node("B").unwrap();
        assert_eq!(ids(&g, v.backward(a)), ["B"]);
        assert_eq!(ids(&g, v.forward(b)), ["A"]);
        assert_eq!(ids(&g, v.backward(b)), ["C"]);
        assert_eq!(s.duplicate_edges, 1);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn self_loop_dropped_and_counted() {
        let p = patents(&[("A", "1990-01-02")]);
        let (g, s) = build_grant_graph(&p, &[CitationRow::grant("A", "A")], &[]).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(s.self_loops, 1);
    }

    #[test]
    fn empty_edges() {
        let p = patents(&[("A", "1990-01-02"), ("B", "1991-01-02")]);
        let (g, _) = build_grant_graph(&p, &[], &[]).unwrap();
        for n in g.nodes() {
            assert_eq!(g.full_view().backward(n).count(), 0);
            assert_eq!(g.full_view().forward(n).count(), 0);
        }
    }

    #[test]
    fn unknown_citing_is_fatal_excluded_is_dropped() {
        let p = patents(&[("A", "1990-01-02")]);
        let err = build_grant_graph(&p, &[CitationRow::grant("Z", "A")], &[]).unwrap_err();
        assert!(matches!(err, Error::UnknownCitingIds { count: 1, .. }));

        let mut b = GraphBuilder::new();
        b.add_patent(&p[0]);
        b.exclude_citing(["D1".to_string()]);
        b.add_citation("D1", "A", EdgeOrigin::Grant, None);
        let (_, s) = b.finish().unwrap();
        assert_eq!(s.dropped_excluded_citing, 1);
    }

    #[test]
    fn nodes_ordered_by_date() {
        let p = patents(&[("Z", "1977-01-01"), ("A", "1990-01-02"), ("M", "1980-05-05")]);
        let (g, _) = build_grant_graph(&p, &[CitationRow::grant("A", "X")], &[]).unwrap();
        assert_eq!(ids(&g, g.nodes()), ["X", "Z", "M", "A"]);
        assert_eq!(g.kind(0), NodeKind::Exogenous);
        assert!(!g.date(0).is_dated());
    }

    #[test]
    fn truncation_removes_pre_cutoff_edges_globally() {
        let p = patents(&[("F", "1980-01-01"), ("A", "1982-01-05")]);
        let c = [CitationRow::grant("F", "P"), CitationRow::grant("A", "F"), CitationRow::grant("A", "P")];
        let exo = [ExogenousDate { patent_id: "P".into(), date: day("1974-03-05") }];
        let (g, _) = build_grant_graph(&p, &c, &exo).unwrap();
        let v = g.view(EdgeMask::ALL, TruncationFilter::before(day("1976-01-01")));
        let (f, pn) = (g.node("F").unwrap(), g.node("P").unwrap());
        assert_eq!(v.backward(f).count(), 0);
        assert_eq!(v.forward(pn).count(), 0);
        assert_eq!(ids(&g, v.forward(f)), ["A"]);

        let late = g.view(EdgeMask::ALL, TruncationFilter::before(day("2000-01-01")));
        assert!(g.nodes().all(|n| late.backward(n).count() == 0 && late.forward(n).count() == 0));

        let none = g.view(EdgeMask::ALL, TruncationFilter::NONE);
        assert_eq!(none.backward(f).count(), 1);
    }

    #[test]
    fn undated_exogenous_is_pre_cutoff() {
        let p = patents(&[("F", "1980-01-01")]);
        let (g, s) = build_grant_graph(&p, &[CitationRow::grant("F", "Q")], &[]).unwrap();
        assert_eq!(s.undated_exogenous_nodes, 1);
        let f = g.node("F").unwrap();
        assert_eq!(g.view(EdgeMask::ALL, TruncationFilter::NONE).backward(f).count(), 1);
        assert_eq!(g.view(EdgeMask::ALL, TruncationFilter::before(day("1900-01-01"))).backward(f).count(), 0);
    }

    #[test]
    fn masks_select_provenance() {
        let p = patents(&[("F", "2005-01-04"), ("G", "2003-01-07"), ("H", "2002-01-01")]);
        let cites = vec![
            ResolvedCitation { citing_id: "F".into(), cited_id: "G".into(), origin: EdgeOrigin::Grant, cited_date: None },
            ResolvedCitation {
                citing_id: "F".into(),
                cited_id: "H".into(),
                origin: EdgeOrigin::ResolvedApplication,
                cited_date: Some(day("2001-06-07")),
            },
            ResolvedCitation {
                citing_id: "F".into(),
                cited_id: "2004/1".into(),
                origin: EdgeOrigin::UnresolvedApplication,
                cited_date: None,
            },
        ];
        let ph = [PatentRecord {
            patent_id: "2004/1".into(),
            grant_date: day("2004-02-02"),
            kind: PatentKind::Other,
            is_application_placeholder: true,
        }];
        let (g, _) = build_graph(&p, &cites, &ph).unwrap();
        let f = g.node("F").unwrap();
        let count = |m| g.view(m, TruncationFilter::NONE).backward_count(f);
        assert_eq!(count(EdgeMask::GRANT), 1);
        assert_eq!(count(EdgeMask::GRANT.union(EdgeMask::RESOLVED_APPLICATION)), 2);
        assert_eq!(count(EdgeMask::ALL), 3);
        let dated: Vec<_> = g.full_view().backward_dated(f).map(|(n, d)| (g.id(n).to_string(), d)).collect();
        assert!(dated.contains(&("H".to_string(), day("2001-06-07"))));
        assert!(dated.contains(&("G".to_string(), day("2003-01-07"))));
        assert_eq!(g.kind(g.node("2004/1").unwrap()), NodeKind::Placeholder);
    }

    #[test]
    fn materialize_matches_view() {
        let p = patents(&[("F", "1980-01-01"), ("A", "1982-01-05"), ("B", "1977-01-05")]);
        let c = [CitationRow::grant("F", "P"), CitationRow::grant("F", "B"), CitationRow::grant("A", "F"), CitationRow::grant("A", "P")];
        let exo = [ExogenousDate { patent_id: "P".into(), date: day("1974-03-05") }];
        let (g, _) = build_grant_graph(&p, &c, &exo).unwrap();
        let v = g.view(EdgeMask::ALL, TruncationFilter::before(day("1976-01-01")));
        let m = v.materialize();
        for n in g.nodes() {
            assert_eq!(v.backward(n).collect::<Vec<_>>(), m.full_view().backward(n).collect::<Vec<_>>());
            assert_eq!(v.forward(n).collect::<Vec<_>>(), m.full_view().forward(n).collect::<Vec<_>>());
        }
    }
}
