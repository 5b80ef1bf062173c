//! Literal reference implementation of the index, for auditing single
//! patents and for checking [`crate::cd`] on small graphs.
//!
//! Every node of the graph is visited; window membership is decided from
//! dates directly and f/b from each candidate's full filtered backward set
//! compared against the focal's. No forward adjacency, index ranges or
//! scratch arrays are involved.

use std::collections::BTreeSet;

use crate::cd::{window_end, CdConfig, CiterClass, FocalResult, UndefinedReason};
use crate::graph::{CitationGraph, NodeId};

/// Filtered backward sets of every node, computed once per graph and config.
pub struct NaiveOracle<'g> {
    graph: &'g CitationGraph,
    config: CdConfig,
    backward: Vec<BTreeSet<NodeId>>,
}

impl<'g> NaiveOracle<'g> {
    pub fn new(graph: &'g CitationGraph, config: &CdConfig) -> Self {
        let view = config.view(graph);
        NaiveOracle {
            graph,
            config: *config,
            backward: graph.nodes().map(|v| view.backward(v).collect()).collect(),
        }
    }

    pub fn classify(&self, focal: NodeId) -> Result<Vec<CiterClass>, UndefinedReason> {
        let (graph, config) = (self.graph, &self.config);
        let focal_date = graph.date(focal);
        if !focal_date.is_dated() {
            return Err(UndefinedReason::UndatedFocal);
        }
        let end = window_end(focal_date, config.window_years, config.window_rule);
        let predecessors = &self.backward[focal as usize];
        let mut out = Vec::new();
        for i in graph.nodes() {
            let d = graph.date(i);
            if !(d > focal_date && d <= end) || !config.admits_citer(graph.kind(i)) {
                continue;
            }
            let cited = &self.backward[i as usize];
            let f = cited.contains(&focal);
            let b = !cited.is_disjoint(predecessors);
            if f || b {
                out.push(CiterClass { citer: i, f, b });
            }
        }
        Ok(out)
    }

    pub fn compute(&self, focal: NodeId) -> FocalResult {
        let Ok(citers) = self.classify(focal) else {
            return FocalResult::undated(focal);
        };
        let mut r = FocalResult {
            focal,
            n_f: 0,
            n_b: 0,
            n_r: 0,
            backward_count: self.backward[focal as usize].len() as u32,
            focal_dated: true,
        };
        for c in citers {
            match (c.f, c.b) {
                (true, false) => r.n_f += 1,
                (true, true) => r.n_b += 1,
                (false, true) => r.n_r += 1,
                (false, false) => unreachable!("non-citers are not collected"),
            }
        }
        r
    }
}

pub fn classify_naive(graph: &CitationGraph, config: &CdConfig, focal: NodeId) -> Result<Vec<CiterClass>, UndefinedReason> {
    NaiveOracle::new(graph, config).classify(focal)
}

pub fn cd_naive(graph: &CitationGraph, config: &CdConfig, focal: NodeId) -> FocalResult {
    NaiveOracle::new(graph, config).compute(focal)
}

pub fn cd_naive_batch(graph: &CitationGraph, config: &CdConfig, focals: &[NodeId]) -> Vec<FocalResult> {
    let oracle = NaiveOracle::new(graph, config);
    focals.iter().map(|&f| oracle.compute(f)).collect()
}
