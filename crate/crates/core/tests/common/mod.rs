#![allow(dead_code)]

use cdgraph::graph::{CitationGraph, GraphBuilder};
use cdgraph::ingest::{EdgeOrigin, PatentKind, PatentRecord};
use cdgraph::Day;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn day(s: &str) -> Day {
    Day::parse(s).unwrap()
}

/// Random graph mixing every node kind and edge provenance. Dates cluster
/// around the 1976 cutoff so truncation matters; a few exogenous nodes stay
/// undated, and some edges point forward in time.
pub fn random_graph(seed: u64, max_nodes: usize, max_edges: usize) -> CitationGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_nodes);
    let patents = rng.random_range(1..=n);
    let lo = day("1966-01-01").0;
    let hi = day("1990-12-31").0;
    // coarse dates produce ties on the window boundaries
    let date = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.5) {
            Day::end_of_year(rng.random_range(1966..=1990))
        } else {
            Day(rng.random_range(lo..=hi))
        }
    };
    let mut b = GraphBuilder::new();
    let mut citing = Vec::new();
    for i in 0..patents {
        let id = format!("{}", 4_000_000 + i);
        let kind = if rng.random_bool(0.9) { PatentKind::Utility } else { PatentKind::Other };
        let placeholder = rng.random_bool(0.05);
        b.add_patent(&PatentRecord {
            patent_id: id.clone(),
            grant_date: date(&mut rng),
            kind,
            is_application_placeholder: placeholder,
        });
        if !placeholder {
            citing.push(id);
        }
    }
    let others: Vec<String> = (patents..n).map(|i| format!("{}", 2_000_000 + i)).collect();
    let mut dated: Vec<(String, Day)> = Vec::new();
    for id in &others {
        if rng.random_bool(0.9) {
            dated.push((id.clone(), date(&mut rng)));
        }
    }
    b.add_exogenous_dates(dated.iter().map(|(id, d)| (id.as_str(), *d)));
    let all: Vec<String> = (0..patents).map(|i| format!("{}", 4_000_000 + i)).chain(others).collect();
    if !citing.is_empty() {
        let m = rng.random_range(0..=max_edges);
        for _ in 0..m {
            let src = &citing[rng.random_range(0..citing.len())];
            let dst = &all[rng.random_range(0..all.len())];
            let origin = match rng.random_range(0..10) {
                0 => EdgeOrigin::ResolvedApplication,
                1 => EdgeOrigin::UnresolvedApplication,
                _ => EdgeOrigin::Grant,
            };
            let edge_date = (origin != EdgeOrigin::Grant && rng.random_bool(0.5)).then(|| date(&mut rng));
            b.add_citation(src, dst, origin, edge_date);
        }
    }
    b.finish().unwrap().0
}
