//! Citation-graph engine for the CD_t consolidation/disruption index of patents.
//!
//! The crate is organised as a pipeline:
//!
//! * [`ingest`] parses PatentsView-shaped delimited files into validated tables
//!   and resolves citations to published applications.
//! * [`pipeline`] wires the parsers together into one graph build.
//! * [`graph`] interns those tables into an immutable compressed citation graph
//!   with per-node dates, and exposes methodology-filtered views of it.
//! * [`cd`] computes the index per focal patent (single or batch, parallel).
//! * [`oracle`] is a literal, slow reference implementation used for auditing.
//! * [`results`] is the per-focal CSV format.
//! * [`analytics`] reduces per-focal results into yearly tables and matrices.
//! * [`synth`] generates seeded synthetic populations in the ingest file formats.

pub mod analytics;
pub mod cache;
pub mod cd;
pub mod date;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod oracle;
pub mod pipeline;
pub mod results;
pub mod synth;

pub use date::Day;
pub use error::{Error, Result};

pub use cd::{cd_batch, cd_index, classify_citers, focal_set, window_end, CdConfig, CdEngine, FocalResult, Methodology, WindowRule};
pub use graph::{build_graph, CitationGraph, EdgeMask, GraphView, NodeId, TruncationFilter};
