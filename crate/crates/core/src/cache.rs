//! Binary graph cache.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic      "CDG1"
//! version    u32
//! nodes      u64 (n)
//! edges      u64 (m)
//! ids        n × (u32 byte length, UTF-8 bytes)
//! dates      n × i32   days since 1970-01-01, i32::MIN = undated
//! kinds      n × u8    0 utility, 1 other patent, 2 exogenous, 3 placeholder
//! offsets    (n+1) × u64  backward CSR offsets
//! targets    m × u32   backward CSR targets
//! flags      m × u8    provenance bits: 1 grant, 2 resolved app, 4 unresolved app
//! edge dates m × i32   per-edge date, i32::MIN = none
//! ```
//!
//! Forward adjacency and the id index are rebuilt on load.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::date::Day;
use crate::error::{Error, Result};
use crate::graph::{CitationGraph, NodeId, NodeKind};

pub const MAGIC: &[u8; 4] = b"CDG1";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_graph<W: Write>(out: W, graph: &CitationGraph) -> Result<()> {
    let mut w = BufWriter::new(out);
    let (ids, dates, kinds, offsets, targets, flags, edge_dates) = graph.sections();
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(ids.len() as u64).to_le_bytes())?;
    w.write_all(&(targets.len() as u64).to_le_bytes())?;
    for id in ids {
        w.write_all(&(id.len() as u32).to_le_bytes())?;
        w.write_all(id.as_bytes())?;
    }
    for d in dates {
        w.write_all(&d.0.to_le_bytes())?;
    }
    w.write_all(&kinds.iter().map(|&k| k as u8).collect::<Vec<_>>())?;
    for &o in offsets {
        w.write_all(&(o as u64).to_le_bytes())?;
    }
    for t in targets {
        w.write_all(&t.to_le_bytes())?;
    }
    w.write_all(flags)?;
    for d in edge_dates {
        w.write_all(&d.0.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_vec<R: Read, const N: usize, T>(r: &mut R, count: usize, decode: impl Fn([u8; N]) -> T) -> Result<Vec<T>> {
    let mut bytes = vec![0u8; count.checked_mul(N).ok_or_else(|| Error::Cache("section too large".into()))?];
    r.read_exact(&mut bytes)?;
    Ok(bytes
        .chunks_exact(N)
        .map(|c| decode(c.try_into().expect("exact chunk")))
        .collect())
}

pub fn read_graph<R: Read>(input: R) -> Result<CitationGraph> {
    let mut r = BufReader::new(input);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Cache("not a graph cache (bad magic)".into()));
    }
    let header = read_vec(&mut r, 1, u32::from_le_bytes)?;
    if header[0] != FORMAT_VERSION {
        return Err(Error::Cache(format!("unsupported format version {}", header[0])));
    }
    let sizes = read_vec(&mut r, 2, u64::from_le_bytes)?;
    let (n, m) = (sizes[0] as usize, sizes[1] as usize);
    if n > u32::MAX as usize {
        return Err(Error::Cache("node count exceeds u32".into()));
    }
    let mut ids = Vec::with_capacity(n);
    for _ in 0..n {
        let len = read_vec(&mut r, 1, u32::from_le_bytes)?[0] as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf)?;
        let s = String::from_utf8(buf).map_err(|_| Error::Cache("node id is not UTF-8".into()))?;
        ids.push(s.into_boxed_str());
    }
    let dates = read_vec(&mut r, n, |b| Day(i32::from_le_bytes(b)))?;
    let kinds = read_vec(&mut r, n, |b: [u8; 1]| NodeKind::from_u8(b[0]))?
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Cache("unknown node kind".into()))?;
    let offsets = read_vec(&mut r, n + 1, |b| u64::from_le_bytes(b) as usize)?;
    let targets: Vec<NodeId> = read_vec(&mut r, m, u32::from_le_bytes)?;
    let flags = read_vec(&mut r, m, |b: [u8; 1]| b[0])?;
    let edge_dates = read_vec(&mut r, m, |b| Day(i32::from_le_bytes(b)))?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Cache("trailing bytes after edge dates".into()));
    }
    CitationGraph::from_parts(ids, dates, kinds, offsets, targets, flags, edge_dates)
}

pub fn save(path: &Path, graph: &CitationGraph) -> Result<()> {
    write_graph(File::create(path)?, graph)
}

pub fn load(path: &Path) -> Result<CitationGraph> {
    read_graph(File::open(path)?)
}
