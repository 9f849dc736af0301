//! File formats. Every node id in a file is an original id; the dense
//! indices used by the core crate never leave this module.
//!
//! All readers accept `#` comment lines and an optional header row (a first
//! row whose first field is not a number).

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nnsp_core::{
    FlowAssignment, GraphSignal, NodeIds, Observation, Partition, SamplingSet, TracePoint,
    WeightedGraph,
};
use sha2::{Digest, Sha256};

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input)
}

/// Data rows of a CSV source with `width` columns, header skipped.
fn rows<R: Read>(input: R, width: usize, what: &str) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut out = Vec::new();
    for (k, record) in reader(input).records().enumerate() {
        let record = record.with_context(|| format!("{what}: malformed CSV"))?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if out.is_empty() && k == 0 && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if record.len() != width {
            bail!(
                "{what}, line {line}: expected {width} fields, found {}",
                record.len()
            );
        }
        out.push((line, record));
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(
    record: &csv::StringRecord,
    i: usize,
    line: u64,
    what: &str,
) -> Result<T> {
    let raw = &record[i];
    raw.parse()
        .map_err(|_| anyhow!("{what}, line {line}: cannot parse {raw:?}"))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

/// Reads an `i,j,weight` edge list. The first endpoint becomes the head.
pub fn read_edge_list(path: &Path) -> Result<(WeightedGraph, NodeIds)> {
    parse_edge_list(open(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn parse_edge_list<R: Read>(input: R) -> Result<(WeightedGraph, NodeIds)> {
    let mut triples = Vec::new();
    for (line, r) in rows(input, 3, "edge list")? {
        triples.push((
            field(&r, 0, line, "edge list")?,
            field(&r, 1, line, "edge list")?,
            field(&r, 2, line, "edge list")?,
        ));
    }
    Ok(WeightedGraph::from_triples(&triples)?)
}

fn node(ids: &NodeIds, id: u64, line: u64, what: &str) -> Result<usize> {
    ids.internal(id)
        .ok_or_else(|| anyhow!("{what}, line {line}: node {id} is not in the graph"))
}

/// Reads a `node,cluster` file that must label every node exactly once.
/// Cluster labels are arbitrary integers, renumbered in ascending order.
pub fn read_partition(path: &Path, ids: &NodeIds) -> Result<Partition> {
    let what = "partition";
    let mut labels: Vec<Option<u64>> = vec![None; ids.len()];
    for (line, r) in rows(open(path)?, 2, what)? {
        let i = node(ids, field(&r, 0, line, what)?, line, what)?;
        if labels[i].replace(field(&r, 1, line, what)?).is_some() {
            bail!("{what}, line {line}: node {} listed twice", ids.original(i));
        }
    }
    let labels = labels
        .iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| anyhow!("{what}: node {} has no cluster", ids.original(i))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition::from_labels(&labels)?)
}

/// Reads a sampling-set file: one node id per line.
pub fn read_nodes(path: &Path, ids: &NodeIds) -> Result<SamplingSet> {
    let what = "sampling set";
    let mut nodes = Vec::new();
    for (line, r) in rows(open(path)?, 1, what)? {
        nodes.push(node(ids, field(&r, 0, line, what)?, line, what)?);
    }
    SamplingSet::new(ids.len(), nodes).with_context(|| format!("in {}", path.display()))
}

/// Reads `node,value` observations.
pub fn read_observations(path: &Path, ids: &NodeIds) -> Result<Observation> {
    let what = "observations";
    let mut pairs: Vec<(usize, f64)> = Vec::new();
    for (line, r) in rows(open(path)?, 2, what)? {
        let i = node(ids, field(&r, 0, line, what)?, line, what)?;
        if pairs.iter().any(|&(j, _)| j == i) {
            bail!(
                "{what}, line {line}: node {} observed twice",
                ids.original(i)
            );
        }
        pairs.push((i, field(&r, 1, line, what)?));
    }
    pairs.sort_by_key(|&(i, _)| i);
    let samples = SamplingSet::new(ids.len(), pairs.iter().map(|&(i, _)| i))
        .with_context(|| format!("in {}", path.display()))?;
    Ok(Observation::new(
        samples,
        pairs.into_iter().map(|(_, v)| v).collect(),
    )?)
}

/// A CSV writer over a file, or standard output when `path` is `None`.
pub fn writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(io::BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(sink))
}

pub fn write_edge_list(path: &Path, graph: &WeightedGraph, ids: &NodeIds) -> Result<()> {
    let mut w = writer(Some(path))?;
    w.write_record(["i", "j", "weight"])?;
    for e in graph.edges() {
        w.serialize((ids.original(e.head()), ids.original(e.tail()), e.weight()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_partition(path: &Path, part: &Partition, ids: &NodeIds) -> Result<()> {
    let mut w = writer(Some(path))?;
    w.write_record(["node", "cluster"])?;
    for (i, &c) in part.assignments().iter().enumerate() {
        w.serialize((ids.original(i), c))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_nodes(path: Option<&Path>, nodes: &[usize], ids: &NodeIds) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["node"])?;
    for &i in nodes {
        w.serialize([ids.original(i)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_signal(path: Option<&Path>, signal: &GraphSignal, ids: &NodeIds) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["node", "value"])?;
    for (i, v) in signal.values().iter().enumerate() {
        w.serialize((ids.original(i), v))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the signal restricted to `nodes` as `node,value`.
pub fn write_observations(
    path: &Path,
    signal: &GraphSignal,
    nodes: &[usize],
    ids: &NodeIds,
) -> Result<()> {
    let mut w = writer(Some(path))?;
    w.write_record(["node", "value"])?;
    for &i in nodes {
        w.serialize((ids.original(i), signal[i]))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace(path: &Path, trace: &[TracePoint]) -> Result<()> {
    let mut w = writer(Some(path))?;
    w.write_record(["iteration", "tv", "residual"])?;
    for p in trace {
        w.serialize((p.iteration, p.tv, p.residual))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_flow(path: &Path, flow: &FlowAssignment) -> Result<()> {
    let mut w = writer(Some(path))?;
    w.write_record(["edge_index", "flow"])?;
    for (e, f) in flow.values().iter().enumerate() {
        w.serialize((e, f))?;
    }
    w.flush()?;
    Ok(())
}

/// Hex SHA-256 of a file's bytes.
pub fn digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(format!("{:x}", Sha256::digest(bytes)))
}
