//! JSONL snapshots.
//!
//! ```text
//! {"format":"lexnorm-snapshot","version":1}
//! {"work":{ ...compact JSON-LD... }}          one per Work, URN order
//! {"edge":{"from":urn,"kind":kind,"to":urn}}  one per manual edge
//! ```
//!
//! Derived edges are never written; they are recomputed from the Works on
//! load.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{Edge, GraphError, KnowledgeGraph, NodeKey};
use crate::jsonld;
use crate::urn::LexNormUrn;

pub const SNAPSHOT_FORMAT: &str = "lexnorm-snapshot";
const SNAPSHOT_VERSION: u32 = 1;

/// Resolver base used for the `@id` of Works stored in snapshots.
pub const SNAPSHOT_BASE: &str = "https://normas.leg.br/";

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("corrupt snapshot at line {line}: {reason}")]
    CorruptSnapshot { line: usize, reason: String },
}

impl SnapshotError {
    fn io(path: &Path) -> impl FnOnce(io::Error) -> Self + '_ {
        move |source| SnapshotError::Io {
            path: path.to_owned(),
            source,
        }
    }

    fn corrupt(line: usize, reason: impl Into<String>) -> Self {
        SnapshotError::CorruptSnapshot {
            line,
            reason: reason.into(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    edge: Edge,
}

/// Writes the snapshot text to any sink.
pub fn write_snapshot<W: Write>(graph: &KnowledgeGraph, mut out: W) -> io::Result<()> {
    let header = Header {
        format: SNAPSHOT_FORMAT.into(),
        version: SNAPSHOT_VERSION,
    };
    writeln!(out, "{}", serde_json::to_string(&header)?)?;
    for work in graph.works() {
        let doc = jsonld::to_value(work, SNAPSHOT_BASE).expect("snapshot base is valid");
        let mut record = serde_json::Map::new();
        record.insert("work".into(), doc);
        writeln!(out, "{}", Value::Object(record))?;
    }
    for edge in graph.manual_edges() {
        let record = EdgeRecord { edge: edge.clone() };
        writeln!(out, "{}", serde_json::to_string(&record)?)?;
    }
    out.flush()
}

/// Writes `graph` to `destination` through a sibling temporary file.
pub fn save_snapshot(graph: &KnowledgeGraph, destination: &Path) -> Result<(), SnapshotError> {
    let mut tmp = destination.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let file = File::create(&tmp).map_err(SnapshotError::io(&tmp))?;
    write_snapshot(graph, BufWriter::new(file)).map_err(SnapshotError::io(&tmp))?;
    fs::rename(&tmp, destination).map_err(SnapshotError::io(destination))
}

pub fn load_snapshot(source: &Path) -> Result<KnowledgeGraph, SnapshotError> {
    let file = File::open(source).map_err(SnapshotError::io(source))?;
    read_snapshot(BufReader::new(file)).map_err(|e| match e {
        SnapshotError::Io { source: err, .. } => SnapshotError::Io {
            path: source.to_owned(),
            source: err,
        },
        other => other,
    })
}

/// Reads snapshot text from any buffered source.
pub fn read_snapshot<R: BufRead>(reader: R) -> Result<KnowledgeGraph, SnapshotError> {
    let mut graph = KnowledgeGraph::new();
    let mut edges: Vec<(usize, Edge)> = Vec::new();
    let mut saw_header = false;

    for (i, line) in reader.split(b'\n').enumerate() {
        let n = i + 1;
        let bytes = line.map_err(SnapshotError::io(Path::new("<snapshot>")))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| SnapshotError::corrupt(n, "line is not UTF-8"))?;
        let value: Value = serde_json::from_str(text)
            .map_err(|e| SnapshotError::corrupt(n, format!("not JSON: {e}")))?;

        if !saw_header {
            let header: Header = serde_json::from_value(value)
                .map_err(|e| SnapshotError::corrupt(n, format!("bad header: {e}")))?;
            if header.format != SNAPSHOT_FORMAT || header.version != SNAPSHOT_VERSION {
                return Err(SnapshotError::corrupt(
                    n,
                    format!("unsupported snapshot {} v{}", header.format, header.version),
                ));
            }
            saw_header = true;
            continue;
        }

        let Some(obj) = value.as_object().filter(|o| o.len() == 1) else {
            return Err(SnapshotError::corrupt(n, "expected a single-key record"));
        };
        if let Some(doc) = obj.get("work") {
            let decoded = jsonld::decode_value(doc);
            let work = decoded.work.ok_or_else(|| {
                let codes: Vec<_> = decoded
                    .findings
                    .codes()
                    .iter()
                    .map(|c| c.as_str())
                    .collect();
                SnapshotError::corrupt(n, format!("undecodable work: {}", codes.join(", ")))
            })?;
            graph.insert_unvalidated(work);
        } else if obj.contains_key("edge") {
            let record: EdgeRecord = serde_json::from_value(value)
                .map_err(|e| SnapshotError::corrupt(n, format!("bad edge: {e}")))?;
            edges.push((n, record.edge));
        } else {
            return Err(SnapshotError::corrupt(n, "unknown record type"));
        }
    }
    if !saw_header {
        return Err(SnapshotError::corrupt(1, "missing header"));
    }

    for (n, edge) in edges {
        let parse = |key: &NodeKey| {
            key.as_str()
                .parse::<LexNormUrn>()
                .map_err(|e| SnapshotError::corrupt(n, format!("edge endpoint {key}: {e}")))
        };
        let (from, to) = (parse(&edge.from)?, parse(&edge.to)?);
        if from.to_string() != edge.from.as_str() || to.to_string() != edge.to.as_str() {
            return Err(SnapshotError::corrupt(n, "edge endpoint is not canonical"));
        }
        graph
            .add_relation(&from, edge.kind, &to)
            .map_err(|e: GraphError| SnapshotError::corrupt(n, e.to_string()))?;
    }
    Ok(graph)
}
