//! Toolkit for Brazilian legal norms described as schema.org `Legislation`
//! Works: LEX URN handling, a deterministic JSON-LD codec, an in-memory
//! knowledge graph with JSONL snapshots, bulk ingest, and a Linked Data
//! server that makes each Work's URI dereferenceable.

pub mod cli;
pub mod corpus;
pub mod finding;
pub mod graph;
pub mod ingest;
pub mod jsonld;
pub mod norm;
pub mod server;
pub mod urn;

pub use finding::{FindingCode, Severity, ValidationFinding, ValidationReport};
pub use graph::{Edge, GraphStats, KnowledgeGraph, NodeKey, RelationKind, SharedGraph};
pub use jsonld::{emit_document, parse_document, semantically_equal, DecodeReport, JsonLdDocument};
pub use norm::{display_name, validate_norm, NormWork};
pub use urn::{
    format_urn, normalize_urn, parse_urn, resolver_uri, LexNormUrn, LexUrn, LexVocabUrn,
};
