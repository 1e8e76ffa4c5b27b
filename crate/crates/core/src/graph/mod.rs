//! In-memory legal knowledge graph.
//!
//! Work nodes are keyed by their canonical norm URN. Edges derived from a
//! Work's properties (`sameAs`, `about`, type, jurisdiction, passing and
//! publishing bodies) are recomputed on every upsert; inter-norm relations
//! (`cites`, `amends`, `repeals`, `related`) are added explicitly and survive
//! re-upserts of their endpoints.

mod snapshot;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finding::ValidationReport;
use crate::norm::{self, NormWork};
use crate::urn::{LexNormUrn, LexVocabUrn};

pub use snapshot::{
    load_snapshot, read_snapshot, save_snapshot, write_snapshot, SnapshotError, SNAPSHOT_BASE,
    SNAPSHOT_FORMAT,
};

/// Canonical identifier of a graph node: a normalized LEX URN or an
/// absolute URI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeKey(String);

impl NodeKey {
    pub fn norm(urn: &LexNormUrn) -> Self {
        Self(urn.to_string())
    }

    pub fn vocab(urn: &LexVocabUrn) -> Self {
        Self(urn.to_string())
    }

    pub fn uri(uri: impl Into<String>) -> Self {
        Self(uri.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    SameAs,
    About,
    HasType,
    Jurisdiction,
    PassedBy,
    PublishedBy,
    Cites,
    Amends,
    Repeals,
    Related,
}

impl RelationKind {
    pub const ALL: [RelationKind; 10] = [
        RelationKind::SameAs,
        RelationKind::About,
        RelationKind::HasType,
        RelationKind::Jurisdiction,
        RelationKind::PassedBy,
        RelationKind::PublishedBy,
        RelationKind::Cites,
        RelationKind::Amends,
        RelationKind::Repeals,
        RelationKind::Related,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::SameAs => "same_as",
            RelationKind::About => "about",
            RelationKind::HasType => "has_type",
            RelationKind::Jurisdiction => "jurisdiction",
            RelationKind::PassedBy => "passed_by",
            RelationKind::PublishedBy => "published_by",
            RelationKind::Cites => "cites",
            RelationKind::Amends => "amends",
            RelationKind::Repeals => "repeals",
            RelationKind::Related => "related",
        }
    }

    /// Kinds computed from Work properties; they cannot be added by hand.
    pub fn is_derived(self) -> bool {
        !matches!(
            self,
            RelationKind::Cites
                | RelationKind::Amends
                | RelationKind::Repeals
                | RelationKind::Related
        )
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown relation kind `{0}`")]
pub struct UnknownKind(pub String);

impl FromStr for RelationKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownKind(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeKey,
    pub kind: RelationKind,
    pub to: NodeKey,
}

impl Edge {
    fn new(from: &NodeKey, kind: RelationKind, to: NodeKey) -> Self {
        Self {
            from: from.clone(),
            kind,
            to,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Outgoing,
    Incoming,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Neighbor {
    pub kind: RelationKind,
    pub node: NodeKey,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub work_count: usize,
    pub external_node_count: usize,
    /// Every kind is present, zero or not.
    pub edge_count_by_kind: BTreeMap<RelationKind, usize>,
}

impl GraphStats {
    pub fn edge_count(&self) -> usize {
        self.edge_count_by_kind.values().sum()
    }

    pub fn count(&self, kind: RelationKind) -> usize {
        self.edge_count_by_kind.get(&kind).copied().unwrap_or(0)
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("work fails validation with {} error(s)", .0.error_count())]
    InvalidWork(ValidationReport),
    #[error("no work stored under {0}")]
    UnknownEndpoint(String),
    #[error("`{0}` edges are derived from work properties and cannot be added by hand")]
    ForbiddenKind(RelationKind),
    #[error("`{kind}` edge from {node} to itself")]
    SelfLoop { node: String, kind: RelationKind },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeGraph {
    works: BTreeMap<NodeKey, NormWork>,
    derived: BTreeMap<NodeKey, BTreeSet<Edge>>,
    manual: BTreeSet<Edge>,
}

/// Edges implied by a Work's own properties.
pub fn derive_edges(work: &NormWork) -> BTreeSet<Edge> {
    let key = NodeKey::norm(&work.urn);
    let mut edges = BTreeSet::new();
    for uri in &work.same_as {
        edges.insert(Edge::new(&key, RelationKind::SameAs, NodeKey::uri(uri)));
    }
    for term in &work.about {
        edges.insert(Edge::new(&key, RelationKind::About, NodeKey::vocab(term)));
    }
    edges.insert(Edge::new(
        &key,
        RelationKind::HasType,
        NodeKey::vocab(&work.legislation_type),
    ));
    if let Some(area) = &work.legislation_jurisdiction {
        edges.insert(Edge::new(
            &key,
            RelationKind::Jurisdiction,
            NodeKey::uri(&area.id),
        ));
    }
    if let Some(org) = &work.legislation_passed_by {
        edges.insert(Edge::new(
            &key,
            RelationKind::PassedBy,
            NodeKey::uri(&org.id),
        ));
    }
    if let Some(org) = &work.publisher {
        edges.insert(Edge::new(
            &key,
            RelationKind::PublishedBy,
            NodeKey::uri(&org.id),
        ));
    }
    edges.retain(|e| e.to != key);
    edges
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces the Work stored under its canonical URN.
    pub fn upsert_norm(&mut self, work: NormWork) -> Result<NodeKey, GraphError> {
        let report = norm::validate_norm(&work);
        if !report.is_valid() {
            return Err(GraphError::InvalidWork(report));
        }
        Ok(self.insert_unvalidated(work))
    }

    /// Upsert without the validation gate. Used by lenient ingest and by
    /// snapshot loading, whose records were already decoded.
    pub(crate) fn insert_unvalidated(&mut self, work: NormWork) -> NodeKey {
        let key = NodeKey::norm(&work.urn);
        self.derived.insert(key.clone(), derive_edges(&work));
        self.works.insert(key.clone(), work);
        key
    }

    pub fn add_relation(
        &mut self,
        from: &LexNormUrn,
        kind: RelationKind,
        to: &LexNormUrn,
    ) -> Result<Edge, GraphError> {
        if kind.is_derived() {
            return Err(GraphError::ForbiddenKind(kind));
        }
        let from_key = NodeKey::norm(from);
        let to_key = NodeKey::norm(to);
        for k in [&from_key, &to_key] {
            if !self.works.contains_key(k) {
                return Err(GraphError::UnknownEndpoint(k.to_string()));
            }
        }
        if from_key == to_key && kind != RelationKind::Related {
            return Err(GraphError::SelfLoop {
                node: from_key.to_string(),
                kind,
            });
        }
        let edge = Edge {
            from: from_key,
            kind,
            to: to_key,
        };
        self.manual.insert(edge.clone());
        Ok(edge)
    }

    pub fn get_norm(&self, urn: &LexNormUrn) -> Option<&NormWork> {
        self.works.get(&NodeKey::norm(urn))
    }

    pub fn contains(&self, urn: &LexNormUrn) -> bool {
        self.works.contains_key(&NodeKey::norm(urn))
    }

    /// Incoming and outgoing edges of a Work, ordered by kind then key.
    pub fn neighbors(
        &self,
        urn: &LexNormUrn,
        filter: Option<RelationKind>,
    ) -> Result<Vec<Neighbor>, GraphError> {
        let key = NodeKey::norm(urn);
        if !self.works.contains_key(&key) {
            return Err(GraphError::UnknownEndpoint(key.to_string()));
        }
        let mut out: Vec<Neighbor> = self
            .edges()
            .filter(|e| filter.is_none_or(|k| e.kind == k))
            .flat_map(|e| {
                let mut hits = Vec::with_capacity(2);
                if e.from == key {
                    hits.push(Neighbor {
                        kind: e.kind,
                        node: e.to.clone(),
                        direction: Direction::Outgoing,
                    });
                }
                if e.to == key {
                    hits.push(Neighbor {
                        kind: e.kind,
                        node: e.from.clone(),
                        direction: Direction::Incoming,
                    });
                }
                hits
            })
            .collect();
        out.sort();
        Ok(out)
    }

    pub fn stats(&self) -> GraphStats {
        let mut by_kind: BTreeMap<RelationKind, usize> =
            RelationKind::ALL.into_iter().map(|k| (k, 0)).collect();
        let mut external = BTreeSet::new();
        for edge in self.edges() {
            *by_kind.entry(edge.kind).or_default() += 1;
            for end in [&edge.from, &edge.to] {
                if !self.works.contains_key(end) {
                    external.insert(end);
                }
            }
        }
        GraphStats {
            work_count: self.works.len(),
            external_node_count: external.len(),
            edge_count_by_kind: by_kind,
        }
    }

    pub fn works(&self) -> impl Iterator<Item = &NormWork> {
        self.works.values()
    }

    pub fn work_keys(&self) -> impl Iterator<Item = &NodeKey> {
        self.works.keys()
    }

    pub fn derived_edges(&self) -> impl Iterator<Item = &Edge> {
        self.derived.values().flatten()
    }

    pub fn manual_edges(&self) -> impl Iterator<Item = &Edge> {
        self.manual.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.derived_edges().chain(self.manual_edges())
    }

    pub fn is_empty(&self) -> bool {
        self.works.is_empty()
    }
}

/// Single-writer, many-reader handle. Readers take an immutable snapshot
/// that stays consistent for as long as they hold it; writers publish a new
/// graph atomically.
#[derive(Debug, Clone, Default)]
pub struct SharedGraph {
    current: Arc<RwLock<Arc<KnowledgeGraph>>>,
    writer: Arc<Mutex<()>>,
}

impl SharedGraph {
    pub fn new(graph: KnowledgeGraph) -> Self {
        Self {
            current: Arc::new(RwLock::new(Arc::new(graph))),
            writer: Arc::default(),
        }
    }

    pub fn snapshot(&self) -> Arc<KnowledgeGraph> {
        Arc::clone(&self.current.read().unwrap_or_else(|e| e.into_inner()))
    }

    pub fn publish(&self, graph: KnowledgeGraph) {
        let _w = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(graph);
    }

    /// Applies `f` to a copy of the current graph and publishes the result.
    pub fn update<T>(&self, f: impl FnOnce(&mut KnowledgeGraph) -> T) -> T {
        let _w = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut next = (*self.snapshot()).clone();
        let out = f(&mut next);
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(next);
        out
    }
}
