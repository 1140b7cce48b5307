//! The weighted social graph.
//!
//! Profiles, undirected relationship edges, and each profile's localized
//! data-set: a per-neighbor table of accepted incoming, accepted outgoing,
//! and rejected interaction counts. Edge weights (trust values) are never
//! stored; they are derived on demand from the counters.

use std::collections::BTreeMap;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::profile::{ProfileId, RelationshipKind};

pub const SNAPSHOT_FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown profile {0:?}")]
    UnknownProfile(String),
    #[error("self-edges are not allowed: {0:?}")]
    SelfEdge(String),
    #[error("self-interactions are not allowed: {0:?}")]
    SelfInteraction(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SnapshotError {
    #[error("snapshot syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported snapshot format_version {0}")]
    Version(u64),
    #[error("invalid snapshot at {path}: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> SnapshotError {
    SnapshotError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

/// One row of a localized data-set: activity counters for a single neighbor.
///
/// `incoming` counts accepted interactions initiated by the neighbor toward
/// the owner, `outgoing` counts accepted interactions initiated by the owner,
/// and `rejected` is an audit counter of the neighbor's interactions this
/// engine refused. Rejected interactions never move `incoming`, so a blocked
/// sender's trust ratio stays where it was when blocking began.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ActivityRecord {
    pub incoming: u64,
    pub outgoing: u64,
    pub rejected: u64,
}

impl ActivityRecord {
    pub fn is_empty(&self) -> bool {
        *self == ActivityRecord::default()
    }
}

/// A profile's per-neighbor activity table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LocalizedDataSet {
    rows: BTreeMap<ProfileId, ActivityRecord>,
}

impl LocalizedDataSet {
    pub fn row(&self, neighbor: &ProfileId) -> Option<&ActivityRecord> {
        self.rows.get(neighbor)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&ProfileId, &ActivityRecord)> {
        self.rows.iter()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Aggregate totals over a graph, used by the `stats` surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GraphStats {
    pub profiles: u64,
    pub edges: u64,
    pub rows: u64,
    pub accepted_interactions: u64,
    pub rejected_interactions: u64,
}

/// The social graph with localized data-sets.
///
/// Mutations preserve two invariants: counters are monotone non-decreasing,
/// and the dual records of a pair always agree
/// (`datasets[x].rows[y].outgoing == datasets[y].rows[x].incoming`).
/// Rows are created in mirrored pairs, so one side's row existing implies
/// the other's.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SocialGraph {
    // Key set of `datasets` is the profile registry; `adjacency` mirrors it
    // and stores each undirected edge in both directions.
    adjacency: BTreeMap<ProfileId, BTreeMap<ProfileId, RelationshipKind>>,
    datasets: BTreeMap<ProfileId, LocalizedDataSet>,
}

impl SocialGraph {
    pub fn new() -> Self {
        SocialGraph::default()
    }

    /// Registers a profile. Idempotent; returns whether it was new.
    pub fn add_profile(&mut self, id: ProfileId) -> bool {
        if self.datasets.contains_key(&id) {
            return false;
        }
        self.adjacency.insert(id.clone(), BTreeMap::new());
        self.datasets.insert(id, LocalizedDataSet::default());
        true
    }

    pub fn contains_profile(&self, id: &ProfileId) -> bool {
        self.datasets.contains_key(id)
    }

    pub fn profiles(&self) -> impl Iterator<Item = &ProfileId> {
        self.datasets.keys()
    }

    pub fn profile_count(&self) -> usize {
        self.datasets.len()
    }

    pub fn dataset(&self, owner: &ProfileId) -> Option<&LocalizedDataSet> {
        self.datasets.get(owner)
    }

    /// The owner's activity record for a neighbor; absent rows read as zeros.
    pub fn activity(&self, owner: &ProfileId, neighbor: &ProfileId) -> ActivityRecord {
        self.datasets
            .get(owner)
            .and_then(|ds| ds.row(neighbor))
            .copied()
            .unwrap_or_default()
    }

    /// Adds the undirected edge {x, y}, creating empty mirrored rows.
    /// Idempotent: reconnecting an existing edge keeps its original kind.
    pub fn connect(
        &mut self,
        x: &ProfileId,
        y: &ProfileId,
        kind: RelationshipKind,
    ) -> Result<bool, GraphError> {
        if x == y {
            return Err(GraphError::SelfEdge(x.to_string()));
        }
        self.require_profile(x)?;
        self.require_profile(y)?;
        if self.is_connected(x, y) {
            return Ok(false);
        }
        self.adjacency
            .get_mut(x)
            .unwrap()
            .insert(y.clone(), kind.clone());
        self.adjacency.get_mut(y).unwrap().insert(x.clone(), kind);
        self.ensure_rows(x, y);
        Ok(true)
    }

    /// True iff the edge {x, y} exists. Unknown profiles simply yield false.
    pub fn is_connected(&self, x: &ProfileId, y: &ProfileId) -> bool {
        self.adjacency.get(x).is_some_and(|n| n.contains_key(y))
    }

    /// Neighbors of `x` in ascending `ProfileId` order.
    pub fn neighbors(&self, x: &ProfileId) -> impl Iterator<Item = &ProfileId> {
        self.adjacency.get(x).into_iter().flat_map(|n| n.keys())
    }

    pub fn edge_kind(&self, x: &ProfileId, y: &ProfileId) -> Option<&RelationshipKind> {
        self.adjacency.get(x).and_then(|n| n.get(y))
    }

    /// All undirected edges as (a, b, kind) with a < b, in (a, b) order.
    pub fn edges(&self) -> impl Iterator<Item = (&ProfileId, &ProfileId, &RelationshipKind)> {
        self.adjacency
            .iter()
            .flat_map(|(a, nbrs)| nbrs.iter().map(move |(b, kind)| (a, b, kind)))
            .filter(|(a, b, _)| a < b)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeMap::len).sum::<usize>() / 2
    }

    /// Records one accepted interaction src -> dst: bumps src's outgoing and
    /// dst's incoming counters together.
    pub fn apply_accepted_interaction(
        &mut self,
        src: &ProfileId,
        dst: &ProfileId,
    ) -> Result<(), GraphError> {
        if src == dst {
            return Err(GraphError::SelfInteraction(src.to_string()));
        }
        self.require_profile(src)?;
        self.require_profile(dst)?;
        self.ensure_rows(src, dst);
        self.row_mut(src, dst).outgoing += 1;
        self.row_mut(dst, src).incoming += 1;
        Ok(())
    }

    /// Records one rejected interaction src -> dst in dst's audit counter.
    pub fn record_rejected(&mut self, src: &ProfileId, dst: &ProfileId) -> Result<(), GraphError> {
        if src == dst {
            return Err(GraphError::SelfInteraction(src.to_string()));
        }
        self.require_profile(src)?;
        self.require_profile(dst)?;
        self.ensure_rows(src, dst);
        self.row_mut(dst, src).rejected += 1;
        Ok(())
    }

    pub fn stats(&self) -> GraphStats {
        let mut rows = 0u64;
        let mut accepted = 0u64;
        let mut rejected = 0u64;
        for ds in self.datasets.values() {
            for (_, rec) in ds.rows() {
                rows += 1;
                accepted += rec.incoming;
                rejected += rec.rejected;
            }
        }
        GraphStats {
            profiles: self.profile_count() as u64,
            edges: self.edge_count() as u64,
            rows,
            accepted_interactions: accepted,
            rejected_interactions: rejected,
        }
    }

    fn require_profile(&self, id: &ProfileId) -> Result<(), GraphError> {
        if self.contains_profile(id) {
            Ok(())
        } else {
            Err(GraphError::UnknownProfile(id.to_string()))
        }
    }

    // Rows always exist in mirrored pairs.
    fn ensure_rows(&mut self, x: &ProfileId, y: &ProfileId) {
        self.datasets
            .get_mut(x)
            .unwrap()
            .rows
            .entry(y.clone())
            .or_default();
        self.datasets
            .get_mut(y)
            .unwrap()
            .rows
            .entry(x.clone())
            .or_default();
    }

    fn row_mut(&mut self, owner: &ProfileId, neighbor: &ProfileId) -> &mut ActivityRecord {
        self.datasets
            .get_mut(owner)
            .unwrap()
            .rows
            .get_mut(neighbor)
            .unwrap()
    }

    /// Canonical snapshot document. Equal graphs serialize to identical
    /// bytes: keys and lists are emitted in sorted order and the document is
    /// newline-terminated.
    pub fn to_snapshot(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_snapshot_value())
            .expect("snapshot serialization cannot fail");
        out.push('\n');
        out
    }

    /// Snapshot as a JSON value. Keys are inserted in sorted order so the
    /// rendering is canonical regardless of serde_json's map backend.
    pub fn to_snapshot_value(&self) -> Value {
        let mut root = Map::new();
        let mut datasets = Map::new();
        for (owner, ds) in &self.datasets {
            let mut rows = Map::new();
            for (neighbor, rec) in ds.rows() {
                let mut row = Map::new();
                row.insert("in".into(), rec.incoming.into());
                row.insert("out".into(), rec.outgoing.into());
                row.insert("rej".into(), rec.rejected.into());
                rows.insert(neighbor.to_string(), Value::Object(row));
            }
            datasets.insert(owner.to_string(), Value::Object(rows));
        }
        root.insert("datasets".into(), Value::Object(datasets));

        let edges: Vec<Value> = self
            .edges()
            .map(|(a, b, kind)| {
                let mut edge = Map::new();
                edge.insert("a".into(), a.to_string().into());
                edge.insert("b".into(), b.to_string().into());
                edge.insert("kind".into(), kind.to_string().into());
                Value::Object(edge)
            })
            .collect();
        root.insert("edges".into(), Value::Array(edges));
        root.insert("format_version".into(), SNAPSHOT_FORMAT_VERSION.into());
        root.insert(
            "profiles".into(),
            Value::Array(self.profiles().map(|p| p.to_string().into()).collect()),
        );
        Value::Object(root)
    }

    pub fn from_snapshot(text: &str) -> Result<Self, SnapshotError> {
        let value: Value = serde_json::from_str(text).map_err(|e| SnapshotError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_snapshot_value(&value)
    }

    pub fn from_snapshot_value(value: &Value) -> Result<Self, SnapshotError> {
        let root = value
            .as_object()
            .ok_or_else(|| invalid("/", "snapshot must be a JSON object"))?;
        for key in root.keys() {
            if !matches!(
                key.as_str(),
                "datasets" | "edges" | "format_version" | "profiles"
            ) {
                return Err(invalid(format!("/{key}"), "unknown key"));
            }
        }

        let version = root
            .get("format_version")
            .ok_or_else(|| invalid("/format_version", "missing"))?
            .as_u64()
            .ok_or_else(|| invalid("/format_version", "must be an unsigned integer"))?;
        if version != SNAPSHOT_FORMAT_VERSION {
            return Err(SnapshotError::Version(version));
        }

        let mut graph = SocialGraph::new();

        let profiles = root
            .get("profiles")
            .ok_or_else(|| invalid("/profiles", "missing"))?
            .as_array()
            .ok_or_else(|| invalid("/profiles", "must be an array"))?;
        for (i, p) in profiles.iter().enumerate() {
            let path = format!("/profiles/{i}");
            let id = parse_id(p, &path)?;
            if !graph.add_profile(id) {
                return Err(invalid(path, "duplicate profile"));
            }
        }

        let edges = root
            .get("edges")
            .ok_or_else(|| invalid("/edges", "missing"))?
            .as_array()
            .ok_or_else(|| invalid("/edges", "must be an array"))?;
        for (i, e) in edges.iter().enumerate() {
            let path = format!("/edges/{i}");
            let obj = e
                .as_object()
                .ok_or_else(|| invalid(&path, "edge must be an object"))?;
            for key in obj.keys() {
                if !matches!(key.as_str(), "a" | "b" | "kind") {
                    return Err(invalid(format!("{path}/{key}"), "unknown key"));
                }
            }
            let a = parse_id(
                obj.get("a")
                    .ok_or_else(|| invalid(format!("{path}/a"), "missing"))?,
                &format!("{path}/a"),
            )?;
            let b = parse_id(
                obj.get("b")
                    .ok_or_else(|| invalid(format!("{path}/b"), "missing"))?,
                &format!("{path}/b"),
            )?;
            let kind = obj
                .get("kind")
                .ok_or_else(|| invalid(format!("{path}/kind"), "missing"))?
                .as_str()
                .ok_or_else(|| invalid(format!("{path}/kind"), "must be a string"))?;
            let kind = RelationshipKind::new(kind)
                .map_err(|e| invalid(format!("{path}/kind"), e.to_string()))?;
            if graph.is_connected(&a, &b) {
                return Err(invalid(&path, "duplicate edge"));
            }
            graph
                .connect(&a, &b, kind)
                .map_err(|e| invalid(&path, e.to_string()))?;
        }

        let datasets = root
            .get("datasets")
            .ok_or_else(|| invalid("/datasets", "missing"))?
            .as_object()
            .ok_or_else(|| invalid("/datasets", "must be an object"))?;
        for (owner_raw, rows) in datasets {
            let path = format!("/datasets/{owner_raw}");
            let owner =
                ProfileId::new(owner_raw.clone()).map_err(|e| invalid(&path, e.to_string()))?;
            if !graph.contains_profile(&owner) {
                return Err(invalid(&path, "unknown profile"));
            }
            let rows = rows
                .as_object()
                .ok_or_else(|| invalid(&path, "must be an object"))?;
            for (neighbor_raw, row) in rows {
                let path = format!("{path}/{neighbor_raw}");
                let neighbor = ProfileId::new(neighbor_raw.clone())
                    .map_err(|e| invalid(&path, e.to_string()))?;
                if !graph.contains_profile(&neighbor) {
                    return Err(invalid(&path, "unknown profile"));
                }
                if neighbor == owner {
                    return Err(invalid(&path, "row must not reference its owner"));
                }
                let row = row
                    .as_object()
                    .ok_or_else(|| invalid(&path, "row must be an object"))?;
                for key in row.keys() {
                    if !matches!(key.as_str(), "in" | "out" | "rej") {
                        return Err(invalid(format!("{path}/{key}"), "unknown key"));
                    }
                }
                let rec = ActivityRecord {
                    incoming: parse_counter(row, "in", &path)?,
                    outgoing: parse_counter(row, "out", &path)?,
                    rejected: parse_counter(row, "rej", &path)?,
                };
                graph
                    .datasets
                    .get_mut(&owner)
                    .unwrap()
                    .rows
                    .insert(neighbor, rec);
            }
        }

        graph.check_consistency()?;
        Ok(graph)
    }

    // Validates the mirrored-row and dual-record invariants after a load.
    fn check_consistency(&self) -> Result<(), SnapshotError> {
        for (owner, ds) in &self.datasets {
            for (neighbor, rec) in ds.rows() {
                let mirror = self
                    .datasets
                    .get(neighbor)
                    .and_then(|ds| ds.row(owner))
                    .ok_or_else(|| {
                        invalid(
                            format!("/datasets/{neighbor}/{owner}"),
                            "missing mirror row",
                        )
                    })?;
                if rec.outgoing != mirror.incoming {
                    return Err(invalid(
                        format!("/datasets/{owner}/{neighbor}"),
                        format!(
                            "dual-record mismatch: outgoing {} != mirror incoming {}",
                            rec.outgoing, mirror.incoming
                        ),
                    ));
                }
            }
        }
        for (a, b, _) in self.edges() {
            if self.activity_row_missing(a, b) || self.activity_row_missing(b, a) {
                return Err(invalid(
                    format!("/edges/{a}-{b}"),
                    "connected pair is missing its data-set rows",
                ));
            }
        }
        Ok(())
    }

    fn activity_row_missing(&self, owner: &ProfileId, neighbor: &ProfileId) -> bool {
        self.datasets
            .get(owner)
            .map(|ds| ds.row(neighbor).is_none())
            .unwrap_or(true)
    }
}

fn parse_id(value: &Value, path: &str) -> Result<ProfileId, SnapshotError> {
    let s = value
        .as_str()
        .ok_or_else(|| invalid(path, "must be a string"))?;
    ProfileId::new(s).map_err(|e| invalid(path, e.to_string()))
}

fn parse_counter(row: &Map<String, Value>, key: &str, path: &str) -> Result<u64, SnapshotError> {
    row.get(key)
        .ok_or_else(|| invalid(format!("{path}/{key}"), "missing"))?
        .as_u64()
        .ok_or_else(|| invalid(format!("{path}/{key}"), "must be an unsigned integer"))
}
