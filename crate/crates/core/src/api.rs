//! Wire types for the HTTP service and its clients.
//!
//! Snapshots travel as embedded JSON documents (the same schema the snapshot
//! files use); logs travel as arrays of the JSONL record types.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::decision::{Basis, Decision};
use crate::engine::EngineConfig;
use crate::event::InteractionEvent;
use crate::graph::GraphStats;
use crate::profile::ProfileId;
use crate::rational::Rational;
use crate::sim::{SimConfig, SimMetrics};
use crate::trust::TrustConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplayRequest {
    pub events: Vec<InteractionEvent>,
    #[serde(default)]
    pub config: EngineConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplayResponse {
    pub decisions: Vec<Decision>,
    pub snapshot: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateRequest {
    pub scenario: SimConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateResponse {
    pub events: Vec<InteractionEvent>,
    pub decisions: Vec<Decision>,
    pub metrics: SimMetrics,
    pub snapshot: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrustRequest {
    pub snapshot: Value,
    pub x: ProfileId,
    pub y: ProfileId,
    #[serde(default)]
    pub config: TrustConfig,
}

/// Trust resolution outcome. `basis` follows the decision-log vocabulary;
/// `fallback` means neither direct nor inferred trust exists for the pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrustResponse {
    pub basis: Basis,
    pub via: Option<ProfileId>,
    pub value: Option<Rational>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnapshotRequest {
    pub snapshot: Value,
}

pub type StatsResponse = GraphStats;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightsRequest {
    pub snapshot: Value,
    #[serde(default)]
    pub config: TrustConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoadSnapshotResponse {
    pub profiles: u64,
    pub edges: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StreamDecisionsResponse {
    pub decisions: Vec<Decision>,
}

/// Error envelope returned by every non-2xx service response.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: String,
    pub message: String,
}
