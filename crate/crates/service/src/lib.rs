//! HTTP/JSON service for the reputation filter.
//!
//! Two groups of endpoints:
//!
//! - stateless batch operations (`/v1/replay`, `/v1/simulate`, `/v1/trust`,
//!   `/v1/stats`, `/v1/weights`) that take everything they need in the
//!   request and are safe to run concurrently;
//! - a stateful stream lane (`/v1/stream/*`) holding one live graph behind a
//!   single-writer lock, fed one event at a time in sequence order.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use tokio::net::TcpListener;
use tokio::sync::RwLock;
use tokio::task::JoinHandle;

use repfilter_core::api::{
    HealthResponse, LoadSnapshotResponse, ReplayRequest, ReplayResponse, SimulateRequest,
    SimulateResponse, SnapshotRequest, StatsResponse, StreamDecisionsResponse, TrustRequest,
    TrustResponse, WeightsRequest,
};
use repfilter_core::{
    process, replay, resolve_trust, run_simulation, weights_csv, Basis, Decision, EngineConfig,
    InteractionEvent, ProfileId, SocialGraph, TrustBasis, TrustConfig, TrustScore,
};

mod error;

pub use error::ApiError;

/// Shared service state. The stream lane serializes writers behind the lock;
/// reads run concurrently between mutations.
pub struct AppState {
    config: EngineConfig,
    stream: RwLock<StreamState>,
}

#[derive(Default)]
struct StreamState {
    graph: SocialGraph,
    last: Option<(u64, u64)>, // (seq, ts) watermark
    decisions: Vec<Decision>,
}

impl AppState {
    pub fn new(config: EngineConfig) -> Arc<Self> {
        Arc::new(AppState {
            config,
            stream: RwLock::new(StreamState::default()),
        })
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/config", get(config))
        .route("/v1/replay", post(replay_handler))
        .route("/v1/simulate", post(simulate_handler))
        .route("/v1/trust", post(trust_handler))
        .route("/v1/stats", post(stats_handler))
        .route("/v1/weights", post(weights_handler))
        .route("/v1/stream/events", post(stream_submit))
        .route("/v1/stream/snapshot", get(stream_snapshot).put(stream_load))
        .route("/v1/stream/reset", post(stream_reset))
        .route("/v1/stream/decisions", get(stream_decisions))
        .route("/v1/stream/trust", get(stream_trust))
        .route("/v1/stream/stats", get(stream_stats))
        .with_state(state)
}

/// Binds an ephemeral local port and serves until the handle is aborted.
/// Used by the CLI's in-process mode and by tests.
pub async fn spawn_ephemeral(
    state: Arc<AppState>,
) -> std::io::Result<(SocketAddr, JoinHandle<()>)> {
    let listener = TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    let app = router(state);
    let handle = tokio::spawn(async move {
        if let Err(err) = axum::serve(listener, app).await {
            tracing::error!("server error: {err}");
        }
    });
    Ok((addr, handle))
}

/// Serves until ctrl-c.
pub async fn serve(listener: TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn health() -> Json<HealthResponse> {
    Json(HealthResponse {
        status: "ok".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

async fn config(State(state): State<Arc<AppState>>) -> Json<EngineConfig> {
    Json(state.config)
}

async fn replay_handler(Json(req): Json<ReplayRequest>) -> Result<Json<ReplayResponse>, ApiError> {
    for event in &req.events {
        event
            .validate()
            .map_err(|e| ApiError::unprocessable("invalid_event", e.to_string()))?;
    }
    let outcome = replay(&req.events, &req.config)?;
    Ok(Json(ReplayResponse {
        decisions: outcome.decisions,
        snapshot: outcome.graph.to_snapshot_value(),
    }))
}

async fn simulate_handler(
    Json(req): Json<SimulateRequest>,
) -> Result<Json<SimulateResponse>, ApiError> {
    let run = run_simulation(&req.scenario)?;
    Ok(Json(SimulateResponse {
        events: run.events,
        decisions: run.decisions,
        metrics: run.metrics,
        snapshot: run.graph.to_snapshot_value(),
    }))
}

fn trust_response(score: Option<TrustScore>) -> TrustResponse {
    match score {
        None => TrustResponse {
            basis: Basis::Fallback,
            via: None,
            value: None,
        },
        Some(score) => match score.basis {
            TrustBasis::Direct => TrustResponse {
                basis: Basis::Direct,
                via: None,
                value: Some(score.value),
            },
            TrustBasis::Default => TrustResponse {
                basis: Basis::Default,
                via: None,
                value: Some(score.value),
            },
            TrustBasis::Inferred(via) => TrustResponse {
                basis: Basis::Inferred,
                via: Some(via),
                value: Some(score.value),
            },
        },
    }
}

fn query_trust(
    graph: &SocialGraph,
    x: &ProfileId,
    y: &ProfileId,
    cfg: &TrustConfig,
) -> Result<TrustResponse, ApiError> {
    for id in [x, y] {
        if !graph.contains_profile(id) {
            return Err(ApiError::unknown_profile(id));
        }
    }
    let score = resolve_trust(graph, x, y, cfg)?;
    Ok(trust_response(score))
}

async fn trust_handler(Json(req): Json<TrustRequest>) -> Result<Json<TrustResponse>, ApiError> {
    let graph = SocialGraph::from_snapshot_value(&req.snapshot)?;
    Ok(Json(query_trust(&graph, &req.x, &req.y, &req.config)?))
}

async fn stats_handler(Json(req): Json<SnapshotRequest>) -> Result<Json<StatsResponse>, ApiError> {
    let graph = SocialGraph::from_snapshot_value(&req.snapshot)?;
    Ok(Json(graph.stats()))
}

async fn weights_handler(Json(req): Json<WeightsRequest>) -> Result<impl IntoResponse, ApiError> {
    let graph = SocialGraph::from_snapshot_value(&req.snapshot)?;
    let csv = weights_csv(&graph, &req.config);
    Ok((
        StatusCode::OK,
        [(header::CONTENT_TYPE, "text/csv; charset=utf-8")],
        csv,
    ))
}

async fn stream_submit(
    State(state): State<Arc<AppState>>,
    Json(event): Json<InteractionEvent>,
) -> Result<Json<Decision>, ApiError> {
    event
        .validate()
        .map_err(|e| ApiError::unprocessable("invalid_event", e.to_string()))?;
    let mut stream = state.stream.write().await;
    if let Some((last_seq, last_ts)) = stream.last {
        if event.seq <= last_seq {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "out_of_order",
                format!("event seq {} is not after {}", event.seq, last_seq),
            ));
        }
        if event.ts < last_ts {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "out_of_order",
                format!("event ts {} precedes {}", event.ts, last_ts),
            ));
        }
    }
    let decision = process(&mut stream.graph, &event, &state.config)?;
    stream.last = Some((event.seq, event.ts));
    stream.decisions.push(decision.clone());
    Ok(Json(decision))
}

async fn stream_snapshot(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let stream = state.stream.read().await;
    Json(stream.graph.to_snapshot_value())
}

async fn stream_load(
    State(state): State<Arc<AppState>>,
    Json(req): Json<SnapshotRequest>,
) -> Result<Json<LoadSnapshotResponse>, ApiError> {
    let graph = SocialGraph::from_snapshot_value(&req.snapshot)?;
    let stats = graph.stats();
    let mut stream = state.stream.write().await;
    *stream = StreamState {
        graph,
        last: None,
        decisions: Vec::new(),
    };
    Ok(Json(LoadSnapshotResponse {
        profiles: stats.profiles,
        edges: stats.edges,
    }))
}

async fn stream_reset(State(state): State<Arc<AppState>>) -> Json<LoadSnapshotResponse> {
    let mut stream = state.stream.write().await;
    *stream = StreamState::default();
    Json(LoadSnapshotResponse {
        profiles: 0,
        edges: 0,
    })
}

async fn stream_decisions(State(state): State<Arc<AppState>>) -> Json<StreamDecisionsResponse> {
    let stream = state.stream.read().await;
    Json(StreamDecisionsResponse {
        decisions: stream.decisions.clone(),
    })
}

#[derive(Deserialize)]
struct TrustQuery {
    x: ProfileId,
    y: ProfileId,
}

async fn stream_trust(
    State(state): State<Arc<AppState>>,
    Query(query): Query<TrustQuery>,
) -> Result<Json<TrustResponse>, ApiError> {
    let stream = state.stream.read().await;
    Ok(Json(query_trust(
        &stream.graph,
        &query.x,
        &query.y,
        &state.config.trust,
    )?))
}

async fn stream_stats(State(state): State<Arc<AppState>>) -> Json<StatsResponse> {
    let stream = state.stream.read().await;
    Json(stream.graph.stats())
}
