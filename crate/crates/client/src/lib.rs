//! Thin typed client for the reputation filter service.
//!
//! One method per endpoint; non-2xx responses are decoded into the service's
//! error envelope and surfaced as [`ClientError::Api`].

use reqwest::StatusCode;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use repfilter_core::api::{
    ErrorBody, HealthResponse, LoadSnapshotResponse, ReplayRequest, ReplayResponse,
    SimulateRequest, SimulateResponse, SnapshotRequest, StatsResponse, StreamDecisionsResponse,
    TrustRequest, TrustResponse, WeightsRequest,
};
use repfilter_core::{Decision, EngineConfig, InteractionEvent, ProfileId, SimConfig, TrustConfig};

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("transport error: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("service error {status} [{code}]: {message}")]
    Api {
        status: StatusCode,
        code: String,
        message: String,
    },
}

impl ClientError {
    /// True when the service rejected the request (as opposed to the
    /// request never completing).
    pub fn is_api(&self) -> bool {
        matches!(self, ClientError::Api { .. })
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the server root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        Client {
            base: base.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    async fn decode<T: DeserializeOwned>(resp: reqwest::Response) -> Result<T, ClientError> {
        let status = resp.status();
        if status.is_success() {
            return Ok(resp.json().await?);
        }
        Err(Self::api_error(status, resp).await)
    }

    async fn api_error(status: StatusCode, resp: reqwest::Response) -> ClientError {
        let text = resp.text().await.unwrap_or_default();
        match serde_json::from_str::<ErrorBody>(&text) {
            Ok(body) => ClientError::Api {
                status,
                code: body.error.code,
                message: body.error.message,
            },
            Err(_) => ClientError::Api {
                status,
                code: "unknown".to_string(),
                message: text,
            },
        }
    }

    async fn post_json<B: Serialize, T: DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<T, ClientError> {
        let resp = self.http.post(self.url(path)).json(body).send().await?;
        Self::decode(resp).await
    }

    async fn get_json<T: DeserializeOwned>(&self, path: &str) -> Result<T, ClientError> {
        let resp = self.http.get(self.url(path)).send().await?;
        Self::decode(resp).await
    }

    pub async fn health(&self) -> Result<HealthResponse, ClientError> {
        self.get_json("/v1/health").await
    }

    pub async fn server_config(&self) -> Result<EngineConfig, ClientError> {
        self.get_json("/v1/config").await
    }

    pub async fn replay(
        &self,
        events: Vec<InteractionEvent>,
        config: EngineConfig,
    ) -> Result<ReplayResponse, ClientError> {
        self.post_json("/v1/replay", &ReplayRequest { events, config })
            .await
    }

    pub async fn simulate(&self, scenario: SimConfig) -> Result<SimulateResponse, ClientError> {
        self.post_json("/v1/simulate", &SimulateRequest { scenario })
            .await
    }

    pub async fn trust(
        &self,
        snapshot: Value,
        x: ProfileId,
        y: ProfileId,
        config: TrustConfig,
    ) -> Result<TrustResponse, ClientError> {
        self.post_json(
            "/v1/trust",
            &TrustRequest {
                snapshot,
                x,
                y,
                config,
            },
        )
        .await
    }

    pub async fn stats(&self, snapshot: Value) -> Result<StatsResponse, ClientError> {
        self.post_json("/v1/stats", &SnapshotRequest { snapshot })
            .await
    }

    pub async fn weights_csv(
        &self,
        snapshot: Value,
        config: TrustConfig,
    ) -> Result<String, ClientError> {
        let resp = self
            .http
            .post(self.url("/v1/weights"))
            .json(&WeightsRequest { snapshot, config })
            .send()
            .await?;
        let status = resp.status();
        if status.is_success() {
            return Ok(resp.text().await?);
        }
        Err(Self::api_error(status, resp).await)
    }

    pub async fn stream_submit(&self, event: &InteractionEvent) -> Result<Decision, ClientError> {
        self.post_json("/v1/stream/events", event).await
    }

    pub async fn stream_snapshot(&self) -> Result<Value, ClientError> {
        self.get_json("/v1/stream/snapshot").await
    }

    pub async fn stream_load(&self, snapshot: Value) -> Result<LoadSnapshotResponse, ClientError> {
        let resp = self
            .http
            .put(self.url("/v1/stream/snapshot"))
            .json(&SnapshotRequest { snapshot })
            .send()
            .await?;
        Self::decode(resp).await
    }

    pub async fn stream_reset(&self) -> Result<LoadSnapshotResponse, ClientError> {
        let resp = self.http.post(self.url("/v1/stream/reset")).send().await?;
        Self::decode(resp).await
    }

    pub async fn stream_decisions(&self) -> Result<StreamDecisionsResponse, ClientError> {
        self.get_json("/v1/stream/decisions").await
    }

    pub async fn stream_trust(
        &self,
        x: &ProfileId,
        y: &ProfileId,
    ) -> Result<TrustResponse, ClientError> {
        let resp = self
            .http
            .get(self.url("/v1/stream/trust"))
            .query(&[("x", x.as_str()), ("y", y.as_str())])
            .send()
            .await?;
        Self::decode(resp).await
    }

    pub async fn stream_stats(&self) -> Result<StatsResponse, ClientError> {
        self.get_json("/v1/stream/stats").await
    }
}
