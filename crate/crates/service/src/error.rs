//! Error envelope shared by every endpoint.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use repfilter_core::api::{ErrorBody, ErrorDetail};
use repfilter_core::{EngineError, SimError, SnapshotError, TrustError};

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn unprocessable(code: &'static str, message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, code, message)
    }

    pub fn unknown_profile(id: &repfilter_core::ProfileId) -> Self {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "unknown_profile",
            format!("unknown profile {:?}", id.as_str()),
        )
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: ErrorDetail {
                code: self.code.to_string(),
                message: self.message,
            },
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<SnapshotError> for ApiError {
    fn from(err: SnapshotError) -> Self {
        ApiError::unprocessable("invalid_snapshot", err.to_string())
    }
}

impl From<TrustError> for ApiError {
    fn from(err: TrustError) -> Self {
        ApiError::unprocessable("invalid_trust_query", err.to_string())
    }
}

impl From<SimError> for ApiError {
    fn from(err: SimError) -> Self {
        ApiError::unprocessable("invalid_scenario", err.to_string())
    }
}

impl From<EngineError> for ApiError {
    fn from(err: EngineError) -> Self {
        match err {
            EngineError::OutOfOrderSeq { .. } | EngineError::NonMonotonicTimestamp { .. } => {
                ApiError::new(StatusCode::CONFLICT, "out_of_order", err.to_string())
            }
            other => ApiError::unprocessable("invalid_event", other.to_string()),
        }
    }
}
