use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use teaming_core::team::ExplainError;
use teaming_core::workflow::WorkflowError;
use teaming_store::StoreError;

/// Error body: a stable machine-readable `code` and a human message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, body: ErrorBody { code: code.to_string(), message: message.into() } }
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no {what} {id:?}"))
    }

    pub fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn unprocessable(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, message)
    }

    pub fn conflict(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, code, message)
    }

    pub fn forbidden(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::FORBIDDEN, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match &e {
            StoreError::UnknownFilter { .. } => Self::bad_request("unknown_filter", e.to_string()),
            StoreError::NotFound { .. } => Self::new(StatusCode::NOT_FOUND, "not_found", e.to_string()),
            StoreError::IntegrityViolation(_) => Self::conflict("integrity_violation", e.to_string()),
            _ => {
                tracing::error!(error = %e, "store failure");
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "store_error", e.to_string())
            }
        }
    }
}

impl From<WorkflowError> for ApiError {
    fn from(e: WorkflowError) -> Self {
        let code = match e {
            WorkflowError::NotAMember(_) => return Self::forbidden("not_a_member", e.to_string()),
            WorkflowError::IllegalTransition { .. } => "illegal_transition",
            WorkflowError::TerminalState(_) => "terminal_state",
            WorkflowError::DuplicateResponse(_) => "duplicate_response",
            WorkflowError::NotExpired => "not_expired",
        };
        Self::conflict(code, e.to_string())
    }
}

impl From<ExplainError> for ApiError {
    fn from(e: ExplainError) -> Self {
        let code = match e {
            ExplainError::UnknownUser(_) => "unknown_user",
            ExplainError::IllegalChange(_) => "illegal_change",
        };
        Self::unprocessable(code, e.to_string())
    }
}
