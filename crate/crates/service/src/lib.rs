//! HTTP API over a [`teaming_store::Store`].
//!
//! ```text
//! GET  /proposals?agency_id=..            calls, filterable by stored fields
//! GET  /users/{username}                  researcher profile
//! GET  /recommendations/user/{username}  teams led by the user, ?page=N (1-based)
//! GET  /recommendations/call/{call_id}   teams proposed for a call
//! GET  /awards/{award_number}             award record
//! GET  /teams/{team_id}                   one team with call and member details
//! POST /teams/{team_id}/notify            proposed -> notified, queues outbox entries
//! POST /teams/{team_id}/respond           {"username", "response": "accept"|"decline"}
//! POST /teams/{team_id}/explain           constraint report for an add/remove/swap
//! POST /feedback                          {"username", "call_id", "rating", "period_id"?}
//! GET  /feedback/summary?threshold=N      counts at or above the threshold
//! GET  /reports/ingest                    coverage table from the last ingest
//! POST /admin/ingest                      reload corpus files (x-role: admin)
//! POST /admin/reindex                     rebuild model and recommendations (x-role: admin)
//! POST /admin/expire                      expire teams past their deadline (x-role: admin)
//! ```
//!
//! Errors are JSON `{"code", "message"}` with a 4xx or 5xx status.

pub mod admin;
pub mod error;
pub mod routes;
pub mod state;
pub mod teams;

use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;

pub use error::{ApiError, ErrorBody};
pub use state::{AppState, Clock, CorpusPaths, FixedClock, ServiceSettings, SystemClock};

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/proposals", get(routes::proposals))
        .route("/users/{username}", get(routes::user))
        .route("/recommendations/user/{username}", get(routes::user_recommendations))
        .route("/recommendations/call/{call_id}", get(routes::call_recommendations))
        .route("/awards/{award_number}", get(routes::award))
        .route("/teams/{team_id}", get(teams::get_team))
        .route("/teams/{team_id}/notify", post(teams::notify))
        .route("/teams/{team_id}/respond", post(teams::respond))
        .route("/teams/{team_id}/explain", post(teams::explain))
        .route("/feedback", post(routes::post_feedback))
        .route("/feedback/summary", get(routes::feedback_summary_route))
        .route("/reports/ingest", get(admin::latest_report))
        .route("/admin/ingest", post(admin::ingest))
        .route("/admin/reindex", post(admin::reindex))
        .route("/admin/expire", post(admin::expire))
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(listener: TcpListener, state: AppState) -> std::io::Result<()> {
    tracing::info!(addr = ?listener.local_addr().ok(), "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
            tracing::info!("shutting down");
        })
        .await
}
