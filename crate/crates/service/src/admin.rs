use std::collections::BTreeSet;

use axum::extract::State;
use axum::http::HeaderMap;
use axum::Json;
use serde::{Deserialize, Serialize};
use teaming_core::ingest::{AwardRecord, CallRecord, ExtractionStats, ResearcherProfile};
use teaming_core::pipeline::{ingest_corpus, recommend_all, Corpus, PipelineSettings};
use teaming_core::team::TeamRecommendation;
use teaming_core::workflow::WorkflowEvent;
use teaming_store::{IngestReport, StoredModel};

use crate::error::ApiError;
use crate::routes::ApiResult;
use crate::state::AppState;

/// Header carrying the caller's role.
pub const ROLE_HEADER: &str = "x-role";
pub const ADMIN_ROLE: &str = "admin";
pub const MODEL_NAME: &str = "current";
pub const REPORT_NAME: &str = "latest";

fn require_admin(headers: &HeaderMap) -> ApiResult<()> {
    match headers.get(ROLE_HEADER).and_then(|v| v.to_str().ok()) {
        Some(role) if role.eq_ignore_ascii_case(ADMIN_ROLE) => Ok(()),
        _ => Err(ApiError::forbidden("forbidden", "administrator role required")),
    }
}

async fn blocking<T: Send + 'static>(job: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(job)
        .await
        .map_err(|e| ApiError::new(axum::http::StatusCode::INTERNAL_SERVER_ERROR, "job_failed", e.to_string()))?
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestOutcome {
    pub stats: ExtractionStats,
    pub diagnostics: Vec<String>,
    /// Recommendations dropped because their call or people disappeared.
    pub pruned_recommendations: usize,
}

fn read(path: &std::path::Path) -> ApiResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| ApiError::unprocessable("corpus_unreadable", format!("{}: {e}", path.display())))
}

pub fn run_ingest(state: &AppState) -> ApiResult<IngestOutcome> {
    let paths = &state.settings.corpus;
    let corpus = Corpus {
        calls: read(&paths.calls)?,
        roster: read(&paths.roster)?,
        awards: paths.awards.as_deref().map(read).transpose()?,
    };
    let settings = PipelineSettings {
        reference_date: state.clock.today(),
        config: state.settings.teaming.clone(),
        designations: state.settings.designation_filter(),
    };
    let ingested = ingest_corpus(&corpus, &settings).map_err(|e| ApiError::unprocessable("ingest_failed", e.to_string()))?;

    let call_ids: BTreeSet<&str> = ingested.calls.iter().map(|c| c.call_id.as_str()).collect();
    let user_ids: BTreeSet<&str> = ingested.profiles.iter().map(|p| p.user_id.as_str()).collect();
    let existing = state.store.all::<TeamRecommendation>()?;
    let kept: Vec<TeamRecommendation> = existing
        .iter()
        .filter(|t| call_ids.contains(t.call_id.as_str()) && t.participants().iter().all(|u| user_ids.contains(u)))
        .cloned()
        .collect();
    let pruned = existing.len() - kept.len();
    // drop dangling teams (and their outbox entries) before their referents go away
    state.store.replace_all(&kept)?;
    for note in state.store.all::<teaming_store::Notification>()? {
        if !kept.iter().any(|t| t.team_id == note.team_id) {
            state.store.remove::<teaming_store::Notification>(&note.id)?;
        }
    }
    state.store.replace_all::<CallRecord>(&ingested.calls)?;
    state.store.replace_all::<ResearcherProfile>(&ingested.profiles)?;
    state.store.replace_all::<AwardRecord>(&ingested.awards)?;
    state.store.put(&IngestReport { name: REPORT_NAME.into(), stats: ingested.stats.clone() })?;
    Ok(IngestOutcome { stats: ingested.stats, diagnostics: ingested.diagnostics, pruned_recommendations: pruned })
}

pub async fn ingest(State(state): State<AppState>, headers: HeaderMap) -> ApiResult<Json<IngestOutcome>> {
    require_admin(&headers)?;
    Ok(Json(blocking(move || run_ingest(&state)).await?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReindexOutcome {
    pub teams: usize,
    /// Teams whose composition was unchanged and kept their workflow state.
    pub preserved: usize,
    pub vocabulary: usize,
}

/// Rebuilds the corpus model and all recommendations from stored calls and
/// profiles. A team that comes out with the same id and membership keeps
/// its workflow state.
pub fn run_reindex(state: &AppState) -> ApiResult<ReindexOutcome> {
    let calls = state.store.all::<CallRecord>()?;
    let profiles = state.store.all::<ResearcherProfile>()?;
    let (model, mut teams) = recommend_all(&calls, &profiles, &state.settings.teaming)
        .map_err(|e| ApiError::unprocessable("reindex_failed", e.to_string()))?;
    let mut preserved = 0;
    for team in &mut teams {
        if let Some(old) = state.store.get::<TeamRecommendation>(&team.team_id)? {
            if old.participants() == team.participants() {
                team.state = old.state;
                preserved += 1;
            }
        }
    }
    let vocabulary = model.vocabulary_len();
    state.store.put(&StoredModel { name: MODEL_NAME.into(), model })?;
    let fresh: BTreeSet<&str> = teams.iter().map(|t| t.team_id.as_str()).collect();
    for note in state.store.all::<teaming_store::Notification>()? {
        if !fresh.contains(note.team_id.as_str()) {
            state.store.remove::<teaming_store::Notification>(&note.id)?;
        }
    }
    state.store.replace_all(&teams)?;
    Ok(ReindexOutcome { teams: teams.len(), preserved, vocabulary })
}

pub async fn reindex(State(state): State<AppState>, headers: HeaderMap) -> ApiResult<Json<ReindexOutcome>> {
    require_admin(&headers)?;
    Ok(Json(blocking(move || run_reindex(&state)).await?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpireOutcome {
    pub expired: Vec<String>,
}

/// Marks every open team whose call deadline has passed as expired.
pub async fn expire(State(state): State<AppState>, headers: HeaderMap) -> ApiResult<Json<ExpireOutcome>> {
    require_admin(&headers)?;
    let today = state.clock.today();
    let mut expired = Vec::new();
    for team in state.store.all::<TeamRecommendation>()? {
        if team.state.status.is_terminal() || !team.state.is_past_deadline(today) {
            continue;
        }
        state.store.update::<TeamRecommendation, ApiError>(&team.team_id, |t| {
            t.state = t.state.apply(&WorkflowEvent::Expire { today }, &[])?;
            Ok(())
        })?;
        expired.push(team.team_id);
    }
    Ok(Json(ExpireOutcome { expired }))
}

pub async fn latest_report(State(state): State<AppState>) -> ApiResult<Json<IngestReport>> {
    let report = state.store.get::<IngestReport>(REPORT_NAME)?.ok_or_else(|| ApiError::not_found("report", REPORT_NAME))?;
    Ok(Json(report))
}
