use std::collections::BTreeMap;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::Json;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use teaming_core::evaluation::{feedback_summary, FeedbackEvent, FeedbackSummary, Rating, DEFAULT_RATING_THRESHOLD};
use teaming_core::ingest::{AwardRecord, CallRecord, ResearcherProfile};
use teaming_core::team::TeamRecommendation;
use teaming_core::Money;
use teaming_store::LoggedEvent;

use crate::error::ApiError;
use crate::state::AppState;

pub(crate) type ApiResult<T> = Result<T, ApiError>;

pub(crate) fn body<T>(payload: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    payload.map(|Json(v)| v).map_err(|e| ApiError::unprocessable("invalid_body", e.body_text()))
}

pub(crate) fn query<T>(params: Result<Query<T>, QueryRejection>) -> ApiResult<T> {
    params.map(|Query(v)| v).map_err(|e| ApiError::bad_request("invalid_query", e.body_text()))
}

pub(crate) fn profile_by_username(state: &AppState, username: &str) -> ApiResult<ResearcherProfile> {
    state.store.get::<ResearcherProfile>(username)?.ok_or_else(|| ApiError::not_found("user", username))
}

pub async fn proposals(
    State(state): State<AppState>,
    params: Result<Query<Vec<(String, String)>>, QueryRejection>,
) -> ApiResult<Json<Vec<CallRecord>>> {
    let params = query(params)?;
    let filters: Vec<(&str, &str)> = params.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    Ok(Json(state.store.query::<CallRecord>(&filters)?))
}

pub async fn user(State(state): State<AppState>, Path(username): Path<String>) -> ApiResult<Json<ResearcherProfile>> {
    Ok(Json(profile_by_username(&state, &username)?))
}

pub async fn award(State(state): State<AppState>, Path(number): Path<String>) -> ApiResult<Json<AwardRecord>> {
    let award = state.store.get::<AwardRecord>(&number)?.ok_or_else(|| ApiError::not_found("award", &number))?;
    Ok(Json(award))
}

/// Call details shown next to a recommended team.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallSummary {
    pub call_id: String,
    pub title: Option<String>,
    pub agency_id: String,
    pub url: String,
    /// Earliest deadline not yet passed.
    pub next_deadline: Option<NaiveDate>,
    pub deadlines: Vec<NaiveDate>,
    pub budget_total: Option<Money>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberView {
    pub user_id: String,
    pub username: String,
    pub display_name: String,
    pub score: u8,
    pub lead: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendationView {
    pub team: TeamRecommendation,
    pub call: CallSummary,
    /// Lead first, then members in selection order.
    pub people: Vec<MemberView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendationPage {
    pub page: usize,
    pub page_size: usize,
    pub total: usize,
    pub pages: usize,
    pub items: Vec<RecommendationView>,
}

#[derive(Debug, Deserialize)]
pub struct PageQuery {
    pub page: Option<usize>,
}

pub(crate) fn view(state: &AppState, team: TeamRecommendation, people: &BTreeMap<String, ResearcherProfile>) -> ApiResult<RecommendationView> {
    let call = state
        .store
        .get::<CallRecord>(&team.call_id)?
        .ok_or_else(|| ApiError::not_found("call", &team.call_id))?;
    let today = state.clock.today();
    let member = |score: &teaming_core::matching::MatchScore, lead: bool| {
        let p = people.get(&score.user_id);
        MemberView {
            user_id: score.user_id.clone(),
            username: p.map_or_else(|| score.user_id.clone(), |p| p.username.clone()),
            display_name: p.map_or_else(|| score.user_id.clone(), |p| p.display_name.clone()),
            score: score.score,
            lead,
        }
    };
    let people_view = std::iter::once(member(&team.lead_score, true))
        .chain(team.members.iter().map(|m| member(m, false)))
        .collect();
    Ok(RecommendationView {
        call: CallSummary {
            next_deadline: call.next_deadline(today),
            call_id: call.call_id,
            title: call.title,
            agency_id: call.agency_id,
            url: call.url,
            deadlines: call.deadlines,
            budget_total: call.budget_total,
        },
        people: people_view,
        team,
    })
}

pub(crate) fn people_by_user_id(state: &AppState) -> ApiResult<BTreeMap<String, ResearcherProfile>> {
    Ok(state.store.all::<ResearcherProfile>()?.into_iter().map(|p| (p.user_id.clone(), p)).collect())
}

/// A user's teams as lead, by descending lead score then call id.
pub(crate) fn teams_led_by(state: &AppState, user_id: &str) -> ApiResult<Vec<TeamRecommendation>> {
    let mut teams = state.store.query::<TeamRecommendation>(&[("lead", user_id)])?;
    teams.sort_by(|a, b| b.lead_score.score.cmp(&a.lead_score.score).then_with(|| a.call_id.cmp(&b.call_id)));
    Ok(teams)
}

pub async fn user_recommendations(
    State(state): State<AppState>,
    Path(username): Path<String>,
    params: Result<Query<PageQuery>, QueryRejection>,
) -> ApiResult<Json<RecommendationPage>> {
    let page = query(params)?.page.unwrap_or(1);
    if page == 0 {
        return Err(ApiError::bad_request("invalid_query", "pages start at 1"));
    }
    let profile = profile_by_username(&state, &username)?;
    let teams = teams_led_by(&state, &profile.user_id)?;
    let page_size = state.settings.teaming.page_size;
    let total = teams.len();
    let people = people_by_user_id(&state)?;
    let items = teams
        .into_iter()
        .skip((page - 1).saturating_mul(page_size))
        .take(page_size)
        .map(|t| view(&state, t, &people))
        .collect::<ApiResult<Vec<_>>>()?;
    Ok(Json(RecommendationPage { page, page_size, total, pages: total.div_ceil(page_size), items }))
}

pub async fn call_recommendations(
    State(state): State<AppState>,
    Path(call_id): Path<String>,
) -> ApiResult<Json<Vec<RecommendationView>>> {
    if state.store.get::<CallRecord>(&call_id)?.is_none() {
        return Err(ApiError::not_found("call", &call_id));
    }
    let mut teams = state.store.query::<TeamRecommendation>(&[("call_id", &call_id)])?;
    teams.sort_by(|a, b| b.lead_score.score.cmp(&a.lead_score.score).then_with(|| a.lead.cmp(&b.lead)));
    let people = people_by_user_id(&state)?;
    Ok(Json(teams.into_iter().map(|t| view(&state, t, &people)).collect::<ApiResult<_>>()?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeedbackRequest {
    pub username: String,
    pub call_id: String,
    pub rating: i64,
    /// Defaults to the current month, `YYYY-MM`.
    #[serde(default)]
    pub period_id: Option<String>,
}

pub async fn post_feedback(
    State(state): State<AppState>,
    payload: Result<Json<FeedbackRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<LoggedEvent>)> {
    let req = body(payload)?;
    let rating = Rating::new(req.rating).map_err(|e| ApiError::unprocessable("invalid_rating", e.to_string()))?;
    let profile = profile_by_username(&state, &req.username)?;
    if state.store.get::<CallRecord>(&req.call_id)?.is_none() {
        return Err(ApiError::not_found("call", &req.call_id));
    }
    let now = state.clock.now();
    let event = FeedbackEvent {
        user_id: profile.user_id,
        call_id: req.call_id,
        rating,
        period_id: req.period_id.unwrap_or_else(|| now.format("%Y-%m").to_string()),
        timestamp: now,
    };
    let seq = state.store.append_event(&event)?;
    Ok((StatusCode::CREATED, Json(LoggedEvent { seq, event })))
}

#[derive(Debug, Deserialize)]
pub struct SummaryQuery {
    pub threshold: Option<u8>,
}

pub async fn feedback_summary_route(
    State(state): State<AppState>,
    params: Result<Query<SummaryQuery>, QueryRejection>,
) -> ApiResult<Json<FeedbackSummary>> {
    let threshold = query(params)?.threshold.unwrap_or(DEFAULT_RATING_THRESHOLD);
    let events: Vec<FeedbackEvent> = state.store.replay_events().into_iter().map(|e| e.event).collect();
    Ok(Json(feedback_summary(&events, threshold)))
}
