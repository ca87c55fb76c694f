use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::Json;
use serde::{Deserialize, Serialize};
use teaming_core::ingest::ResearcherProfile;
use teaming_core::team::{explain_change, ConstraintReport, TeamChange, TeamRecommendation};
use teaming_core::workflow::{Response, WorkflowEvent};
use teaming_store::Notification;

use crate::error::ApiError;
use crate::routes::{body, people_by_user_id, view, ApiResult, RecommendationView};
use crate::state::AppState;

fn load_team(state: &AppState, team_id: &str) -> ApiResult<TeamRecommendation> {
    state.store.get::<TeamRecommendation>(team_id)?.ok_or_else(|| ApiError::not_found("team", team_id))
}

pub async fn get_team(State(state): State<AppState>, Path(team_id): Path<String>) -> ApiResult<Json<RecommendationView>> {
    let team = load_team(&state, &team_id)?;
    let people = people_by_user_id(&state)?;
    Ok(Json(view(&state, team, &people)?))
}

/// Applies `event` to the stored team under the store's writer lock.
fn transition(state: &AppState, team_id: &str, event: &WorkflowEvent) -> ApiResult<TeamRecommendation> {
    let today = state.clock.today();
    state.store.update::<TeamRecommendation, ApiError>(team_id, |team| {
        if !team.state.status.is_terminal() && team.state.is_past_deadline(today) {
            return Err(ApiError::conflict("deadline_passed", "the call deadline has passed"));
        }
        let participants = team.participants().into_iter().map(String::from).collect::<Vec<_>>();
        let refs: Vec<&str> = participants.iter().map(String::as_str).collect();
        team.state = team.state.apply(event, &refs)?;
        Ok(())
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NotifyOutcome {
    pub team: TeamRecommendation,
    pub notifications: Vec<Notification>,
}

/// Moves a proposed team to notified and queues one outbox entry per
/// participant, lead included.
pub async fn notify(State(state): State<AppState>, Path(team_id): Path<String>) -> ApiResult<Json<NotifyOutcome>> {
    if state.store.get::<TeamRecommendation>(&team_id)?.is_none() {
        return Err(ApiError::not_found("team", &team_id));
    }
    let team = transition(&state, &team_id, &WorkflowEvent::Notify)?;
    let now = state.clock.now();
    let title = state
        .store
        .get::<teaming_core::ingest::CallRecord>(&team.call_id)?
        .and_then(|c| c.title)
        .unwrap_or_else(|| team.call_id.clone());
    let mut notifications = Vec::new();
    for user_id in team.participants() {
        let note = Notification {
            id: format!("{}:{user_id}", team.team_id),
            team_id: team.team_id.clone(),
            user_id: user_id.to_string(),
            call_id: team.call_id.clone(),
            message: format!("You are proposed for a team led by {} on \"{title}\". Please accept or decline.", team.lead),
            created_at: now,
        };
        state.store.put(&note)?;
        notifications.push(note);
    }
    Ok(Json(NotifyOutcome { team, notifications }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RespondRequest {
    pub username: String,
    pub response: Response,
}

pub async fn respond(
    State(state): State<AppState>,
    Path(team_id): Path<String>,
    payload: Result<Json<RespondRequest>, JsonRejection>,
) -> ApiResult<Json<TeamRecommendation>> {
    let req = body(payload)?;
    if state.store.get::<TeamRecommendation>(&team_id)?.is_none() {
        return Err(ApiError::not_found("team", &team_id));
    }
    let user_id = match state.store.get::<ResearcherProfile>(&req.username)? {
        Some(p) => p.user_id,
        None => return Err(ApiError::forbidden("not_a_member", format!("{} is not on this team", req.username))),
    };
    let event = WorkflowEvent::Respond { user_id, response: req.response };
    Ok(Json(transition(&state, &team_id, &event)?))
}

/// Constraint report for a hypothetical change; the stored team is untouched.
pub async fn explain(
    State(state): State<AppState>,
    Path(team_id): Path<String>,
    payload: Result<Json<TeamChange>, JsonRejection>,
) -> ApiResult<Json<ConstraintReport>> {
    let change = body(payload)?;
    let team = load_team(&state, &team_id)?;
    let profiles = state.store.all::<ResearcherProfile>()?;
    Ok(Json(explain_change(&team, &change, &profiles, &state.settings.teaming)?))
}
