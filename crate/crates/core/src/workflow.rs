//! Confirmation workflow for a proposed team.
//!
//! ```text
//! Proposed --notify--> Notified --all accept--> Confirmed
//!                         |------any decline--> Declined
//! Proposed | Notified --expire (deadline passed)--> Expired
//! ```
//!
//! Confirmed, Declined and Expired are terminal.

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TeamStatus {
    Proposed,
    Notified,
    Confirmed,
    Declined,
    Expired,
}

impl TeamStatus {
    pub const ALL: [TeamStatus; 5] = [
        TeamStatus::Proposed,
        TeamStatus::Notified,
        TeamStatus::Confirmed,
        TeamStatus::Declined,
        TeamStatus::Expired,
    ];

    pub fn is_terminal(self) -> bool {
        matches!(self, TeamStatus::Confirmed | TeamStatus::Declined | TeamStatus::Expired)
    }
}

impl fmt::Display for TeamStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TeamStatus::Proposed => "proposed",
            TeamStatus::Notified => "notified",
            TeamStatus::Confirmed => "confirmed",
            TeamStatus::Declined => "declined",
            TeamStatus::Expired => "expired",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    Accept,
    Decline,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum WorkflowEvent {
    Notify,
    Respond { user_id: String, response: Response },
    Expire { today: NaiveDate },
}

impl WorkflowEvent {
    fn name(&self) -> &'static str {
        match self {
            WorkflowEvent::Notify => "notify",
            WorkflowEvent::Respond { .. } => "respond",
            WorkflowEvent::Expire { .. } => "expire",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkflowError {
    #[error("cannot {event} a team in state {from}")]
    IllegalTransition { from: TeamStatus, event: &'static str },
    #[error("team is {0}; no further changes allowed")]
    TerminalState(TeamStatus),
    #[error("{0} is not on this team")]
    NotAMember(String),
    #[error("{0} has already responded")]
    DuplicateResponse(String),
    #[error("call deadline has not passed")]
    NotExpired,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorkflowState {
    pub status: TeamStatus,
    pub responses: BTreeMap<String, Response>,
    /// The team expires once this date is in the past.
    pub expires_on: Option<NaiveDate>,
    /// Bumped on every transition; used for check-and-set updates.
    pub version: u64,
}

impl WorkflowState {
    pub fn proposed(expires_on: Option<NaiveDate>) -> Self {
        WorkflowState {
            status: TeamStatus::Proposed,
            responses: BTreeMap::new(),
            expires_on,
            version: 0,
        }
    }

    pub fn is_past_deadline(&self, today: NaiveDate) -> bool {
        self.expires_on.is_some_and(|d| d < today)
    }

    /// Applies `event` for a team whose participants are `participants`.
    pub fn apply(&self, event: &WorkflowEvent, participants: &[&str]) -> Result<WorkflowState, WorkflowError> {
        if self.status.is_terminal() {
            return Err(WorkflowError::TerminalState(self.status));
        }
        let mut next = self.clone();
        match (self.status, event) {
            (TeamStatus::Proposed, WorkflowEvent::Notify) => next.status = TeamStatus::Notified,
            (TeamStatus::Notified, WorkflowEvent::Respond { user_id, response }) => {
                if !participants.contains(&user_id.as_str()) {
                    return Err(WorkflowError::NotAMember(user_id.clone()));
                }
                if self.responses.contains_key(user_id) {
                    return Err(WorkflowError::DuplicateResponse(user_id.clone()));
                }
                next.responses.insert(user_id.clone(), *response);
                if *response == Response::Decline {
                    next.status = TeamStatus::Declined;
                } else if participants
                    .iter()
                    .all(|p| next.responses.get(*p) == Some(&Response::Accept))
                {
                    next.status = TeamStatus::Confirmed;
                }
            }
            (_, WorkflowEvent::Expire { today }) => {
                if !self.is_past_deadline(*today) {
                    return Err(WorkflowError::NotExpired);
                }
                next.status = TeamStatus::Expired;
            }
            (from, event) => {
                return Err(WorkflowError::IllegalTransition { from, event: event.name() });
            }
        }
        next.version += 1;
        Ok(next)
    }
}
