use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::constraints::{check_constraints, ConstraintReport};
use super::{TeamRecommendation, TeamingConfig};
use crate::ingest::ResearcherProfile;

/// A hypothetical edit to a team's membership.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum TeamChange {
    Add { user_id: String },
    Remove { user_id: String },
    Swap { out: String, r#in: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplainError {
    #[error("unknown user {0}")]
    UnknownUser(String),
    #[error("illegal change: {0}")]
    IllegalChange(String),
}

/// Constraint report for `team` after applying `change`. The team itself is
/// left untouched.
pub fn explain_change(
    team: &TeamRecommendation,
    change: &TeamChange,
    profiles: &[ResearcherProfile],
    config: &TeamingConfig,
) -> Result<ConstraintReport, ExplainError> {
    let mut ids: Vec<&str> = team.participants();
    let known = |id: &str| -> Result<(), ExplainError> {
        if profiles.iter().any(|p| p.user_id == id) {
            Ok(())
        } else {
            Err(ExplainError::UnknownUser(id.to_owned()))
        }
    };
    let remove = |ids: &mut Vec<&str>, id: &str| -> Result<(), ExplainError> {
        if id == team.lead {
            return Err(ExplainError::IllegalChange(format!("{id} leads the team")));
        }
        let pos = ids
            .iter()
            .position(|m| *m == id)
            .ok_or_else(|| ExplainError::IllegalChange(format!("{id} is not on the team")))?;
        ids.remove(pos);
        Ok(())
    };
    match change {
        TeamChange::Add { user_id } => {
            known(user_id)?;
            if team.contains(user_id) {
                return Err(ExplainError::IllegalChange(format!("{user_id} is already on the team")));
            }
            ids.push(user_id);
        }
        TeamChange::Remove { user_id } => {
            known(user_id)?;
            remove(&mut ids, user_id)?;
        }
        TeamChange::Swap { out, r#in } => {
            known(out)?;
            known(r#in)?;
            if team.contains(r#in) {
                return Err(ExplainError::IllegalChange(format!("{} is already on the team", r#in)));
            }
            remove(&mut ids, out)?;
            ids.push(r#in);
        }
    }
    let mut members = Vec::with_capacity(ids.len());
    for id in ids {
        let p = profiles
            .iter()
            .find(|p| p.user_id == id)
            .ok_or_else(|| ExplainError::UnknownUser(id.to_owned()))?;
        members.push((p.user_id.as_str(), &p.skills));
    }
    Ok(check_constraints(&members, team.proposed_budget, config))
}
