use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::money::Money;

/// Tunables for matching, team formation and pagination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TeamingConfig {
    /// Calls kept per user ranking.
    pub k: usize,
    /// Upper team size, lead included.
    pub team_cap: usize,
    /// Minimum budget share per participant.
    pub per_participant_floor: Money,
    /// Let a large budget raise the size cap past `team_cap`.
    pub allow_large_teams: bool,
    /// Absolute size limit when `allow_large_teams` is set.
    pub hard_ceiling: usize,
    /// Scores below this are not considered matches.
    pub relevance_floor: u8,
    /// Recommendations per API page.
    pub page_size: usize,
    /// Optional cap on recommendations returned per user and period.
    pub max_recs_per_user_per_period: Option<usize>,
}

impl Default for TeamingConfig {
    fn default() -> Self {
        TeamingConfig {
            k: 10,
            team_cap: 5,
            per_participant_floor: Money(50_000),
            allow_large_teams: false,
            hard_ceiling: 10,
            relevance_floor: 40,
            page_size: 3,
            max_recs_per_user_per_period: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("team_cap must be at least 2 (got {0})")]
    TeamCapTooSmall(usize),
    #[error("per_participant_floor must be positive")]
    ZeroFloor,
    #[error("hard_ceiling {ceiling} is below team_cap {cap}")]
    CeilingBelowCap { ceiling: usize, cap: usize },
    #[error("page_size must be at least 1")]
    ZeroPageSize,
    #[error("relevance_floor {0} exceeds 100")]
    FloorOutOfRange(u8),
}

impl TeamingConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.team_cap < 2 {
            return Err(ConfigError::TeamCapTooSmall(self.team_cap));
        }
        if self.per_participant_floor.as_dollars() == 0 {
            return Err(ConfigError::ZeroFloor);
        }
        if self.hard_ceiling < self.team_cap {
            return Err(ConfigError::CeilingBelowCap { ceiling: self.hard_ceiling, cap: self.team_cap });
        }
        if self.page_size == 0 {
            return Err(ConfigError::ZeroPageSize);
        }
        if self.relevance_floor > 100 {
            return Err(ConfigError::FloorOutOfRange(self.relevance_floor));
        }
        Ok(())
    }
}
