//! Team formation under size, budget and skill-uniqueness constraints.

mod builder;
mod config;
mod constraints;
mod explain;

pub use builder::{build_team, recommend_for_call, recommend_for_user, team_id, Candidate, TeamRecommendation};
pub use config::{ConfigError, TeamingConfig};
pub use constraints::{
    allocate_budget, check_constraints, structural_size_limit, team_size_cap, ConstraintId, ConstraintOutcome,
    ConstraintReport,
};
pub use explain::{explain_change, ExplainError, TeamChange};
