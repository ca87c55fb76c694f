use std::fmt;

use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use teaming_core::ingest::{AwardRecord, CallRecord, ExtractionStats, ResearcherProfile};
use teaming_core::matching::CorpusVectorModel;
use teaming_core::team::TeamRecommendation;

/// Record collections, one directory each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Calls,
    Users,
    Awards,
    Recommendations,
    Models,
    Outbox,
    Reports,
}

impl Kind {
    pub const ALL: [Kind; 7] =
        [Kind::Calls, Kind::Users, Kind::Awards, Kind::Recommendations, Kind::Models, Kind::Outbox, Kind::Reports];

    pub fn dir_name(self) -> &'static str {
        match self {
            Kind::Calls => "calls",
            Kind::Users => "users",
            Kind::Awards => "awards",
            Kind::Recommendations => "recommendations",
            Kind::Models => "models",
            Kind::Outbox => "outbox",
            Kind::Reports => "reports",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.dir_name())
    }
}

/// A storable record type.
pub trait Entity: Serialize + DeserializeOwned {
    const KIND: Kind;
    /// Accepted query keys and the (dotted) record field each one reads.
    const FILTERS: &'static [(&'static str, &'static str)];

    fn id(&self) -> String;
}

impl Entity for CallRecord {
    const KIND: Kind = Kind::Calls;
    const FILTERS: &'static [(&'static str, &'static str)] =
        &[("agency_id", "agency_id"), ("proposal_id", "call_id"), ("call_id", "call_id")];

    fn id(&self) -> String {
        self.call_id.clone()
    }
}

impl Entity for ResearcherProfile {
    const KIND: Kind = Kind::Users;
    const FILTERS: &'static [(&'static str, &'static str)] =
        &[("username", "username"), ("user_id", "user_id"), ("designation", "designation"), ("role", "role")];

    fn id(&self) -> String {
        self.username.clone()
    }
}

impl Entity for AwardRecord {
    const KIND: Kind = Kind::Awards;
    const FILTERS: &'static [(&'static str, &'static str)] = &[
        ("award_number", "award_number"),
        ("agency_id", "agency_id"),
        ("pi_username", "pi_username"),
        ("year", "year"),
    ];

    fn id(&self) -> String {
        self.award_number.clone()
    }
}

impl Entity for TeamRecommendation {
    const KIND: Kind = Kind::Recommendations;
    const FILTERS: &'static [(&'static str, &'static str)] =
        &[("call_id", "call_id"), ("lead", "lead"), ("status", "state.status")];

    fn id(&self) -> String {
        self.team_id.clone()
    }
}

/// A named corpus model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredModel {
    pub name: String,
    pub model: CorpusVectorModel,
}

impl Entity for StoredModel {
    const KIND: Kind = Kind::Models;
    const FILTERS: &'static [(&'static str, &'static str)] = &[];

    fn id(&self) -> String {
        self.name.clone()
    }
}

/// A confirmation request addressed to one team member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Notification {
    pub id: String,
    pub team_id: String,
    pub user_id: String,
    pub call_id: String,
    pub message: String,
    pub created_at: DateTime<Utc>,
}

impl Entity for Notification {
    const KIND: Kind = Kind::Outbox;
    const FILTERS: &'static [(&'static str, &'static str)] = &[("team_id", "team_id"), ("user_id", "user_id")];

    fn id(&self) -> String {
        self.id.clone()
    }
}

/// Extraction statistics from an ingestion job.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub name: String,
    pub stats: ExtractionStats,
}

impl Entity for IngestReport {
    const KIND: Kind = Kind::Reports;
    const FILTERS: &'static [(&'static str, &'static str)] = &[];

    fn id(&self) -> String {
        self.name.clone()
    }
}
