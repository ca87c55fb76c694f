use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::skills::{build_skill_set, SkillSet, SOURCE_SCHOLAR, SOURCE_SITE};

/// Default designation deny-list.
pub const DEFAULT_DENIED_DESIGNATIONS: &[&str] =
    &["administrative", "coordinator", "adjunct", "emeritus", "staff"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    #[default]
    Participant,
    Administrator,
}

/// One roster row.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPersonRecord {
    #[serde(default)]
    pub user_id: String,
    pub username: String,
    #[serde(default)]
    pub display_name: String,
    #[serde(default)]
    pub designation: String,
    #[serde(default)]
    pub skills_site: String,
    #[serde(default)]
    pub skills_scholar: String,
    #[serde(default)]
    pub role: Option<Role>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResearcherProfile {
    pub user_id: String,
    pub username: String,
    pub display_name: String,
    pub designation: String,
    pub role: Role,
    pub raw_skills_by_source: BTreeMap<String, Vec<String>>,
    pub skills: SkillSet,
    pub has_scholar_profile: bool,
}

impl ResearcherProfile {
    /// Builds a participant profile from raw skills, normalizing them.
    pub fn new(
        user_id: impl Into<String>,
        display_name: impl Into<String>,
        raw_skills_by_source: BTreeMap<String, Vec<String>>,
    ) -> Self {
        let user_id = user_id.into();
        let skills = build_skill_set(&raw_skills_by_source);
        let has_scholar_profile = raw_skills_by_source
            .get(SOURCE_SCHOLAR)
            .is_some_and(|v| !v.is_empty());
        ResearcherProfile {
            username: user_id.clone(),
            user_id,
            display_name: display_name.into(),
            designation: String::new(),
            role: Role::Participant,
            raw_skills_by_source,
            skills,
            has_scholar_profile,
        }
    }

    /// Eligible to be matched and placed on teams.
    pub fn is_matchable(&self) -> bool {
        self.role == Role::Participant && !self.skills.is_empty()
    }
}

/// Case-insensitive whole-word deny-list over job titles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignationFilter {
    denied: BTreeSet<String>,
}

impl Default for DesignationFilter {
    fn default() -> Self {
        Self::new(DEFAULT_DENIED_DESIGNATIONS.iter().copied())
    }
}

impl DesignationFilter {
    pub fn new<S: AsRef<str>>(terms: impl IntoIterator<Item = S>) -> Self {
        DesignationFilter {
            denied: terms.into_iter().map(|t| t.as_ref().to_lowercase()).collect(),
        }
    }

    pub fn excludes(&self, designation: &str) -> bool {
        designation
            .split(|c: char| !c.is_alphanumeric())
            .any(|word| self.denied.contains(&word.to_lowercase()))
    }
}

/// How many roster rows survived each filtering stage.
///
/// `total_extracted = rejected_records + removed_by_designation + remaining`
/// and `remaining = with_research_info + without_skills`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RosterFunnel {
    pub total_extracted: u64,
    pub rejected_records: u64,
    pub removed_by_designation: u64,
    pub remaining: u64,
    pub with_research_info: u64,
    pub without_skills: u64,
}

impl RosterFunnel {
    pub fn merge(self, other: RosterFunnel) -> RosterFunnel {
        RosterFunnel {
            total_extracted: self.total_extracted + other.total_extracted,
            rejected_records: self.rejected_records + other.rejected_records,
            removed_by_designation: self.removed_by_designation + other.removed_by_designation,
            remaining: self.remaining + other.remaining,
            with_research_info: self.with_research_info + other.with_research_info,
            without_skills: self.without_skills + other.without_skills,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RosterOutcome {
    pub admitted: Vec<ResearcherProfile>,
    pub funnel: RosterFunnel,
    pub rejections: Vec<IngestError>,
}

fn split_skills(field: &str) -> Vec<String> {
    field
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Filters a roster down to profiles eligible for matching.
///
/// Later rows repeating a username are rejected. Rows whose designation
/// hits the deny-list are removed, and rows left without any normalized
/// skill are dropped.
pub fn parse_researcher_roster(records: &[RawPersonRecord], filter: &DesignationFilter) -> RosterOutcome {
    let mut out = RosterOutcome::default();
    let mut seen = BTreeSet::new();
    for rec in records {
        out.funnel.total_extracted += 1;
        let username = rec.username.trim();
        if username.is_empty() {
            out.funnel.rejected_records += 1;
            out.rejections.push(IngestError::MissingUsername);
            continue;
        }
        if !seen.insert(username.to_string()) {
            out.funnel.rejected_records += 1;
            out.rejections.push(IngestError::DuplicateUsername(username.to_string()));
            continue;
        }
        if filter.excludes(&rec.designation) {
            out.funnel.removed_by_designation += 1;
            continue;
        }
        out.funnel.remaining += 1;

        let mut raw = BTreeMap::new();
        raw.insert(SOURCE_SITE.to_string(), split_skills(&rec.skills_site));
        raw.insert(SOURCE_SCHOLAR.to_string(), split_skills(&rec.skills_scholar));
        let skills = build_skill_set(&raw);
        if skills.is_empty() {
            out.funnel.without_skills += 1;
            continue;
        }
        out.funnel.with_research_info += 1;
        let user_id = match rec.user_id.trim() {
            "" => username.to_string(),
            id => id.to_string(),
        };
        let display_name = match rec.display_name.trim() {
            "" => username.to_string(),
            name => name.to_string(),
        };
        out.admitted.push(ResearcherProfile {
            user_id,
            username: username.to_string(),
            display_name,
            designation: rec.designation.trim().to_string(),
            role: rec.role.unwrap_or_default(),
            has_scholar_profile: !raw[SOURCE_SCHOLAR].is_empty(),
            raw_skills_by_source: raw,
            skills,
        });
    }
    out
}

/// Reads roster rows from CSV with a header row.
///
/// Required column: `username`. Optional: `user_id`, `display_name`,
/// `designation`, `skills_site`, `skills_scholar` (both `;`-separated) and
/// `role` (`participant` or `administrator`).
pub fn read_roster_csv<R: Read>(reader: R) -> Result<Vec<RawPersonRecord>, IngestError> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    csv.deserialize()
        .map(|row| row.map_err(|e| IngestError::Roster(e.to_string())))
        .collect()
}
