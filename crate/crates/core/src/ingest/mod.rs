//! Corpus ingestion: call containers, roster tables and award markup are
//! parsed into validated records, with coverage statistics.

mod award;
mod budget;
mod call;
mod deadline;
mod roster;
mod stats;

use chrono::NaiveDate;
use thiserror::Error;

pub use award::{parse_award_record, parse_awards, AwardRecord};
pub use budget::extract_budget;
pub use call::{parse_call_record, read_call_container, CallRecord, CallWarning, ParsedCall, RawCallRecord};
pub use deadline::{extract_deadlines, DeadlineScan};
pub use roster::{
    parse_researcher_roster, read_roster_csv, DesignationFilter, RawPersonRecord, ResearcherProfile,
    Role, RosterFunnel, RosterOutcome, DEFAULT_DENIED_DESIGNATIONS,
};
pub use stats::{ingestion_report, CallTally, ExtractionStats, FieldTally, Percent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("call record has no id")]
    MissingId,
    #[error("call {0} has no synopsis")]
    MissingSynopsis(String),
    #[error("duplicate call id {0}")]
    DuplicateCallId(String),
    #[error("roster row has no username")]
    MissingUsername,
    #[error("duplicate username {0}")]
    DuplicateUsername(String),
    #[error("award has no number")]
    MissingAwardNumber,
    #[error("duplicate award number {0}")]
    DuplicateAwardNumber(String),
    #[error("{record}: missing field {field}")]
    MissingField { record: String, field: &'static str },
    #[error("{record}: invalid {field} {value:?}")]
    InvalidField { record: String, field: &'static str, value: String },
    #[error("roster: {0}")]
    Roster(String),
    #[error("markup: {0}")]
    Markup(String),
}

/// Outcome of ingesting one call container.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CallIngest {
    pub records: Vec<CallRecord>,
    pub rejections: Vec<IngestError>,
    pub warnings: Vec<(String, CallWarning)>,
    pub tally: CallTally,
}

/// Parses a call container, rejecting records without synopsis and repeated ids.
pub fn ingest_calls(text: &str, reference_date: NaiveDate) -> CallIngest {
    let mut out = CallIngest::default();
    let mut seen = std::collections::BTreeSet::new();
    for raw in read_call_container(text) {
        match parse_call_record(&raw, reference_date) {
            Ok(parsed) if !seen.insert(parsed.record.call_id.clone()) => {
                out.tally.record_rejected();
                out.rejections.push(IngestError::DuplicateCallId(parsed.record.call_id));
            }
            Ok(parsed) => {
                out.tally.record_accepted(&parsed.record);
                let id = parsed.record.call_id.clone();
                out.warnings.extend(parsed.warnings.into_iter().map(|w| (id.clone(), w)));
                out.records.push(parsed.record);
            }
            Err(e) => {
                out.tally.record_rejected();
                out.rejections.push(e);
            }
        }
    }
    out
}

/// Outcome of ingesting an award archive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AwardIngest {
    pub records: Vec<AwardRecord>,
    pub rejections: Vec<IngestError>,
}

pub fn ingest_awards(text: &str) -> AwardIngest {
    let mut out = AwardIngest::default();
    let mut seen = std::collections::BTreeSet::new();
    for result in parse_awards(text) {
        match result {
            Ok(a) if !seen.insert(a.award_number.clone()) => {
                out.rejections.push(IngestError::DuplicateAwardNumber(a.award_number));
            }
            Ok(a) => out.records.push(a),
            Err(e) => out.rejections.push(e),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conservation_and_duplicates() {
        let text = "id: a\n\nx\n%%\nid: a\n\ny\n%%\nid: b\n\n\n%%\nid: c\n\nz\n%%\n";
        let out = ingest_calls(text, NaiveDate::from_ymd_opt(2020, 1, 1).unwrap());
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.rejections.len(), 2);
        assert_eq!(out.tally.total, 4);
        assert_eq!(out.tally.accepted + out.rejections.len() as u64, out.tally.total);
    }

    #[test]
    fn award_conservation() {
        let one = |n: &str| format!("<award><number>{n}</number><title>t</title><abstract>a</abstract><pi>p</pi><year>2001</year></award>");
        let doc = format!("<awards>{}{}{}<award><title>x</title></award></awards>", one("1"), one("2"), one("1"));
        let out = ingest_awards(&doc);
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.rejections.len(), 2);
    }
}
