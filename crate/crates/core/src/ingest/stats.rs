use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::roster::RosterFunnel;
use super::call::CallRecord;

/// A percentage with one decimal, stored in tenths of a percent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent {
    tenths: u32,
}

impl Percent {
    pub const FULL: Percent = Percent { tenths: 1000 };

    pub const fn from_tenths(tenths: u32) -> Self {
        Percent { tenths }
    }

    /// `100 * count / total`, truncated to one decimal: 1782 of 1797 is
    /// 99.1, not 99.2.
    pub fn of(count: u64, total: u64) -> Option<Percent> {
        (total > 0).then(|| Percent {
            tenths: ((u128::from(count) * 1000) / u128::from(total)) as u32,
        })
    }

    pub const fn tenths(self) -> u32 {
        self.tenths
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.tenths / 10, self.tenths % 10)
    }
}

impl Serialize for Percent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(f64::from(self.tenths) / 10.0)
    }
}

impl<'de> Deserialize<'de> for Percent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let value = f64::deserialize(d)?;
        if !(0.0..=1000.0).contains(&value) {
            return Err(serde::de::Error::custom("percent out of range"));
        }
        Ok(Percent { tenths: (value * 10.0).round() as u32 })
    }
}

/// One row of the extraction table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldTally {
    pub field: String,
    pub extracted: u64,
    pub total: u64,
    pub percent: Percent,
    /// Set when `total == 0`; `percent` then reads 100.0.
    pub empty_denominator: bool,
}

impl FieldTally {
    pub fn new(field: impl Into<String>, extracted: u64, total: u64) -> Self {
        assert!(extracted <= total, "extracted exceeds total");
        FieldTally {
            field: field.into(),
            extracted,
            total,
            percent: Percent::of(extracted, total).unwrap_or(Percent::FULL),
            empty_denominator: total == 0,
        }
    }
}

/// Running counts over parsed call records. Merging is associative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallTally {
    pub total: u64,
    pub accepted: u64,
    pub with_title: u64,
    pub with_deadline: u64,
    pub with_budget: u64,
}

impl CallTally {
    pub fn record_rejected(&mut self) {
        self.total += 1;
    }

    pub fn record_accepted(&mut self, call: &CallRecord) {
        self.total += 1;
        self.accepted += 1;
        self.with_title += u64::from(call.title.is_some());
        self.with_deadline += u64::from(!call.deadlines.is_empty());
        self.with_budget += u64::from(call.budget_total.is_some());
    }

    pub fn merge(self, other: CallTally) -> CallTally {
        CallTally {
            total: self.total + other.total,
            accepted: self.accepted + other.accepted,
            with_title: self.with_title + other.with_title,
            with_deadline: self.with_deadline + other.with_deadline,
            with_budget: self.with_budget + other.with_budget,
        }
    }
}

/// Extraction coverage for calls and the roster funnel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionStats {
    pub fields: Vec<FieldTally>,
    pub roster: Option<RosterFunnel>,
    pub awards_parsed: u64,
    pub awards_rejected: u64,
}

impl ExtractionStats {
    pub fn field(&self, name: &str) -> Option<&FieldTally> {
        self.fields.iter().find(|f| f.field == name)
    }
}

/// Builds the coverage table.
///
/// Call rows use the number of input call records as denominator. The
/// `users` row counts profiles left after the designation filter, and
/// `users_research` those of them with at least one skill.
pub fn ingestion_report(calls: &CallTally, roster: Option<&RosterFunnel>) -> ExtractionStats {
    let mut fields = vec![
        FieldTally::new("rfp", calls.accepted, calls.total),
        FieldTally::new("title", calls.with_title, calls.total),
        FieldTally::new("deadline", calls.with_deadline, calls.total),
        FieldTally::new("budget", calls.with_budget, calls.total),
        FieldTally::new("synopsis", calls.accepted, calls.total),
    ];
    if let Some(funnel) = roster {
        fields.push(FieldTally::new("users", funnel.remaining, funnel.remaining));
        fields.push(FieldTally::new("users_research", funnel.with_research_info, funnel.remaining));
    }
    ExtractionStats {
        fields,
        roster: roster.copied(),
        awards_parsed: 0,
        awards_rejected: 0,
    }
}

impl fmt::Display for ExtractionStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<16} {:>8} {:>8} {:>12}", "Type", "Number", "Total", "% Extracted")?;
        for row in &self.fields {
            let flag = if row.empty_denominator { " (empty)" } else { "" };
            writeln!(f, "{:<16} {:>8} {:>8} {:>12}{flag}", row.field, row.extracted, row.total, row.percent)?;
        }
        if let Some(r) = &self.roster {
            writeln!(
                f,
                "roster: {} extracted, {} rejected, {} removed by designation, {} remaining, {} with research info",
                r.total_extracted, r.rejected_records, r.removed_by_designation, r.remaining, r.with_research_info
            )?;
        }
        if self.awards_parsed + self.awards_rejected > 0 {
            writeln!(f, "awards: {} parsed, {} rejected", self.awards_parsed, self.awards_rejected)?;
        }
        Ok(())
    }
}
