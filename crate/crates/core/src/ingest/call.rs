//! Funding-call records and the text container they are read from.
//!
//! Container grammar (one or more records per file):
//!
//! ```text
//! record    = header-line* blank-line body-line* [ "%%" newline ]
//! header    = key ":" value        ; keys: id agency url title synopsis
//!                                  ;       keywords deadlines budget
//! body-line = any line other than "%%"
//! ```
//!
//! Lines starting with `#` before a record's first header are comments.
//! `keywords` is `;`-separated, `deadlines` is a `,`-separated list of ISO
//! dates and `budget` is whole dollars. When `title`, `synopsis`,
//! `deadlines` or `budget` are absent they are extracted from the body.

use std::fmt::Write as _;
use std::sync::LazyLock;

use chrono::NaiveDate;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::budget::extract_budget;
use super::deadline::extract_deadlines;
use super::IngestError;
use crate::money::Money;

/// A field-tagged call record as it appears in a corpus file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawCallRecord {
    pub id: String,
    pub agency: String,
    pub url: String,
    pub title: Option<String>,
    pub synopsis: Option<String>,
    pub keywords: Option<String>,
    pub deadlines: Option<String>,
    pub budget: Option<String>,
    pub body: String,
}

/// One validated funding call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallRecord {
    pub call_id: String,
    pub agency_id: String,
    pub url: String,
    pub title: Option<String>,
    pub synopsis: String,
    pub deadlines: Vec<NaiveDate>,
    pub budget_total: Option<Money>,
    pub keywords: Vec<String>,
    pub is_open: bool,
}

impl CallRecord {
    /// Earliest deadline on or after `today`, if any.
    pub fn next_deadline(&self, today: NaiveDate) -> Option<NaiveDate> {
        self.deadlines.iter().copied().find(|d| *d >= today)
    }

    pub fn last_deadline(&self) -> Option<NaiveDate> {
        self.deadlines.last().copied()
    }

    /// Every known deadline is before the reference date. Undated calls are
    /// never closed.
    pub fn is_closed(&self) -> bool {
        !self.is_open && !self.deadlines.is_empty()
    }

    /// Renders the record in container form; parsing it back yields `self`.
    pub fn to_container(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "id: {}", self.call_id);
        let _ = writeln!(out, "agency: {}", self.agency_id);
        let _ = writeln!(out, "url: {}", self.url);
        if let Some(title) = &self.title {
            let _ = writeln!(out, "title: {title}");
        }
        let _ = writeln!(out, "synopsis: {}", self.synopsis);
        if !self.keywords.is_empty() {
            let _ = writeln!(out, "keywords: {}", self.keywords.join("; "));
        }
        let dates: Vec<String> = self.deadlines.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(out, "deadlines: {}", dates.join(", "));
        if let Some(budget) = self.budget_total {
            let _ = writeln!(out, "budget: {}", budget.as_dollars());
        }
        out.push_str("\n%%\n");
        out
    }
}

/// Non-fatal findings while parsing a call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CallWarning {
    MalformedDate(String),
    MalformedBudget(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedCall {
    pub record: CallRecord,
    pub warnings: Vec<CallWarning>,
}

static LABEL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*([A-Za-z][A-Za-z()/ ]{0,48}[A-Za-z)])\s*:\s*(.*)$").unwrap());

fn collapse_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn non_empty(text: &str) -> Option<String> {
    let collapsed = collapse_ws(text);
    (!collapsed.is_empty()).then_some(collapsed)
}

/// A body line of the form `Label: value` with a short alphabetic label.
fn split_label(line: &str) -> Option<(String, &str)> {
    let caps = LABEL.captures(line)?;
    let label = caps.get(1)?.as_str();
    if label.split_whitespace().count() > 6 {
        return None;
    }
    Some((label.to_ascii_lowercase(), caps.get(2)?.as_str()))
}

struct BodyFields {
    title: Option<String>,
    synopsis: Option<String>,
    keywords: Option<String>,
}

/// Splits a body into labelled metadata lines and free text.
///
/// The synopsis is the value of any `...synopsis...`/`summary` label plus
/// every unlabelled line.
fn scan_body(body: &str) -> BodyFields {
    let mut title = None;
    let mut keywords = None;
    let mut synopsis = Vec::new();
    for line in body.lines() {
        match split_label(line) {
            Some((label, value)) => {
                if title.is_none() && (label == "title" || label == "program title") {
                    title = non_empty(value);
                } else if keywords.is_none() && label == "keywords" {
                    keywords = non_empty(value);
                } else if label.contains("synopsis") || label.contains("summary") {
                    synopsis.push(value);
                }
            }
            None => synopsis.push(line),
        }
    }
    BodyFields {
        title,
        synopsis: non_empty(&synopsis.join(" ")),
        keywords,
    }
}

fn split_keywords(text: &str) -> Vec<String> {
    text.split([';', ','])
        .filter_map(non_empty)
        .collect()
}

/// Validates a raw record and extracts title, deadlines and budget.
pub fn parse_call_record(raw: &RawCallRecord, reference_date: NaiveDate) -> Result<ParsedCall, IngestError> {
    let call_id = raw.id.trim();
    if call_id.is_empty() {
        return Err(IngestError::MissingId);
    }
    let body = scan_body(&raw.body);
    let synopsis = raw
        .synopsis
        .as_deref()
        .and_then(non_empty)
        .or(body.synopsis)
        .ok_or_else(|| IngestError::MissingSynopsis(call_id.to_string()))?;
    let title = raw.title.as_deref().and_then(non_empty).or(body.title);
    let keywords = raw
        .keywords
        .as_deref()
        .and_then(non_empty)
        .or(body.keywords)
        .map(|k| split_keywords(&k))
        .unwrap_or_default();

    let mut warnings = Vec::new();
    let mut deadlines = match &raw.deadlines {
        Some(listed) => listed
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .filter_map(|s| match s.parse::<NaiveDate>() {
                Ok(d) => Some(d),
                Err(_) => {
                    warnings.push(CallWarning::MalformedDate(s.to_string()));
                    None
                }
            })
            .collect(),
        None => {
            let scan = extract_deadlines(&raw.body);
            warnings.extend(scan.malformed.into_iter().map(CallWarning::MalformedDate));
            scan.dates
        }
    };
    deadlines.sort();
    deadlines.dedup();

    let budget_total = match &raw.budget {
        Some(listed) => match listed.trim().parse::<u64>() {
            Ok(v) if v > 0 => Some(Money(v)),
            _ => {
                warnings.push(CallWarning::MalformedBudget(listed.clone()));
                None
            }
        },
        None => extract_budget(&raw.body),
    };

    let is_open = deadlines.last().is_some_and(|d| *d >= reference_date);
    Ok(ParsedCall {
        record: CallRecord {
            call_id: call_id.to_string(),
            agency_id: raw.agency.trim().to_string(),
            url: raw.url.trim().to_string(),
            title,
            synopsis,
            deadlines,
            budget_total,
            keywords,
            is_open,
        },
        warnings,
    })
}

/// Splits a container file into raw records.
///
/// A record with no `id` header is still returned (with an empty id) so the
/// caller can count it as rejected.
pub fn read_call_container(text: &str) -> Vec<RawCallRecord> {
    let mut records = Vec::new();
    let mut current: Option<RawCallRecord> = None;
    let mut in_body = false;
    let mut body_lines: Vec<&str> = Vec::new();

    let mut finish = |current: &mut Option<RawCallRecord>, body_lines: &mut Vec<&str>| {
        if let Some(mut rec) = current.take() {
            rec.body = body_lines.join("\n");
            records.push(rec);
        }
        body_lines.clear();
    };

    for line in text.lines() {
        if line.trim_end() == "%%" {
            finish(&mut current, &mut body_lines);
            in_body = false;
            continue;
        }
        if in_body {
            body_lines.push(line);
            continue;
        }
        if current.is_none() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            current = Some(RawCallRecord::default());
        }
        if line.trim().is_empty() {
            in_body = true;
            continue;
        }
        let rec = current.as_mut().expect("record started above");
        match line.split_once(':') {
            Some((key, value)) => {
                let value = value.trim().to_string();
                match key.trim().to_ascii_lowercase().as_str() {
                    "id" => rec.id = value,
                    "agency" => rec.agency = value,
                    "url" => rec.url = value,
                    "title" => rec.title = Some(value),
                    "synopsis" => rec.synopsis = Some(value),
                    "keywords" => rec.keywords = Some(value),
                    "deadlines" => rec.deadlines = Some(value),
                    "budget" => rec.budget = Some(value),
                    // unknown header keys are ignored
                    _ => {}
                }
            }
            // a non-header line ends the header block
            None => {
                in_body = true;
                body_lines.push(line);
            }
        }
    }
    finish(&mut current, &mut body_lines);
    records
}
