//! Award archive entries.
//!
//! Each award is an `<award>` element with `<number>`, `<title>`,
//! `<abstract>`, `<pi>`, `<amount>` and `<year>` children, plus an optional
//! `<agency>`. A file may hold many awards under any wrapper element.

use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::money::Money;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AwardRecord {
    pub award_number: String,
    pub agency_id: String,
    pub title: String,
    pub synopsis: String,
    pub pi_username: String,
    pub amount: Option<Money>,
    pub year: i32,
}

#[derive(Default)]
struct AwardFields {
    number: Option<String>,
    agency: Option<String>,
    title: Option<String>,
    abstract_: Option<String>,
    pi: Option<String>,
    amount: Option<String>,
    year: Option<String>,
}

impl AwardFields {
    fn slot(&mut self, tag: &[u8]) -> Option<&mut Option<String>> {
        Some(match tag {
            b"number" => &mut self.number,
            b"agency" => &mut self.agency,
            b"title" => &mut self.title,
            b"abstract" => &mut self.abstract_,
            b"pi" => &mut self.pi,
            b"amount" => &mut self.amount,
            b"year" => &mut self.year,
            _ => return None,
        })
    }

    fn into_record(self) -> Result<AwardRecord, IngestError> {
        let clean = |v: Option<String>| v.map(|s| s.split_whitespace().collect::<Vec<_>>().join(" "));
        let award_number = clean(self.number)
            .filter(|s| !s.is_empty())
            .ok_or(IngestError::MissingAwardNumber)?;
        let field = |name: &'static str, v: Option<String>| {
            clean(v)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| IngestError::MissingField { record: award_number.clone(), field: name })
        };
        let title = field("title", self.title)?;
        let synopsis = field("abstract", self.abstract_)?;
        let pi_username = field("pi", self.pi)?;
        let year_text = field("year", self.year)?;
        let year = year_text.parse().map_err(|_| IngestError::InvalidField {
            record: award_number.clone(),
            field: "year",
            value: year_text.clone(),
        })?;
        let amount = match clean(self.amount).filter(|s| !s.is_empty()) {
            None => None,
            Some(text) => Some(parse_money(&text).ok_or_else(|| IngestError::InvalidField {
                record: award_number.clone(),
                field: "amount",
                value: text.clone(),
            })?),
        };
        Ok(AwardRecord {
            award_number,
            agency_id: clean(self.agency).unwrap_or_default(),
            title,
            synopsis,
            pi_username,
            amount,
            year,
        })
    }
}

/// `1234`, `$1,234` or `1234.56` (rounded half up to dollars).
fn parse_money(text: &str) -> Option<Money> {
    let cleaned: String = text.chars().filter(|c| *c != '$' && *c != ',').collect();
    let (whole, frac) = cleaned.split_once('.').unwrap_or((&cleaned, ""));
    let whole: u64 = whole.trim().parse().ok()?;
    let round_up = match frac.chars().next() {
        None => false,
        Some(d) if frac.chars().all(|c| c.is_ascii_digit()) => d >= '5',
        Some(_) => return None,
    };
    Some(Money(whole + u64::from(round_up)))
}

/// Parses every `<award>` element in `text`.
///
/// Malformed markup ends the scan with a single trailing error.
pub fn parse_awards(text: &str) -> Vec<Result<AwardRecord, IngestError>> {
    let mut reader = Reader::from_str(text);
    let mut results = Vec::new();
    let mut current: Option<AwardFields> = None;
    let mut field: Option<Vec<u8>> = None;
    let mut buffer = String::new();

    loop {
        let event = match reader.read_event() {
            Ok(ev) => ev,
            Err(e) => {
                results.push(Err(IngestError::Markup(e.to_string())));
                break;
            }
        };
        match event {
            Event::Start(e) => {
                let name = e.local_name().as_ref().to_vec();
                if name == b"award" {
                    current = Some(AwardFields::default());
                } else if current.is_some() {
                    field = Some(name);
                    buffer.clear();
                }
            }
            Event::Text(t) => {
                if field.is_some() {
                    match t.unescape() {
                        Ok(s) => buffer.push_str(&s),
                        Err(e) => {
                            results.push(Err(IngestError::Markup(e.to_string())));
                            break;
                        }
                    }
                }
            }
            Event::CData(c) => {
                if field.is_some() {
                    buffer.push_str(&String::from_utf8_lossy(&c));
                }
            }
            Event::End(e) => {
                let name = e.local_name().as_ref().to_vec();
                if name == b"award" {
                    if let Some(fields) = current.take() {
                        results.push(fields.into_record());
                    }
                    field = None;
                } else if field.as_deref() == Some(name.as_slice()) {
                    if let Some(slot) = current.as_mut().and_then(|c| c.slot(&name)) {
                        *slot = Some(std::mem::take(&mut buffer));
                    }
                    field = None;
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    results
}

/// Parses a single award entry.
pub fn parse_award_record(raw: &str) -> Result<AwardRecord, IngestError> {
    let mut all = parse_awards(raw);
    match all.len() {
        1 => all.pop().expect("length checked"),
        0 => Err(IngestError::Markup("no <award> element".into())),
        n => Err(IngestError::Markup(format!("expected one <award>, found {n}"))),
    }
}
