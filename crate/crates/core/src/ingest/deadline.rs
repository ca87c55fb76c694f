use std::sync::LazyLock;

use chrono::NaiveDate;
use regex::Regex;

static MONTH_DAY_YEAR: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)\b(jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|june?|july?|aug(?:ust)?|sep(?:t(?:ember)?)?|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?)\.?\s+(\d{1,2}),?\s+(\d{4})\b",
    )
    .unwrap()
});

static NUMERIC: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(\d{1,2})/(\d{1,2})/(\d{4})\b").unwrap());

static DEADLINE_CUE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)deadline|due date|due by|due on").unwrap());

fn month_number(name: &str) -> u32 {
    match &name.to_ascii_lowercase()[..3] {
        "jan" => 1,
        "feb" => 2,
        "mar" => 3,
        "apr" => 4,
        "may" => 5,
        "jun" => 6,
        "jul" => 7,
        "aug" => 8,
        "sep" => 9,
        "oct" => 10,
        "nov" => 11,
        _ => 12,
    }
}

/// Result of scanning a text for deadline dates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeadlineScan {
    /// Valid dates, ascending and deduplicated.
    pub dates: Vec<NaiveDate>,
    /// Matched date-shaped strings that are not calendar dates.
    pub malformed: Vec<String>,
}

/// Dates on lines that mention a deadline or due date.
///
/// Recognizes `Month DD, YYYY` (full or three-letter month names) and
/// `MM/DD/YYYY`. Every match is kept.
pub fn extract_deadlines(text: &str) -> DeadlineScan {
    let mut scan = DeadlineScan::default();
    for line in text.lines().filter(|l| DEADLINE_CUE.is_match(l)) {
        for caps in MONTH_DAY_YEAR.captures_iter(line) {
            let month = month_number(&caps[1]);
            push_date(&mut scan, &caps[0], &caps[3], month, &caps[2]);
        }
        for caps in NUMERIC.captures_iter(line) {
            let Ok(month) = caps[1].parse::<u32>() else { continue };
            push_date(&mut scan, &caps[0], &caps[3], month, &caps[2]);
        }
    }
    scan.dates.sort();
    scan.dates.dedup();
    scan
}

fn push_date(scan: &mut DeadlineScan, matched: &str, year: &str, month: u32, day: &str) {
    let date = year
        .parse::<i32>()
        .ok()
        .zip(day.parse::<u32>().ok())
        .and_then(|(y, d)| NaiveDate::from_ymd_opt(y, month, d));
    match date {
        Some(d) => scan.dates.push(d),
        None => scan.malformed.push(matched.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn full_proposal_deadline() {
        let scan = extract_deadlines("Full Proposal Deadline Date: January 15, 2014");
        assert_eq!(scan.dates, vec![ymd(2014, 1, 15)]);
        assert!(scan.malformed.is_empty());
    }

    #[test]
    fn multiple_tracks_all_kept_sorted() {
        let text = "Full Proposal Deadline(s): November 3, 2021; Second deadline 02/01/2021\nDue date: Sept. 9 2022";
        let scan = extract_deadlines(text);
        assert_eq!(scan.dates, vec![ymd(2021, 2, 1), ymd(2021, 11, 3), ymd(2022, 9, 9)]);
    }

    #[test]
    fn dates_outside_deadline_lines_are_ignored() {
        let scan = extract_deadlines("Posted March 1, 2020.\nNo further dates.");
        assert!(scan.dates.is_empty());
    }

    #[test]
    fn malformed_dates_are_reported_not_kept() {
        let scan = extract_deadlines("Deadline: February 30, 2014 or 13/01/2014");
        assert!(scan.dates.is_empty());
        assert_eq!(scan.malformed.len(), 2);
    }

    #[test]
    fn duplicates_collapse() {
        let scan = extract_deadlines("Deadline: 01/15/2014 (January 15, 2014)");
        assert_eq!(scan.dates, vec![ymd(2014, 1, 15)]);
    }
}
