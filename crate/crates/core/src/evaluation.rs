//! Retrospective hit@k against past awards, and rating aggregation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{AwardRecord, CallRecord, ResearcherProfile};
use crate::matching::{top_k_calls, MatchError, MatchList, Matcher};
use crate::scalar::Scalar;

/// Default "satisfied" cut-off on the 1-10 rating scale.
pub const DEFAULT_RATING_THRESHOLD: u8 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("rating {0} is outside 1..=10")]
pub struct RatingOutOfRange(pub i64);

/// A 1-10 Likert rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Rating(u8);

impl Rating {
    pub fn new(value: i64) -> Result<Self, RatingOutOfRange> {
        if (1..=10).contains(&value) {
            Ok(Rating(value as u8))
        } else {
            Err(RatingOutOfRange(value))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<i64> for Rating {
    type Error = RatingOutOfRange;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Rating::new(value)
    }
}

impl From<Rating> for u8 {
    fn from(r: Rating) -> u8 {
        r.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackEvent {
    pub user_id: String,
    pub call_id: String,
    pub rating: Rating,
    pub period_id: String,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserFeedback {
    pub total: usize,
    pub at_or_above: usize,
    /// Calls rated below the threshold, in event order.
    pub below_threshold: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackSummary {
    pub threshold: u8,
    pub total: usize,
    pub at_or_above: usize,
    pub per_user: BTreeMap<String, UserFeedback>,
}

pub fn feedback_summary(events: &[FeedbackEvent], threshold: u8) -> FeedbackSummary {
    let mut per_user: BTreeMap<String, UserFeedback> = BTreeMap::new();
    let mut at_or_above = 0;
    for e in events {
        let entry = per_user.entry(e.user_id.clone()).or_default();
        entry.total += 1;
        if e.rating.get() >= threshold {
            entry.at_or_above += 1;
            at_or_above += 1;
        } else {
            entry.below_threshold.push(e.call_id.clone());
        }
    }
    FeedbackSummary { threshold, total: events.len(), at_or_above, per_user }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiOutcome {
    pub username: String,
    pub hit: bool,
    pub actual_awards: Vec<String>,
    /// Actual awards found in the top-k list.
    pub matched_awards: Vec<String>,
    /// No ranking was available for this PI; counted as a miss.
    pub missing_list: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub k: usize,
    pub pis_evaluated: usize,
    pub hits: usize,
    pub hit_rate: f64,
    pub awards_evaluated: usize,
    pub awards_matched: usize,
    pub award_hit_rate: f64,
    pub per_user: Vec<PiOutcome>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// PIs that had awards but no ranking.
    pub fn missing_pis(&self) -> impl Iterator<Item = &str> {
        self.per_user.iter().filter(|p| p.missing_list).map(|p| p.username.as_str())
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<20} {:>4} {:>7} {:>7}  note", "pi", "hit", "awards", "matched")?;
        for p in &self.per_user {
            write!(
                f,
                "{:<20} {:>4} {:>7} {:>7}",
                p.username,
                if p.hit { "yes" } else { "no" },
                p.actual_awards.len(),
                p.matched_awards.len(),
            )?;
            writeln!(f, "{}", if p.missing_list { "  not in roster" } else { "" })?;
        }
        writeln!(f, "hit@{}: {}/{} = {:.3}", self.k, self.hits, self.pis_evaluated, self.hit_rate)?;
        writeln!(
            f,
            "award-level: {}/{} = {:.3}",
            self.awards_matched, self.awards_evaluated, self.award_hit_rate
        )
    }
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

/// PI-level hit@k: a PI hits when one of their awards is among the first `k`
/// entries of their ranking. `lists` is keyed by PI username.
pub fn hit_rate_at_k(lists: &BTreeMap<String, MatchList>, actuals: &[AwardRecord], k: usize) -> EvalReport {
    let mut by_pi: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for a in actuals {
        by_pi.entry(a.pi_username.as_str()).or_default().insert(a.award_number.as_str());
    }
    let mut per_user = Vec::with_capacity(by_pi.len());
    let (mut hits, mut awards_evaluated, mut awards_matched) = (0, 0, 0);
    for (pi, awards) in by_pi {
        awards_evaluated += awards.len();
        let list = lists.get(pi);
        let matched: Vec<String> = match list {
            Some(list) => list
                .entries
                .iter()
                .take(k)
                .filter(|e| awards.contains(e.call_id.as_str()))
                .map(|e| e.call_id.clone())
                .collect(),
            None => Vec::new(),
        };
        awards_matched += matched.len();
        let hit = !matched.is_empty();
        hits += usize::from(hit);
        per_user.push(PiOutcome {
            username: pi.to_owned(),
            hit,
            actual_awards: awards.iter().map(|s| s.to_string()).collect(),
            matched_awards: matched,
            missing_list: list.is_none(),
        });
    }
    let pis_evaluated = per_user.len();
    EvalReport {
        k,
        pis_evaluated,
        hits,
        hit_rate: ratio(hits, pis_evaluated),
        awards_evaluated,
        awards_matched,
        award_hit_rate: ratio(awards_matched, awards_evaluated),
        per_user,
    }
}

/// Awards viewed as calls so they can be ranked like any other call. The
/// text scored is the title followed by the abstract.
pub fn awards_as_calls(awards: &[AwardRecord]) -> Vec<CallRecord> {
    awards
        .iter()
        .map(|a| CallRecord {
            call_id: a.award_number.clone(),
            agency_id: a.agency_id.clone(),
            url: String::new(),
            title: Some(a.title.clone()),
            synopsis: format!("{}. {}", a.title, a.synopsis),
            deadlines: Vec::new(),
            budget_total: a.amount,
            keywords: Vec::new(),
            is_open: false,
        })
        .collect()
}

/// Full award rankings for every matchable profile, keyed by username.
pub fn award_match_lists<F: Scalar>(
    profiles: &[ResearcherProfile],
    awards: &[AwardRecord],
    matcher: &Matcher<'_, F>,
) -> Result<BTreeMap<String, MatchList>, MatchError> {
    let calls = awards_as_calls(awards);
    let mut out = BTreeMap::new();
    for p in profiles.iter().filter(|p| p.is_matchable()) {
        out.insert(p.username.clone(), top_k_calls(p, &calls, matcher, calls.len(), 0)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{MatchScore, Strategy};
    use proptest::prelude::*;

    fn award(number: &str, pi: &str) -> AwardRecord {
        AwardRecord {
            award_number: number.into(),
            agency_id: "NSF".into(),
            title: String::new(),
            synopsis: String::new(),
            pi_username: pi.into(),
            amount: None,
            year: 2015,
        }
    }

    fn list(user: &str, ids: &[&str]) -> MatchList {
        MatchList {
            user_id: user.into(),
            k: ids.len(),
            entries: ids
                .iter()
                .enumerate()
                .map(|(i, id)| MatchScore {
                    user_id: user.into(),
                    call_id: (*id).into(),
                    strategy: Strategy::Fuzzy,
                    score: 100 - i as u8,
                    flag: None,
                })
                .collect(),
        }
    }

    fn event(user: &str, call: &str, rating: i64) -> FeedbackEvent {
        FeedbackEvent {
            user_id: user.into(),
            call_id: call.into(),
            rating: Rating::new(rating).unwrap(),
            period_id: "2020-spring".into(),
            timestamp: "2020-03-01T00:00:00Z".parse().unwrap(),
        }
    }

    #[test]
    fn rating_range() {
        assert!(Rating::new(0).is_err());
        assert!(Rating::new(11).is_err());
        assert_eq!(Rating::new(10).unwrap().get(), 10);
        assert!(serde_json::from_str::<Rating>("0").is_err());
        assert_eq!(serde_json::from_str::<Rating>("7").unwrap().get(), 7);
    }

    #[test]
    fn all_first_is_perfect() {
        let lists = BTreeMap::from([("a".to_string(), list("a", &["A1", "X"])), ("b".to_string(), list("b", &["B1"]))]);
        let r = hit_rate_at_k(&lists, &[award("A1", "a"), award("B1", "b")], 1);
        assert_eq!(r.hit_rate, 1.0);
        assert_eq!(r.award_hit_rate, 1.0);
    }

    #[test]
    fn no_overlap_is_zero() {
        let lists = BTreeMap::from([("a".to_string(), list("a", &["X", "Y"]))]);
        let r = hit_rate_at_k(&lists, &[award("A1", "a")], 10);
        assert_eq!((r.hits, r.hit_rate), (0, 0.0));
    }

    #[test]
    fn missing_pi_counts_as_flagged_miss() {
        let lists = BTreeMap::from([("a".to_string(), list("a", &["A1"]))]);
        let r = hit_rate_at_k(&lists, &[award("A1", "a"), award("Z1", "ghost")], 10);
        assert_eq!((r.hits, r.pis_evaluated), (1, 2));
        assert_eq!(r.missing_pis().collect::<Vec<_>>(), vec!["ghost"]);
        assert!(r.to_string().contains("not in roster"));
        assert!(r.to_json().contains("\"hit_rate\": 0.5"));
    }

    #[test]
    fn award_level_counts_each_award() {
        let lists = BTreeMap::from([("a".to_string(), list("a", &["A1", "X", "A2"]))]);
        let r = hit_rate_at_k(&lists, &[award("A1", "a"), award("A2", "a"), award("A3", "a")], 2);
        assert_eq!((r.hits, r.awards_matched, r.awards_evaluated), (1, 1, 3));
    }

    #[test]
    fn feedback_counts() {
        let mut events: Vec<_> = (0..65).map(|i| event(&format!("u{}", i % 7), &format!("c{i}"), 7 + i % 4)).collect();
        events.extend((0..5).map(|i| event(&format!("u{i}"), &format!("low{i}"), 3)));
        let s = feedback_summary(&events, DEFAULT_RATING_THRESHOLD);
        assert_eq!((s.total, s.at_or_above), (70, 65));
        assert_eq!(s.per_user["u0"].below_threshold, vec!["low0"]);
        assert_eq!(feedback_summary(&[], 7).total, 0);
        let sevens: Vec<_> = (0..4).map(|i| event("u", &format!("c{i}"), 7)).collect();
        assert_eq!(feedback_summary(&sevens, 7).at_or_above, 4);
    }

    proptest! {
        #[test]
        fn hit_rate_monotone_in_k(ranks in proptest::collection::vec(0usize..20, 1..8)) {
            let mut lists = BTreeMap::new();
            let mut actuals = Vec::new();
            for (i, r) in ranks.iter().enumerate() {
                let pi = format!("p{i}");
                let mut ids: Vec<String> = (0..20).map(|j| format!("x{i}-{j}")).collect();
                ids[*r] = format!("award{i}");
                let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
                lists.insert(pi.clone(), list(&pi, &refs));
                actuals.push(award(&format!("award{i}"), &pi));
            }
            let mut prev = 0.0;
            for k in 0..=21 {
                let r = hit_rate_at_k(&lists, &actuals, k);
                prop_assert!((0.0..=1.0).contains(&r.hit_rate));
                prop_assert!(r.hit_rate >= prev);
                prev = r.hit_rate;
            }
        }

        #[test]
        fn threshold_count_non_increasing(ratings in proptest::collection::vec(1i64..=10, 0..40)) {
            let events: Vec<_> = ratings.iter().enumerate().map(|(i, r)| event("u", &format!("c{i}"), *r)).collect();
            let mut prev = usize::MAX;
            for t in 0..=11 {
                let n = feedback_summary(&events, t).at_or_above;
                prop_assert!(n <= prev);
                prev = n;
            }
        }
    }
}
