use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::constraints::{allocate_budget, check_constraints, team_size_cap, ConstraintReport};
use super::TeamingConfig;
use crate::ingest::{CallRecord, ResearcherProfile};
use crate::matching::{top_k_calls, MatchError, MatchScore, Matcher};
use crate::money::Money;
use crate::scalar::Scalar;
use crate::workflow::WorkflowState;

/// A proposed team for one call.
///
/// Serialized field order: `team_id`, `call_id`, `lead`, `lead_score`,
/// `members`, `proposed_budget`, `per_member_allocation`, `report`, `state`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamRecommendation {
    pub team_id: String,
    pub call_id: String,
    pub lead: String,
    pub lead_score: MatchScore,
    /// Non-lead members in selection order.
    pub members: Vec<MatchScore>,
    pub proposed_budget: Option<Money>,
    pub per_member_allocation: Option<Money>,
    pub report: ConstraintReport,
    pub state: WorkflowState,
}

impl TeamRecommendation {
    /// Lead first, then members.
    pub fn participants(&self) -> Vec<&str> {
        std::iter::once(self.lead.as_str())
            .chain(self.members.iter().map(|m| m.user_id.as_str()))
            .collect()
    }

    pub fn size(&self) -> usize {
        1 + self.members.len()
    }

    pub fn contains(&self, user_id: &str) -> bool {
        self.lead == user_id || self.members.iter().any(|m| m.user_id == user_id)
    }
}

/// Team identifier for a (call, lead) pair.
pub fn team_id(call_id: &str, lead: &str) -> String {
    format!("{call_id}~{lead}")
}

/// A researcher together with their score for the call at hand.
#[derive(Debug, Clone, Copy)]
pub struct Candidate<'a> {
    pub profile: &'a ResearcherProfile,
    pub score: &'a MatchScore,
}

fn by_score_then_id(a: &Candidate<'_>, b: &Candidate<'_>) -> std::cmp::Ordering {
    b.score
        .score
        .cmp(&a.score.score)
        .then_with(|| a.profile.user_id.cmp(&b.profile.user_id))
}

/// Greedy team formation around `lead`.
///
/// Candidates are visited by descending score (ties by ascending user id);
/// each joins when the enlarged team still satisfies every constraint. The
/// loop stops at the size cap or when candidates run out. Candidates that
/// are the lead, repeat an earlier user id, or fall below the relevance
/// floor are ignored. Returns `None` when fewer than two people remain.
pub fn build_team(
    call: &CallRecord,
    lead: Candidate<'_>,
    candidates: &[Candidate<'_>],
    config: &TeamingConfig,
) -> Option<TeamRecommendation> {
    let cap = team_size_cap(call.budget_total, config);
    if cap < 2 {
        return None;
    }
    let mut sorted: Vec<Candidate<'_>> = candidates
        .iter()
        .copied()
        .filter(|c| c.profile.user_id != lead.profile.user_id && c.score.score >= config.relevance_floor)
        .collect();
    sorted.sort_by(by_score_then_id);
    let mut seen = BTreeSet::new();
    sorted.retain(|c| seen.insert(c.profile.user_id.as_str()));

    let mut team: Vec<Candidate<'_>> = vec![lead];
    for candidate in sorted {
        if team.len() >= cap {
            break;
        }
        team.push(candidate);
        let view: Vec<(&str, &_)> = team.iter().map(|c| (c.profile.user_id.as_str(), &c.profile.skills)).collect();
        if !check_constraints(&view, call.budget_total, config).all_satisfied() {
            team.pop();
        }
    }
    if team.len() < 2 {
        return None;
    }

    let view: Vec<(&str, &_)> = team.iter().map(|c| (c.profile.user_id.as_str(), &c.profile.skills)).collect();
    let report = check_constraints(&view, call.budget_total, config);
    debug_assert!(report.all_satisfied());
    Some(TeamRecommendation {
        team_id: team_id(&call.call_id, &lead.profile.user_id),
        call_id: call.call_id.clone(),
        lead: lead.profile.user_id.clone(),
        lead_score: lead.score.clone(),
        members: team[1..].iter().map(|c| c.score.clone()).collect(),
        proposed_budget: call.budget_total,
        per_member_allocation: allocate_budget(team.len(), call.budget_total),
        report,
        state: WorkflowState::proposed(call.last_deadline()),
    })
}

fn scored_pool<F: Scalar>(
    call: &CallRecord,
    profiles: &[ResearcherProfile],
    matcher: &Matcher<'_, F>,
    floor: u8,
) -> Result<Vec<(usize, MatchScore)>, MatchError> {
    let mut pool = Vec::new();
    for (i, p) in profiles.iter().enumerate() {
        if !p.is_matchable() {
            continue;
        }
        let s = matcher.score(call, p)?;
        if s.score >= floor {
            pool.push((i, s));
        }
    }
    Ok(pool)
}

/// Teams led by `user` for each of their top-k calls, skipping calls whose
/// deadlines have all passed.
///
/// Ordered by the user's own score (ties by call id) and truncated to
/// `max_recs_per_user_per_period` when set.
pub fn recommend_for_user<F: Scalar>(
    user: &ResearcherProfile,
    calls: &[CallRecord],
    profiles: &[ResearcherProfile],
    matcher: &Matcher<'_, F>,
    config: &TeamingConfig,
) -> Result<Vec<TeamRecommendation>, MatchError> {
    if !user.is_matchable() {
        return Ok(Vec::new());
    }
    let ranked = top_k_calls(user, calls, matcher, calls.len(), config.relevance_floor)?;
    let mut out = Vec::new();
    let closed: BTreeSet<&str> = calls.iter().filter(|c| c.is_closed()).map(|c| c.call_id.as_str()).collect();
    let open = ranked.entries.iter().filter(|e| !closed.contains(e.call_id.as_str()));
    for entry in open.take(config.k) {
        let Some(call) = calls.iter().find(|c| c.call_id == entry.call_id) else {
            continue;
        };
        let pool = scored_pool(call, profiles, matcher, config.relevance_floor)?;
        let candidates: Vec<Candidate<'_>> = pool
            .iter()
            .filter(|(i, _)| profiles[*i].user_id != user.user_id)
            .map(|(i, s)| Candidate { profile: &profiles[*i], score: s })
            .collect();
        let lead = Candidate { profile: user, score: entry };
        if let Some(team) = build_team(call, lead, &candidates, config) {
            out.push(team);
        }
        if config.max_recs_per_user_per_period.is_some_and(|max| out.len() >= max) {
            break;
        }
    }
    Ok(out)
}

/// The best team for a call, led by its highest-scoring researcher.
pub fn recommend_for_call<F: Scalar>(
    call: &CallRecord,
    profiles: &[ResearcherProfile],
    matcher: &Matcher<'_, F>,
    config: &TeamingConfig,
) -> Result<Option<TeamRecommendation>, MatchError> {
    if call.is_closed() {
        return Ok(None);
    }
    let pool = scored_pool(call, profiles, matcher, config.relevance_floor)?;
    let mut candidates: Vec<Candidate<'_>> = pool
        .iter()
        .map(|(i, s)| Candidate { profile: &profiles[*i], score: s })
        .collect();
    candidates.sort_by(by_score_then_id);
    let Some((&lead, rest)) = candidates.split_first() else {
        return Ok(None);
    };
    Ok(build_team(call, lead, rest, config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::Strategy;
    use crate::skills::SkillSet;
    use std::collections::BTreeMap;

    fn call(budget: Option<u64>) -> CallRecord {
        CallRecord {
            call_id: "brain".into(),
            agency_id: "NSF".into(),
            url: "https://example.org/brain".into(),
            title: Some("Brain Function".into()),
            synopsis: "neural circuits".into(),
            deadlines: vec!["2014-01-15".parse().unwrap()],
            budget_total: budget.map(Money),
            keywords: vec![],
            is_open: true,
        }
    }

    fn profile(id: &str, skills: &[&str]) -> ResearcherProfile {
        let mut p = ResearcherProfile::new(id, id, BTreeMap::new());
        p.skills = SkillSet::from_raw(skills);
        p
    }

    fn score(user: &str, value: u8) -> MatchScore {
        MatchScore { user_id: user.into(), call_id: "brain".into(), strategy: Strategy::Vector, score: value, flag: None }
    }

    #[test]
    fn no_candidates_no_team() {
        let lead = profile("lead", &["x"]);
        let s = score("lead", 90);
        assert!(build_team(&call(None), Candidate { profile: &lead, score: &s }, &[], &TeamingConfig::default()).is_none());
    }

    #[test]
    fn five_person_team_in_score_order_with_id_ties() {
        // scores 84, 84, 83, 80, 76 with a lead and distinct skills
        let lead = profile("lead", &["neuromorphic hardware"]);
        let people = [
            profile("hale", &["materials informatics"]),
            profile("abara", &["reinforcement learning"]),
            profile("voss", &["computational biology"]),
            profile("zhou", &["nanoscale electronics"]),
            profile("lund", &["mobile security"]),
        ];
        let scores = [score("hale", 84), score("abara", 84), score("voss", 83), score("zhou", 80), score("lund", 76)];
        let lead_score = score("lead", 90);
        let candidates: Vec<_> = people.iter().zip(&scores).map(|(p, s)| Candidate { profile: p, score: s }).collect();
        let config = TeamingConfig { team_cap: 6, ..TeamingConfig::default() };
        let team = build_team(&call(None), Candidate { profile: &lead, score: &lead_score }, &candidates, &config).unwrap();
        let ids: Vec<_> = team.members.iter().map(|m| (m.user_id.as_str(), m.score)).collect();
        assert_eq!(ids, vec![("abara", 84), ("hale", 84), ("voss", 83), ("zhou", 80), ("lund", 76)]);
        assert!(team.report.all_satisfied());
        assert_eq!(team.team_id, "brain~lead");
        assert_eq!(team.state.expires_on, Some("2014-01-15".parse().unwrap()));
    }

    #[test]
    fn default_cap_keeps_top_four_besides_lead() {
        let lead = profile("lead", &["a0"]);
        let people: Vec<_> = (1..=6).map(|i| profile(&format!("u{i}"), &[&format!("a{i}")])).collect();
        let scores: Vec<_> = (1..=6).map(|i| score(&format!("u{i}"), 100 - i as u8)).collect();
        let lead_score = score("lead", 99);
        let candidates: Vec<_> = people.iter().zip(&scores).map(|(p, s)| Candidate { profile: p, score: s }).collect();
        let team = build_team(&call(None), Candidate { profile: &lead, score: &lead_score }, &candidates, &TeamingConfig::default()).unwrap();
        assert_eq!(team.size(), 5);
        assert_eq!(team.participants(), vec!["lead", "u1", "u2", "u3", "u4"]);
    }

    #[test]
    fn duplicate_skill_candidates_are_skipped() {
        let lead = profile("lead", &["optics"]);
        let dup = profile("dup", &["optics"]);
        let ok = profile("ok", &["acoustics"]);
        let (sl, sd, so) = (score("lead", 95), score("dup", 90), score("ok", 60));
        let team = build_team(
            &call(None),
            Candidate { profile: &lead, score: &sl },
            &[Candidate { profile: &dup, score: &sd }, Candidate { profile: &ok, score: &so }],
            &TeamingConfig::default(),
        )
        .unwrap();
        assert_eq!(team.participants(), vec!["lead", "ok"]);
    }

    #[test]
    fn budget_limits_size_and_sets_allocation() {
        let lead = profile("lead", &["a0"]);
        let people: Vec<_> = (1..=4).map(|i| profile(&format!("u{i}"), &[&format!("a{i}")])).collect();
        let scores: Vec<_> = (1..=4).map(|i| score(&format!("u{i}"), 90)).collect();
        let lead_score = score("lead", 99);
        let candidates: Vec<_> = people.iter().zip(&scores).map(|(p, s)| Candidate { profile: p, score: s }).collect();
        let team = build_team(&call(Some(150_000)), Candidate { profile: &lead, score: &lead_score }, &candidates, &TeamingConfig::default()).unwrap();
        assert_eq!(team.size(), 3);
        assert_eq!(team.per_member_allocation, Some(Money(50_000)));
        assert!(build_team(&call(Some(99_999)), Candidate { profile: &lead, score: &lead_score }, &candidates, &TeamingConfig::default()).is_none());
    }

    #[test]
    fn recommend_for_call_two_users() {
        let profiles = vec![profile("a", &["robot arms"]), profile("b", &["robot"])];
        let c = CallRecord { synopsis: "robot arms".into(), ..call(None) };
        let team = recommend_for_call(&c, &profiles, &Matcher::<f64>::Fuzzy, &TeamingConfig::default()).unwrap().unwrap();
        assert_eq!(team.lead, "a");
        assert_eq!(team.participants(), vec!["a", "b"]);
    }

    #[test]
    fn recommend_for_call_with_one_match_is_absent() {
        let profiles = vec![profile("a", &["robot arms"]), profile("b", &["poetry"])];
        let c = CallRecord { synopsis: "robot arms".into(), ..call(None) };
        assert!(recommend_for_call(&c, &profiles, &Matcher::<f64>::Fuzzy, &TeamingConfig::default()).unwrap().is_none());
    }

    #[test]
    fn closed_calls_get_no_teams() {
        let profiles = vec![profile("a", &["robot arms"]), profile("b", &["robot"])];
        let closed = CallRecord { synopsis: "robot arms".into(), is_open: false, ..call(None) };
        let undated = CallRecord { call_id: "undated".into(), deadlines: vec![], is_open: false, ..closed.clone() };
        let config = TeamingConfig { k: 1, ..TeamingConfig::default() };
        assert!(recommend_for_call(&closed, &profiles, &Matcher::<f64>::Fuzzy, &config).unwrap().is_none());
        assert!(recommend_for_call(&undated, &profiles, &Matcher::<f64>::Fuzzy, &config).unwrap().is_some());
        // the closed call ranks first but does not use up the single slot
        let recs = recommend_for_user(&profiles[0], &[closed, undated], &profiles, &Matcher::<f64>::Fuzzy, &config).unwrap();
        assert_eq!(recs.iter().map(|t| t.call_id.as_str()).collect::<Vec<_>>(), ["undated"]);
    }

    #[test]
    fn user_without_matches_gets_nothing() {
        let profiles = vec![profile("a", &["poetry"]), profile("b", &["robot"])];
        let c = CallRecord { synopsis: "robot arms".into(), ..call(None) };
        let recs = recommend_for_user(&profiles[0], &[c], &profiles, &Matcher::<f64>::Fuzzy, &TeamingConfig::default()).unwrap();
        assert!(recs.is_empty());
    }
}
