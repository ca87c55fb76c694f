use serde::{Deserialize, Serialize};

use super::{fuzzy_match, vector_match, CorpusVectorModel, EmbeddingTable, MatchError, MatchScore, Strategy};
use crate::ingest::{CallRecord, ResearcherProfile};
use crate::scalar::Scalar;

/// A scoring strategy bound to the model it needs.
#[derive(Debug, Clone, Copy)]
pub enum Matcher<'m, F: Scalar = f64> {
    Fuzzy,
    /// tf-idf cosine over a corpus model.
    Corpus(&'m CorpusVectorModel),
    /// Cosine over imported vectors keyed by call id and user id.
    Embeddings(&'m EmbeddingTable<F>),
}

impl<F: Scalar> Matcher<'_, F> {
    pub fn strategy(&self) -> Strategy {
        match self {
            Matcher::Fuzzy => Strategy::Fuzzy,
            Matcher::Corpus(_) | Matcher::Embeddings(_) => Strategy::Vector,
        }
    }

    pub fn score(&self, call: &CallRecord, user: &ResearcherProfile) -> Result<MatchScore, MatchError> {
        let similarity = match self {
            Matcher::Fuzzy => fuzzy_match(&call.synopsis, &user.skills),
            Matcher::Corpus(model) => vector_match::<F>(&call.synopsis, &user.skills, model),
            Matcher::Embeddings(table) => table.score(&call.call_id, &user.user_id)?,
        };
        Ok(MatchScore {
            user_id: user.user_id.clone(),
            call_id: call.call_id.clone(),
            strategy: self.strategy(),
            score: similarity.score,
            flag: similarity.flag,
        })
    }
}

/// A user's best calls, highest score first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchList {
    pub user_id: String,
    pub k: usize,
    pub entries: Vec<MatchScore>,
}

impl MatchList {
    pub fn position(&self, call_id: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.call_id == call_id)
    }

    pub fn call_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.call_id.as_str())
    }
}

/// Orders scores by descending score, then ascending call id.
pub fn rank_order(a: &MatchScore, b: &MatchScore) -> std::cmp::Ordering {
    b.score.cmp(&a.score).then_with(|| a.call_id.cmp(&b.call_id))
}

/// Top `k` calls for `user` whose score reaches `relevance_floor`.
///
/// Repeated call ids are scored once.
pub fn top_k_calls<F: Scalar>(
    user: &ResearcherProfile,
    calls: &[CallRecord],
    matcher: &Matcher<'_, F>,
    k: usize,
    relevance_floor: u8,
) -> Result<MatchList, MatchError> {
    let mut seen = std::collections::BTreeSet::new();
    let mut entries = Vec::with_capacity(calls.len());
    for call in calls {
        if !seen.insert(call.call_id.as_str()) {
            continue;
        }
        let score = matcher.score(call, user)?;
        if score.score >= relevance_floor {
            entries.push(score);
        }
    }
    entries.sort_by(rank_order);
    entries.truncate(k);
    Ok(MatchList {
        user_id: user.user_id.clone(),
        k,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skills::SkillSet;
    use std::collections::BTreeMap;

    fn call(id: &str, synopsis: &str) -> CallRecord {
        CallRecord {
            call_id: id.into(),
            agency_id: "NSF".into(),
            url: String::new(),
            title: None,
            synopsis: synopsis.into(),
            deadlines: vec![],
            budget_total: None,
            keywords: vec![],
            is_open: true,
        }
    }

    fn user(skills: &[&str]) -> ResearcherProfile {
        let mut p = ResearcherProfile::new("u1", "U One", BTreeMap::new());
        p.skills = SkillSet::from_raw(skills);
        p
    }

    #[test]
    fn no_calls_gives_empty_list() {
        let list = top_k_calls(&user(&["x"]), &[], &Matcher::<f64>::Fuzzy, 10, 0).unwrap();
        assert!(list.entries.is_empty());
    }

    #[test]
    fn equal_scores_order_by_call_id() {
        let calls = [call("b", "robot arms"), call("a", "robot arms")];
        let list = top_k_calls(&user(&["robot arms"]), &calls, &Matcher::<f64>::Fuzzy, 10, 0).unwrap();
        assert_eq!(list.call_ids().collect::<Vec<_>>(), vec!["a", "b"]);
    }

    #[test]
    fn floor_filters_low_scores() {
        let calls = [call("a", "robot arms"), call("b", "ocean chemistry")];
        let list = top_k_calls(&user(&["robot arms"]), &calls, &Matcher::<f64>::Fuzzy, 10, 40).unwrap();
        assert_eq!(list.call_ids().collect::<Vec<_>>(), vec!["a"]);
    }

    #[test]
    fn duplicate_call_ids_scored_once() {
        let calls = [call("a", "robot arms"), call("a", "robot arms")];
        let list = top_k_calls(&user(&["robot"]), &calls, &Matcher::<f64>::Fuzzy, 10, 0).unwrap();
        assert_eq!(list.entries.len(), 1);
    }

    #[test]
    fn embeddings_use_ids() {
        let table = EmbeddingTable::<f64>::parse("c1\t1,0\nu1\t1,0\nc2\t0,1\n").unwrap();
        let m = Matcher::Embeddings(&table);
        let list = top_k_calls(&user(&["x"]), &[call("c2", "s"), call("c1", "s")], &m, 10, 0).unwrap();
        assert_eq!(list.entries[0].call_id, "c1");
        assert_eq!(list.entries[0].score, 100);
        assert_eq!(list.entries[0].strategy, Strategy::Vector);
        let missing = top_k_calls(&user(&["x"]), &[call("c9", "s")], &m, 10, 0);
        assert_eq!(missing, Err(MatchError::UnknownId("c9".into())));
    }
}
