use std::collections::BTreeSet;

use super::{ScoreFlag, Similarity};
use crate::skills::{default_normalizer, SkillSet};

/// Token-set similarity on the 0-100 scale.
///
/// With `A` the synopsis token set, `B` the skill token set and `I` their
/// intersection, the similarity is `|I|` divided by the harmonic mean of
/// `|A|` and `|B|`:
///
/// ```text
/// sim = |I| * (|A| + |B|) / (2 * |A| * |B|)
/// ```
///
/// which equals the mean of `|I|/|A|` and `|I|/|B|`. It is 1 exactly when
/// the sets are equal and 0 when they are disjoint. The score is
/// `round_half_up(100 * sim)`, computed in integers.
pub fn token_set_score(a: &BTreeSet<&str>, b: &BTreeSet<&str>) -> u8 {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let common = a.intersection(b).count() as u64;
    let (na, nb) = (a.len() as u64, b.len() as u64);
    let numerator = 100 * common * (na + nb);
    let denominator = 2 * na * nb;
    // round half up: floor((2p + q) / 2q)
    ((2 * numerator + denominator) / (2 * denominator)) as u8
}

/// Scores a call synopsis against a skill set with [`token_set_score`].
pub fn fuzzy_match(synopsis: &str, skills: &SkillSet) -> Similarity {
    if skills.is_empty() {
        return Similarity::flagged(ScoreFlag::EmptySkillSet);
    }
    let tokens = default_normalizer().normalize(synopsis);
    let text_set: BTreeSet<&str> = tokens.iter().map(String::as_str).collect();
    if text_set.is_empty() {
        return Similarity::flagged(ScoreFlag::EmptyText);
    }
    Similarity::new(token_set_score(&text_set, &skills.token_set()))
}
