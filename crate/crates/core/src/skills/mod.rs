//! Skill normalization: raw keyword strings from several profile sources are
//! reduced to canonical token lists and merged into a deduplicated set.

mod normalize;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use normalize::{
    default_normalizer, normalize_skill, tokenize, Stemmer, SuffixStemmer, TextNormalizer,
    MIN_STEM_CHARS,
};

/// Source label for skills scraped from an institutional page.
pub const SOURCE_SITE: &str = "site";
/// Source label for skills taken from a scholar profile.
pub const SOURCE_SCHOLAR: &str = "scholar";

/// One skill: its display form and canonical tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Skill {
    pub display: String,
    pub canon: Vec<String>,
}

/// Deduplicated skills ordered by canon.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SkillSet {
    skills: Vec<Skill>,
}

impl SkillSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from already-normalized skills, keeping the first display
    /// form seen for each canon and dropping empty canons.
    pub fn from_skills(skills: impl IntoIterator<Item = Skill>) -> Self {
        let mut by_canon: BTreeMap<Vec<String>, String> = BTreeMap::new();
        for skill in skills {
            if skill.canon.is_empty() {
                continue;
            }
            by_canon.entry(skill.canon).or_insert(skill.display);
        }
        SkillSet {
            skills: by_canon
                .into_iter()
                .map(|(canon, display)| Skill { display, canon })
                .collect(),
        }
    }

    /// Normalizes each raw string into its own skill.
    pub fn from_raw<S: AsRef<str>>(raw: &[S]) -> Self {
        let mut map = BTreeMap::new();
        map.insert(
            SOURCE_SITE.to_string(),
            raw.iter().map(|s| s.as_ref().to_string()).collect(),
        );
        build_skill_set(&map)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Skill> {
        self.skills.iter()
    }

    pub fn len(&self) -> usize {
        self.skills.len()
    }

    pub fn is_empty(&self) -> bool {
        self.skills.is_empty()
    }

    pub fn canons(&self) -> impl Iterator<Item = &[String]> {
        self.skills.iter().map(|s| s.canon.as_slice())
    }

    /// Every canonical token across all skills, in skill order, duplicates kept.
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.skills.iter().flat_map(|s| s.canon.iter().map(String::as_str))
    }

    pub fn token_set(&self) -> BTreeSet<&str> {
        self.tokens().collect()
    }

    pub fn displays(&self) -> impl Iterator<Item = &str> {
        self.skills.iter().map(|s| s.display.as_str())
    }
}

impl<'a> IntoIterator for &'a SkillSet {
    type Item = &'a Skill;
    type IntoIter = std::slice::Iter<'a, Skill>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

fn source_rank(label: &str) -> (u8, &str) {
    match label {
        SOURCE_SITE => (0, label),
        SOURCE_SCHOLAR => (1, label),
        other => (2, other),
    }
}

/// Merges raw skills from every source into one set.
///
/// Sources are visited site first, scholar second, then any other label in
/// lexicographic order. For a canon seen in several sources the display form
/// comes from the earliest source; within one source the lexicographically
/// smallest display wins, so list order inside a source does not matter.
pub fn build_skill_set(raw_by_source: &BTreeMap<String, Vec<String>>) -> SkillSet {
    let normalizer = default_normalizer();
    let mut sources: Vec<(&String, &Vec<String>)> = raw_by_source.iter().collect();
    sources.sort_by(|a, b| source_rank(a.0).cmp(&source_rank(b.0)));

    let mut merged: BTreeMap<Vec<String>, String> = BTreeMap::new();
    for (_, raws) in sources {
        let mut local: BTreeMap<Vec<String>, &str> = BTreeMap::new();
        for raw in raws {
            let canon = normalizer.normalize(raw);
            if canon.is_empty() {
                continue;
            }
            let display = raw.trim();
            local
                .entry(canon)
                .and_modify(|d| {
                    if display < *d {
                        *d = display;
                    }
                })
                .or_insert(display);
        }
        for (canon, display) in local {
            merged.entry(canon).or_insert_with(|| display.to_string());
        }
    }
    SkillSet {
        skills: merged
            .into_iter()
            .map(|(canon, display)| Skill { display, canon })
            .collect(),
    }
}
