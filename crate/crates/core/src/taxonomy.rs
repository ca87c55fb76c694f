//! Flat classification taxonomies and free-text-to-code mapping.
//!
//! File format: one `code<TAB>term` per line. Blank lines and lines starting
//! with `#` are skipped.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matching::token_set_score;
use crate::skills::{default_normalizer, normalize_skill};

const BUNDLED_SAMPLE: &str = include_str!("../data/acm_sample.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("taxonomy has no entries")]
    EmptyFile,
    #[error("duplicate code {code} on line {line}")]
    DuplicateCode { code: String, line: usize },
    #[error("line {line}: expected code<TAB>term")]
    Syntax { line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyEntry {
    pub code: String,
    pub term: String,
    pub canon: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taxonomy {
    pub name: String,
    pub entries: Vec<TaxonomyEntry>,
}

impl Taxonomy {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, code: &str) -> Option<&TaxonomyEntry> {
        self.entries.iter().find(|e| e.code == code)
    }

    /// The bundled computing-classification sample.
    pub fn bundled_sample() -> Taxonomy {
        load_taxonomy("acm-sample", BUNDLED_SAMPLE).expect("bundled taxonomy parses")
    }
}

pub fn load_taxonomy(name: &str, text: &str) -> Result<Taxonomy, TaxonomyError> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (code, term) = line.split_once('\t').ok_or(TaxonomyError::Syntax { line: line_no })?;
        let (code, term) = (code.trim(), term.trim());
        if code.is_empty() || term.is_empty() {
            return Err(TaxonomyError::Syntax { line: line_no });
        }
        if !seen.insert(code.to_owned()) {
            return Err(TaxonomyError::DuplicateCode { code: code.to_owned(), line: line_no });
        }
        entries.push(TaxonomyEntry { code: code.to_owned(), term: term.to_owned(), canon: normalize_skill(term) });
    }
    if entries.is_empty() {
        return Err(TaxonomyError::EmptyFile);
    }
    Ok(Taxonomy { name: name.to_owned(), entries })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeMatch {
    pub code: String,
    pub term: String,
    pub score: u8,
}

/// Entries whose fuzzy score against `text` is at least `threshold`, by
/// descending score then ascending code.
pub fn map_text(text: &str, threshold: u8, taxonomy: &Taxonomy) -> Vec<CodeMatch> {
    let tokens = default_normalizer().normalize(text);
    let text_set: BTreeSet<&str> = tokens.iter().map(String::as_str).collect();
    let mut out: Vec<CodeMatch> = taxonomy
        .entries
        .iter()
        .filter_map(|e| {
            let canon: BTreeSet<&str> = e.canon.iter().map(String::as_str).collect();
            let score = token_set_score(&text_set, &canon);
            (score >= threshold).then(|| CodeMatch { code: e.code.clone(), term: e.term.clone(), score })
        })
        .collect();
    out.sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.code.cmp(&b.code)));
    out
}
