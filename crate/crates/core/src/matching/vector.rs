use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{MatchError, ScoreFlag, Similarity};
use crate::scalar::{percent_round_half_up, Scalar};
use crate::skills::{default_normalizer, SkillSet};

/// Format tag written into serialized corpus models.
pub const MODEL_FORMAT: &str = "teaming-corpus-model";
pub const MODEL_VERSION: u32 = 1;

/// Sparse vector with entries sorted by index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector<F> {
    entries: Vec<(usize, F)>,
}

impl<F: Scalar> SparseVector<F> {
    /// Builds from arbitrary entries; duplicate indices are summed, zeros dropped.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, F)>) -> Self {
        let mut acc: BTreeMap<usize, F> = BTreeMap::new();
        for (i, v) in entries {
            *acc.entry(i).or_insert_with(F::zero) += v;
        }
        SparseVector {
            entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, F)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn squared_norm(&self) -> F {
        self.entries.iter().fold(F::zero(), |acc, (_, v)| acc + *v * *v)
    }

    /// Dot product, accumulated in ascending index order.
    pub fn dot(&self, other: &Self) -> F {
        let (mut i, mut j) = (0, 0);
        let mut sum = F::zero();
        while i < self.entries.len() && j < other.entries.len() {
            let (ia, va) = self.entries[i];
            let (ib, vb) = other.entries[j];
            match ia.cmp(&ib) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += va * vb;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }

    /// Cosine similarity; `None` when either vector is zero.
    pub fn cosine(&self, other: &Self) -> Option<F> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        Some(self.dot(other) / (self.squared_norm().sqrt() * other.squared_norm().sqrt()))
    }
}

/// Document-frequency statistics over a corpus of call synopses.
///
/// Term weights are raw counts times `ln(1 + corpus_size / df)`; tokens
/// outside the vocabulary carry no weight. Serializes in the versioned
/// model file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ModelFile", try_from = "ModelFile")]
pub struct CorpusVectorModel {
    vocabulary: BTreeMap<String, usize>,
    document_frequencies: Vec<u64>,
    corpus_size: u64,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    corpus_size: u64,
    /// (token, document frequency), sorted by token
    terms: Vec<(String, u64)>,
}

impl CorpusVectorModel {
    /// Counts document frequencies of normalized tokens.
    ///
    /// Blank documents still count towards the corpus size; at least one
    /// document must yield a token.
    pub fn build<S: AsRef<str>>(synopses: &[S]) -> Result<Self, MatchError> {
        let normalizer = default_normalizer();
        let mut df: BTreeMap<String, u64> = BTreeMap::new();
        for doc in synopses {
            let tokens: BTreeSet<String> = normalizer.normalize(doc.as_ref()).into_iter().collect();
            for t in tokens {
                *df.entry(t).or_default() += 1;
            }
        }
        if df.is_empty() {
            return Err(MatchError::EmptyCorpus);
        }
        Ok(Self::from_terms(synopses.len() as u64, df))
    }

    fn from_terms(corpus_size: u64, df: BTreeMap<String, u64>) -> Self {
        let mut vocabulary = BTreeMap::new();
        let mut document_frequencies = Vec::with_capacity(df.len());
        for (i, (token, count)) in df.into_iter().enumerate() {
            vocabulary.insert(token, i);
            document_frequencies.push(count);
        }
        CorpusVectorModel {
            vocabulary,
            document_frequencies,
            corpus_size,
        }
    }

    pub fn corpus_size(&self) -> u64 {
        self.corpus_size
    }

    pub fn vocabulary_len(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn document_frequency(&self, token: &str) -> Option<u64> {
        self.vocabulary.get(token).map(|&i| self.document_frequencies[i])
    }

    /// Vocabulary tokens in index order (lexicographic).
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.vocabulary.keys().map(String::as_str)
    }

    pub fn idf<F: Scalar>(&self, token: &str) -> Option<F> {
        let df = self.document_frequency(token)?;
        let n = F::from_u64(self.corpus_size)?;
        let df = F::from_u64(df)?;
        Some((F::one() + n / df).ln())
    }

    /// tf-idf vector of already-normalized tokens.
    pub fn vectorize<'t, F: Scalar>(&self, tokens: impl IntoIterator<Item = &'t str>) -> SparseVector<F> {
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for t in tokens {
            if let Some(&i) = self.vocabulary.get(t) {
                *counts.entry(i).or_default() += 1;
            }
        }
        let n = F::from_u64(self.corpus_size).unwrap();
        SparseVector::from_entries(counts.into_iter().map(|(i, tf)| {
            let df = F::from_u64(self.document_frequencies[i]).unwrap();
            (i, F::from_u64(tf).unwrap() * (F::one() + n / df).ln())
        }))
    }

    pub fn vectorize_text<F: Scalar>(&self, text: &str) -> SparseVector<F> {
        let tokens = default_normalizer().normalize(text);
        self.vectorize(tokens.iter().map(String::as_str))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Loads a serialized model, checking format, version and invariants.
    pub fn from_json(text: &str) -> Result<Self, MatchError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| MatchError::ModelFormat(e.to_string()))?;
        file.try_into()
    }
}

impl From<CorpusVectorModel> for ModelFile {
    fn from(model: CorpusVectorModel) -> Self {
        ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            corpus_size: model.corpus_size,
            terms: model
                .vocabulary
                .iter()
                .map(|(t, &i)| (t.clone(), model.document_frequencies[i]))
                .collect(),
        }
    }
}

impl TryFrom<ModelFile> for CorpusVectorModel {
    type Error = MatchError;

    fn try_from(file: ModelFile) -> Result<Self, MatchError> {
        if file.format != MODEL_FORMAT {
            return Err(MatchError::ModelFormat(format!("unexpected format {:?}", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(MatchError::UnsupportedModelVersion(file.version));
        }
        if file.corpus_size == 0 || file.terms.is_empty() {
            return Err(MatchError::EmptyCorpus);
        }
        let normalizer = default_normalizer();
        let mut df = BTreeMap::new();
        for (token, count) in file.terms {
            if count == 0 || count > file.corpus_size {
                return Err(MatchError::ModelFormat(format!("bad document frequency for {token:?}")));
            }
            if normalizer.normalize(&token) != [token.clone()] {
                return Err(MatchError::ModelFormat(format!("token {token:?} is not normalized")));
            }
            if df.insert(token.clone(), count).is_some() {
                return Err(MatchError::ModelFormat(format!("duplicate token {token:?}")));
            }
        }
        Ok(CorpusVectorModel::from_terms(file.corpus_size, df))
    }
}

/// Builds a corpus model over call synopses.
pub fn build_corpus_model<S: AsRef<str>>(synopses: &[S]) -> Result<CorpusVectorModel, MatchError> {
    CorpusVectorModel::build(synopses)
}

/// Cosine between the tf-idf vectors of a synopsis and the concatenated skill tokens.
pub fn vector_match<F: Scalar>(synopsis: &str, skills: &SkillSet, model: &CorpusVectorModel) -> Similarity {
    if skills.is_empty() {
        return Similarity::flagged(ScoreFlag::EmptySkillSet);
    }
    let text: SparseVector<F> = model.vectorize_text(synopsis);
    let profile: SparseVector<F> = model.vectorize(skills.tokens());
    match text.cosine(&profile) {
        Some(cos) => Similarity::new(percent_round_half_up(cos)),
        None => Similarity::flagged(ScoreFlag::OutOfVocabulary),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_document_counts() {
        let m = CorpusVectorModel::build(&["alpha beta"]).unwrap();
        assert_eq!(m.corpus_size(), 1);
        assert_eq!(m.document_frequency("alpha"), Some(1));
        assert_eq!(m.document_frequency("beta"), Some(1));
    }

    #[test]
    fn shared_token_counts_twice() {
        let m = CorpusVectorModel::build(&["graph theory", "graph mining graph"]).unwrap();
        assert_eq!(m.document_frequency("graph"), Some(2));
        assert_eq!(m.document_frequency("theory"), Some(1));
    }

    #[test]
    fn empty_corpus_rejected() {
        assert_eq!(CorpusVectorModel::build::<&str>(&[]), Err(MatchError::EmptyCorpus));
        assert_eq!(CorpusVectorModel::build(&["", "the of"]), Err(MatchError::EmptyCorpus));
    }

    #[test]
    fn vocabulary_is_order_independent() {
        let a = CorpusVectorModel::build(&["x ray optics", "optics lab"]).unwrap();
        let b = CorpusVectorModel::build(&["optics lab", "x ray optics"]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn idf_formula() {
        let m = CorpusVectorModel::build(&["graph theory", "graph mining", "robot"]).unwrap();
        let idf: f64 = m.idf("graph").unwrap();
        assert!((idf - (1.0f64 + 3.0 / 2.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn identity_and_disjoint() {
        let text = "Quantum error correction codes";
        let m = CorpusVectorModel::build(&[text, "protein folding"]).unwrap();
        let same = SkillSet::from_raw(&[text]);
        assert_eq!(vector_match::<f64>(text, &same, &m).score, 100);
        assert_eq!(vector_match::<f32>(text, &same, &m).score, 100);
        let other = SkillSet::from_raw(&["protein folding"]);
        assert_eq!(vector_match::<f64>(text, &other, &m), Similarity::new(0));
    }

    #[test]
    fn out_of_vocabulary_flagged() {
        let m = CorpusVectorModel::build(&["alpha"]).unwrap();
        let s = vector_match::<f64>("alpha", &SkillSet::from_raw(&["omega"]), &m);
        assert_eq!(s.flag, Some(ScoreFlag::OutOfVocabulary));
        assert_eq!(s.score, 0);
    }

    #[test]
    fn model_round_trips_and_checks_version() {
        let m = CorpusVectorModel::build(&["graph theory", "graph mining"]).unwrap();
        let json = m.to_json();
        assert_eq!(CorpusVectorModel::from_json(&json).unwrap(), m);
        let bumped = json.replace("\"version\": 1", "\"version\": 9");
        assert_eq!(CorpusVectorModel::from_json(&bumped), Err(MatchError::UnsupportedModelVersion(9)));
        let bad_token = json.replace("\"graph\"", "\"Graph\"");
        assert!(matches!(CorpusVectorModel::from_json(&bad_token), Err(MatchError::ModelFormat(_))));
    }

    #[test]
    fn sparse_cosine_matches_dense() {
        let a = SparseVector::from_entries([(0, 1.0f64), (3, 2.0), (5, -1.0)]);
        let b = SparseVector::from_entries([(3, 1.0f64), (5, 1.0), (7, 4.0)]);
        let dense_a = [1.0, 0.0, 0.0, 2.0, 0.0, -1.0, 0.0, 0.0];
        let dense_b = [0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 4.0];
        let dot: f64 = dense_a.iter().zip(&dense_b).map(|(x, y)| x * y).sum();
        let na: f64 = dense_a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = dense_b.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((a.cosine(&b).unwrap() - dot / (na * nb)).abs() < 1e-12);
    }
}
