//! Call-to-researcher scoring on the 0-100 scale and per-user rankings.

mod embeddings;
mod fuzzy;
mod rank;
mod vector;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use embeddings::EmbeddingTable;
pub use fuzzy::{fuzzy_match, token_set_score};
pub use rank::{rank_order, top_k_calls, MatchList, Matcher};
pub use vector::{build_corpus_model, vector_match, CorpusVectorModel, SparseVector, MODEL_FORMAT, MODEL_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Fuzzy,
    Vector,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fuzzy" => Ok(Strategy::Fuzzy),
            "vector" => Ok(Strategy::Vector),
            other => Err(format!("unknown strategy {other:?} (expected fuzzy or vector)")),
        }
    }
}

/// Why a score was forced to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreFlag {
    EmptySkillSet,
    EmptyText,
    OutOfVocabulary,
    ZeroVector,
}

/// A bare score with an optional degenerate-input flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Similarity {
    pub score: u8,
    pub flag: Option<ScoreFlag>,
}

impl Similarity {
    pub fn new(score: u8) -> Self {
        debug_assert!(score <= 100);
        Similarity { score, flag: None }
    }

    pub fn flagged(flag: ScoreFlag) -> Self {
        Similarity { score: 0, flag: Some(flag) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchScore {
    pub user_id: String,
    pub call_id: String,
    pub strategy: Strategy,
    pub score: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<ScoreFlag>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("corpus has no usable documents")]
    EmptyCorpus,
    #[error("embedding line {line}: expected {expected} components, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("embedding line {line}: {reason}")]
    EmbeddingSyntax { line: usize, reason: String },
    #[error("no embedding for id {0:?}")]
    UnknownId(String),
    #[error("model file: {0}")]
    ModelFormat(String),
    #[error("unsupported model version {0}")]
    UnsupportedModelVersion(u32),
}
