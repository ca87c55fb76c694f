use std::collections::BTreeMap;

use super::{MatchError, ScoreFlag, Similarity};
use crate::scalar::{percent_round_half_up, Scalar};

/// Externally computed embeddings keyed by document or profile id.
///
/// File format: one `id<TAB>v1,v2,...,vn` line per vector; blank lines and
/// lines starting with `#` are skipped. All vectors share one width.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<F> {
    dimension: usize,
    vectors: BTreeMap<String, Vec<F>>,
}

impl<F: Scalar> EmbeddingTable<F> {
    pub fn parse(text: &str) -> Result<Self, MatchError> {
        let mut dimension = None;
        let mut vectors = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (id, values) = line
                .split_once('\t')
                .ok_or_else(|| MatchError::EmbeddingSyntax { line: line_no, reason: "missing tab".into() })?;
            let id = id.trim();
            if id.is_empty() {
                return Err(MatchError::EmbeddingSyntax { line: line_no, reason: "empty id".into() });
            }
            let vector = values
                .split(',')
                .map(|v| {
                    F::parse_decimal(v.trim()).ok_or_else(|| MatchError::EmbeddingSyntax {
                        line: line_no,
                        reason: format!("bad component {:?}", v.trim()),
                    })
                })
                .collect::<Result<Vec<F>, _>>()?;
            let expected = *dimension.get_or_insert(vector.len());
            if vector.len() != expected {
                return Err(MatchError::DimensionMismatch { line: line_no, expected, found: vector.len() });
            }
            if vectors.insert(id.to_string(), vector).is_some() {
                return Err(MatchError::EmbeddingSyntax { line: line_no, reason: format!("duplicate id {id:?}") });
            }
        }
        let dimension = dimension.ok_or(MatchError::EmptyCorpus)?;
        Ok(EmbeddingTable { dimension, vectors })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&[F]> {
        self.vectors.get(id).map(Vec::as_slice)
    }

    /// Cosine between two stored vectors on the 0-100 scale.
    pub fn score(&self, a: &str, b: &str) -> Result<Similarity, MatchError> {
        let va = self.get(a).ok_or_else(|| MatchError::UnknownId(a.to_string()))?;
        let vb = self.get(b).ok_or_else(|| MatchError::UnknownId(b.to_string()))?;
        let (mut dot, mut na, mut nb) = (F::zero(), F::zero(), F::zero());
        for (x, y) in va.iter().zip(vb) {
            dot += *x * *y;
            na += *x * *x;
            nb += *y * *y;
        }
        if na.is_zero() || nb.is_zero() {
            return Ok(Similarity::flagged(ScoreFlag::ZeroVector));
        }
        Ok(Similarity::new(percent_round_half_up(dot / (na.sqrt() * nb.sqrt()))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_vectors_score_100() {
        let t = EmbeddingTable::<f64>::parse("a\t0.3,0.4\nb\t0.3,0.4\n").unwrap();
        assert_eq!(t.score("a", "b").unwrap().score, 100);
    }

    #[test]
    fn orthogonal_vectors_score_0() {
        let t = EmbeddingTable::<f32>::parse("a\t1,0\nb\t0,1\n").unwrap();
        assert_eq!(t.score("a", "b").unwrap().score, 0);
    }

    #[test]
    fn sixty_degrees_scores_50() {
        let (s, c) = (60f64.to_radians().sin(), 60f64.to_radians().cos());
        let t = EmbeddingTable::<f64>::parse(&format!("a\t1,0\nb\t{c},{s}\n")).unwrap();
        assert_eq!(t.score("a", "b").unwrap().score, 50);
    }

    #[test]
    fn negative_cosine_clamps_to_zero() {
        let t = EmbeddingTable::<f64>::parse("a\t1,0\nb\t-1,0\n").unwrap();
        assert_eq!(t.score("a", "b").unwrap().score, 0);
    }

    #[test]
    fn dimension_mismatch() {
        let err = EmbeddingTable::<f64>::parse("a\t1,0\nb\t1,0,0\n").unwrap_err();
        assert_eq!(err, MatchError::DimensionMismatch { line: 2, expected: 2, found: 3 });
    }

    #[test]
    fn unknown_id_at_query_time() {
        let t = EmbeddingTable::<f64>::parse("a\t1,0\n").unwrap();
        assert_eq!(t.score("a", "zz"), Err(MatchError::UnknownId("zz".into())));
    }

    #[test]
    fn zero_vector_is_flagged() {
        let t = EmbeddingTable::<f64>::parse("a\t0,0\nb\t1,0\n").unwrap();
        assert_eq!(t.score("a", "b").unwrap().flag, Some(ScoreFlag::ZeroVector));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(EmbeddingTable::<f64>::parse("a 1,2"), Err(MatchError::EmbeddingSyntax { line: 1, .. })));
        assert!(matches!(EmbeddingTable::<f64>::parse("a\t1,x"), Err(MatchError::EmbeddingSyntax { .. })));
        assert!(matches!(EmbeddingTable::<f64>::parse("a\t1\na\t2"), Err(MatchError::EmbeddingSyntax { line: 2, .. })));
        assert_eq!(EmbeddingTable::<f64>::parse("# nothing\n"), Err(MatchError::EmptyCorpus));
    }
}
