use std::collections::HashSet;
use std::sync::LazyLock;

const STOP_WORDS: &str = include_str!("../../data/stopwords.txt");
const SUFFIX_TABLE: &str = include_str!("../../data/stem_suffixes.txt");

/// Shortest stem a suffix rule may leave behind, in characters.
pub const MIN_STEM_CHARS: usize = 3;

static DEFAULT: LazyLock<TextNormalizer> = LazyLock::new(TextNormalizer::bundled);

/// Reduces a lowercase token to its stem.
pub trait Stemmer: Send + Sync {
    fn stem(&self, token: &str) -> String;
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct SuffixRule {
    suffix: String,
    replacement: String,
}

/// Table-driven suffix stripper.
///
/// At each step the longest suffix whose rewrite leaves at least
/// [`MIN_STEM_CHARS`] characters is applied; steps repeat until no rule
/// fires. Rules that rewrite a suffix to itself stop the process, which
/// protects endings such as `-ss` and `-is` from the plural rule.
#[derive(Debug, Clone)]
pub struct SuffixStemmer {
    rules: Vec<SuffixRule>,
}

impl SuffixStemmer {
    /// Parses `suffix<TAB>replacement` lines; `-` denotes an empty replacement.
    pub fn from_table(table: &str) -> Self {
        let mut rules: Vec<SuffixRule> = table
            .lines()
            .map(str::trim_end)
            .filter(|line| !line.is_empty() && !line.starts_with('#'))
            .filter_map(|line| {
                let (suffix, replacement) = line.split_once('\t')?;
                let replacement = if replacement == "-" { "" } else { replacement };
                Some(SuffixRule {
                    suffix: suffix.to_string(),
                    replacement: replacement.to_string(),
                })
            })
            .collect();
        // longest first; the sort is stable so table order breaks ties
        rules.sort_by_key(|r| std::cmp::Reverse(r.suffix.chars().count()));
        SuffixStemmer { rules }
    }

    pub fn bundled() -> Self {
        Self::from_table(SUFFIX_TABLE)
    }

    fn step(&self, token: &str) -> Option<String> {
        let len = token.chars().count();
        for rule in &self.rules {
            if !token.ends_with(rule.suffix.as_str()) {
                continue;
            }
            let kept = len - rule.suffix.chars().count() + rule.replacement.chars().count();
            if kept < MIN_STEM_CHARS {
                continue;
            }
            if rule.suffix == rule.replacement {
                return None;
            }
            let base = &token[..token.len() - rule.suffix.len()];
            return Some(format!("{base}{}", rule.replacement));
        }
        None
    }
}

impl Stemmer for SuffixStemmer {
    fn stem(&self, token: &str) -> String {
        let mut current = token.to_string();
        while let Some(next) = self.step(&current) {
            current = next;
        }
        current
    }
}

/// Lowercases, tokenizes, drops stop words and stems.
pub struct TextNormalizer {
    stop_words: HashSet<String>,
    stemmer: Box<dyn Stemmer>,
}

impl TextNormalizer {
    pub fn new(stop_words: impl IntoIterator<Item = String>, stemmer: Box<dyn Stemmer>) -> Self {
        TextNormalizer {
            stop_words: stop_words.into_iter().collect(),
            stemmer,
        }
    }

    /// The bundled stop-word list and suffix table.
    pub fn bundled() -> Self {
        let words = STOP_WORDS
            .lines()
            .map(str::trim)
            .filter(|w| !w.is_empty() && !w.starts_with('#'))
            .map(str::to_string);
        Self::new(words, Box::new(SuffixStemmer::bundled()))
    }

    pub fn is_stop_word(&self, token: &str) -> bool {
        self.stop_words.contains(token)
    }

    pub fn normalize(&self, raw: &str) -> Vec<String> {
        tokenize(raw)
            .filter(|t| !self.is_stop_word(t))
            .map(|t| self.stemmer.stem(&t))
            // a stem can collide with a stop word ("ands" -> "and")
            .filter(|t| !self.is_stop_word(t))
            .collect()
    }
}

impl std::fmt::Debug for TextNormalizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TextNormalizer")
            .field("stop_words", &self.stop_words.len())
            .finish_non_exhaustive()
    }
}

/// The process-wide normalizer built from the bundled data files.
pub fn default_normalizer() -> &'static TextNormalizer {
    &DEFAULT
}

/// Lowercase alphanumeric runs of `raw`. Digits are kept (`P4` -> `p4`).
pub fn tokenize(raw: &str) -> impl Iterator<Item = String> + '_ {
    raw.split(|c: char| !c.is_alphanumeric())
        .filter(|piece| !piece.is_empty())
        .flat_map(|piece| {
            let lower = piece.to_lowercase();
            // lowercasing can introduce combining marks; split again
            lower
                .split(|c: char| !c.is_alphanumeric())
                .filter(|p| !p.is_empty())
                .map(str::to_string)
                .collect::<Vec<_>>()
        })
}

/// Canonical token list of a raw skill or text using the bundled data.
pub fn normalize_skill(raw: &str) -> Vec<String> {
    default_normalizer().normalize(raw)
}
