use std::sync::LazyLock;

use regex::Regex;

use crate::money::Money;

static AMOUNT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)\$\s?(\d{1,3}(?:,\d{3})+|\d+)(?:\.(\d+))?(?:\s*(billion|million|thousand|[bmk])\b)?",
    )
    .unwrap()
});

static CUE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)budget|funding amount|anticipated funding").unwrap());

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Span {
    start: usize,
    end: usize,
}

impl Span {
    fn distance(self, other: Span) -> usize {
        // zero when the spans overlap
        other.start.saturating_sub(self.end).max(self.start.saturating_sub(other.end))
    }
}

fn parse_amount(caps: &regex::Captures<'_>) -> Option<Money> {
    let whole: u128 = caps[1].replace(',', "").parse().ok()?;
    let fraction = caps.get(2).map_or("", |m| m.as_str());
    let multiplier: u128 = match caps.get(3).map(|m| m.as_str().to_ascii_lowercase()) {
        None => 1,
        Some(unit) => match unit.as_str() {
            "b" | "billion" => 1_000_000_000,
            "m" | "million" => 1_000_000,
            "k" | "thousand" => 1_000,
            _ => 1,
        },
    };
    // keep at most 9 fractional digits; enough for any multiplier here
    let fraction = &fraction[..fraction.len().min(9)];
    let scale = 10u128.pow(fraction.len() as u32);
    let frac_value: u128 = if fraction.is_empty() { 0 } else { fraction.parse().ok()? };
    let scaled = (whole.checked_mul(scale)?.checked_add(frac_value)?).checked_mul(multiplier)?;
    // round half up to whole dollars
    let dollars = (scaled * 2 + scale) / (scale * 2);
    let dollars = u64::try_from(dollars).ok()?;
    (dollars > 0).then_some(Money(dollars))
}

/// Sentence boundaries: newlines, `;`, and `.`/`!`/`?` followed by whitespace.
fn sentences(text: &str) -> Vec<Span> {
    let bytes = text.as_bytes();
    let mut spans = Vec::new();
    let mut start = 0;
    for (i, &b) in bytes.iter().enumerate() {
        let boundary = match b {
            b'\n' | b';' => true,
            b'.' | b'!' | b'?' => bytes.get(i + 1).is_none_or(|n| n.is_ascii_whitespace()),
            _ => false,
        };
        if boundary {
            spans.push(Span { start, end: i + 1 });
            start = i + 1;
        }
    }
    if start < text.len() {
        spans.push(Span { start, end: text.len() });
    }
    spans
}

/// Program-level budget mentioned in free text, in whole dollars.
///
/// Dollar amounts (`$1,250,000`, `$6.5 million`, `$500K`) are collected. An
/// amount sharing a sentence with a cue phrase (`budget`, `funding amount`,
/// `anticipated funding`) is preferred, nearest cue first; remaining ties go
/// to the earliest amount. Without any cued amount the first amount is used.
pub fn extract_budget(text: &str) -> Option<Money> {
    let amounts: Vec<(Span, Money)> = AMOUNT
        .captures_iter(text)
        .filter_map(|caps| {
            let m = caps.get(0)?;
            let amount = parse_amount(&caps)?;
            Some((Span { start: m.start(), end: m.end() }, amount))
        })
        .collect();
    if amounts.is_empty() {
        return None;
    }

    let mut best: Option<(usize, usize, Money)> = None;
    for sentence in sentences(text) {
        let slice = &text[sentence.start..sentence.end];
        let cues: Vec<Span> = CUE
            .find_iter(slice)
            .map(|m| Span {
                start: sentence.start + m.start(),
                end: sentence.start + m.end(),
            })
            .collect();
        if cues.is_empty() {
            continue;
        }
        for &(span, amount) in amounts
            .iter()
            .filter(|(s, _)| s.start >= sentence.start && s.end <= sentence.end)
        {
            let distance = cues.iter().map(|c| c.distance(span)).min().unwrap_or(usize::MAX);
            let candidate = (distance, span.start, amount);
            if best.is_none_or(|b| (candidate.0, candidate.1) < (b.0, b.1)) {
                best = Some(candidate);
            }
        }
    }
    best.map(|(_, _, amount)| amount).or(Some(amounts[0].1))
}
