use std::fmt;

use serde::{Deserialize, Serialize};

/// An amount in whole US dollars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Money(pub u64);

impl Money {
    pub const fn dollars(amount: u64) -> Self {
        Money(amount)
    }

    pub const fn as_dollars(self) -> u64 {
        self.0
    }

    /// Splits the amount evenly, rounding each share down.
    pub fn split(self, parts: usize) -> Option<Money> {
        (parts > 0).then(|| Money(self.0 / parts as u64))
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.0.to_string();
        let mut grouped = String::with_capacity(digits.len() + digits.len() / 3);
        for (i, ch) in digits.chars().enumerate() {
            if i > 0 && (digits.len() - i) % 3 == 0 {
                grouped.push(',');
            }
            grouped.push(ch);
        }
        write!(f, "${grouped}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displays_with_separators() {
        assert_eq!(Money(6_000_000).to_string(), "$6,000,000");
        assert_eq!(Money(250).to_string(), "$250");
        assert_eq!(Money(0).to_string(), "$0");
        assert_eq!(Money(1_000).to_string(), "$1,000");
    }

    #[test]
    fn split_floors() {
        assert_eq!(Money(200_001).split(4), Some(Money(50_000)));
        assert_eq!(Money(10).split(0), None);
    }
}
