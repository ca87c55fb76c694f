use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::TeamingConfig;
use crate::money::Money;
use crate::skills::SkillSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintId {
    SizeCap,
    BudgetFloor,
    UniqueSkill,
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintId::SizeCap => "size_cap",
            ConstraintId::BudgetFloor => "budget_floor",
            ConstraintId::UniqueSkill => "unique_skill",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintOutcome {
    pub constraint: ConstraintId,
    pub satisfied: bool,
    pub explanation: String,
}

/// Outcome of every team constraint, always in `size_cap`, `budget_floor`,
/// `unique_skill` order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub entries: Vec<ConstraintOutcome>,
}

impl ConstraintReport {
    pub fn all_satisfied(&self) -> bool {
        self.entries.iter().all(|e| e.satisfied)
    }

    pub fn get(&self, id: ConstraintId) -> &ConstraintOutcome {
        self.entries
            .iter()
            .find(|e| e.constraint == id)
            .expect("report always carries every constraint")
    }

    pub fn satisfied(&self, id: ConstraintId) -> bool {
        self.get(id).satisfied
    }

    pub fn violated(&self) -> Vec<ConstraintId> {
        self.entries.iter().filter(|e| !e.satisfied).map(|e| e.constraint).collect()
    }
}

/// Largest team the budget and config allow.
///
/// Without a budget this is `team_cap`. With one, each participant needs
/// `per_participant_floor`, so the cap is `min(team_cap, budget / floor)`;
/// when `allow_large_teams` is set and the budget supports more than
/// `team_cap`, the cap grows up to `hard_ceiling`.
pub fn team_size_cap(budget: Option<Money>, config: &TeamingConfig) -> usize {
    let Some(budget) = budget else {
        return config.team_cap;
    };
    let supported = budget_supported_size(budget, config);
    if config.allow_large_teams && supported > config.team_cap {
        supported.min(config.hard_ceiling)
    } else {
        supported.min(config.team_cap)
    }
}

/// Size limit independent of the per-participant floor: `team_cap`, or the
/// raised limit when a large budget is allowed to grow teams.
pub fn structural_size_limit(budget: Option<Money>, config: &TeamingConfig) -> usize {
    match budget {
        Some(b) if config.allow_large_teams => {
            let supported = budget_supported_size(b, config);
            if supported > config.team_cap {
                supported.min(config.hard_ceiling)
            } else {
                config.team_cap
            }
        }
        _ => config.team_cap,
    }
}

fn budget_supported_size(budget: Money, config: &TeamingConfig) -> usize {
    let floor = config.per_participant_floor.as_dollars().max(1);
    usize::try_from(budget.as_dollars() / floor).unwrap_or(usize::MAX)
}

/// Per-member share of the budget, rounded down.
pub fn allocate_budget(team_size: usize, budget: Option<Money>) -> Option<Money> {
    budget.and_then(|b| b.split(team_size))
}

/// Evaluates the three team constraints for `members` (lead first).
///
/// * `size_cap`: the team fits the structural limit (`team_cap`, or the
///   large-team limit). Budget shortfalls are reported by `budget_floor`
///   alone.
/// * `budget_floor`: `budget / |team| >= per_participant_floor`; satisfied
///   with a note when the budget is unknown.
/// * `unique_skill`: every member holds a canonical skill that no other
///   member holds.
pub fn check_constraints(members: &[(&str, &SkillSet)], budget: Option<Money>, config: &TeamingConfig) -> ConstraintReport {
    let size = members.len();
    let floor = config.per_participant_floor;

    let limit = structural_size_limit(budget, config);
    let size_entry = ConstraintOutcome {
        constraint: ConstraintId::SizeCap,
        satisfied: size <= limit,
        explanation: if size <= limit {
            format!("team of {size} is within the size cap of {limit}")
        } else {
            format!("team of {size} exceeds the size cap of {limit}")
        },
    };

    let budget_entry = match budget {
        None => ConstraintOutcome {
            constraint: ConstraintId::BudgetFloor,
            satisfied: true,
            explanation: format!("call budget unknown; {floor} per participant not enforced"),
        },
        Some(total) => {
            let needed = u128::from(floor.as_dollars()) * size as u128;
            let ok = u128::from(total.as_dollars()) >= needed;
            let share = total.split(size).unwrap_or(total);
            ConstraintOutcome {
                constraint: ConstraintId::BudgetFloor,
                satisfied: ok,
                explanation: format!(
                    "{total} over {size} participants gives {share} each; {} {floor}",
                    if ok { "meets the floor of" } else { "below the floor of" }
                ),
            }
        }
    };

    // canon -> number of members holding it
    let mut holders: BTreeMap<&[String], usize> = BTreeMap::new();
    for (_, skills) in members {
        for canon in skills.canons() {
            *holders.entry(canon).or_default() += 1;
        }
    }
    let lacking: Vec<&str> = members
        .iter()
        .filter(|(_, skills)| !skills.canons().any(|c| holders[c] == 1))
        .map(|(id, _)| *id)
        .collect();
    let unique_entry = ConstraintOutcome {
        constraint: ConstraintId::UniqueSkill,
        satisfied: lacking.is_empty(),
        explanation: if lacking.is_empty() {
            format!("each of the {size} members holds a skill no other member has")
        } else {
            format!("no skill of their own: {}", lacking.join(", "))
        },
    };

    ConstraintReport {
        entries: vec![size_entry, budget_entry, unique_entry],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> TeamingConfig {
        TeamingConfig::default()
    }

    #[test]
    fn cap_without_budget_is_five() {
        assert_eq!(team_size_cap(None, &cfg()), 5);
    }

    #[test]
    fn cap_from_budget() {
        assert_eq!(team_size_cap(Some(Money(150_000)), &cfg()), 3);
        assert_eq!(team_size_cap(Some(Money(1_000_000)), &cfg()), 5);
        assert_eq!(team_size_cap(Some(Money(49_999)), &cfg()), 0);
    }

    #[test]
    fn large_team_cap_clips_to_ceiling() {
        let c = TeamingConfig { allow_large_teams: true, ..cfg() };
        assert_eq!(team_size_cap(Some(Money(1_000_000)), &c), 10);
        assert_eq!(team_size_cap(Some(Money(350_000)), &c), 7);
        assert_eq!(team_size_cap(Some(Money(150_000)), &c), 3);
        assert_eq!(team_size_cap(None, &c), 5);
    }

    #[test]
    fn allocation() {
        assert_eq!(allocate_budget(5, Some(Money(250_000))), Some(Money(50_000)));
        assert_eq!(allocate_budget(5, None), None);
        assert_eq!(allocate_budget(4, Some(Money(200_001))), Some(Money(50_000)));
    }

    #[test]
    fn identical_skill_sets_violate_unique_skill() {
        let s = SkillSet::from_raw(&["optics", "lasers"]);
        let r = check_constraints(&[("a", &s), ("b", &s)], None, &cfg());
        assert!(!r.satisfied(ConstraintId::UniqueSkill));
        assert!(r.get(ConstraintId::UniqueSkill).explanation.contains("a, b"));
        assert_eq!(r.violated(), vec![ConstraintId::UniqueSkill]);
    }

    #[test]
    fn budget_split_above_floor() {
        let (a, b, c) = (SkillSet::from_raw(&["x1"]), SkillSet::from_raw(&["x2"]), SkillSet::from_raw(&["x3"]));
        let r = check_constraints(&[("a", &a), ("b", &b), ("c", &c)], Some(Money(160_000)), &cfg());
        assert!(r.all_satisfied());
        assert!(r.get(ConstraintId::BudgetFloor).explanation.contains("$53,333"));
    }

    #[test]
    fn six_members_without_budget_break_size_cap() {
        let sets: Vec<SkillSet> = (0..6).map(|i| SkillSet::from_raw(&[format!("topic{i}")])).collect();
        let ids = ["a", "b", "c", "d", "e", "f"];
        let members: Vec<_> = ids.iter().copied().zip(sets.iter()).collect();
        let r = check_constraints(&members, None, &cfg());
        assert_eq!(r.violated(), vec![ConstraintId::SizeCap]);
        assert!(r.get(ConstraintId::SizeCap).explanation.contains("6"));
    }

    #[test]
    fn budget_shortfall_reported_only_by_budget_floor() {
        let sets: Vec<SkillSet> = (0..3).map(|i| SkillSet::from_raw(&[format!("topic{i}")])).collect();
        let members: Vec<_> = ["a", "b", "c"].into_iter().zip(sets.iter()).collect();
        let r = check_constraints(&members, Some(Money(149_999)), &cfg());
        assert_eq!(r.violated(), vec![ConstraintId::BudgetFloor]);
    }

    #[test]
    fn unknown_budget_is_noted() {
        let s = SkillSet::from_raw(&["x"]);
        let r = check_constraints(&[("a", &s)], None, &cfg());
        assert!(r.satisfied(ConstraintId::BudgetFloor));
        assert!(r.get(ConstraintId::BudgetFloor).explanation.contains("unknown"));
    }

    #[test]
    fn unique_skill_is_against_the_union() {
        // c's skills are covered jointly by a and b although no single member matches c
        let a = SkillSet::from_raw(&["alpha", "delta"]);
        let b = SkillSet::from_raw(&["beta", "epsilon"]);
        let c = SkillSet::from_raw(&["alpha", "beta"]);
        let r = check_constraints(&[("a", &a), ("b", &b), ("c", &c)], None, &cfg());
        assert_eq!(r.violated(), vec![ConstraintId::UniqueSkill]);
        assert!(r.get(ConstraintId::UniqueSkill).explanation.ends_with("c"));
    }
}
