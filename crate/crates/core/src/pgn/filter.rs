use std::collections::{BTreeMap, BTreeSet};

use piecevalue_rules::MaterialDelta;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GameRecord, PlayerHistoryIndex, Termination};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("policy file: {0}")]
    Parse(String),
    #[error("invalid policy: {0}")]
    Invalid(String),
}

/// Eligibility rules for games and snapshots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterPolicy {
    /// Minimum games each player has in the history window.
    pub min_history_games: u32,
    pub history_window_months: u32,
    /// Minimum initial clock; the increment is ignored.
    pub min_clock_seconds: u32,
    /// Minimum pre-game rating of both players.
    pub min_rating: u32,
    /// Inclusive bounds on the game length in plies.
    pub ply_range: [u32; 2],
    /// Bound on |knight|, |bishop| and |rook| count differences at the snapshot.
    pub max_minor_rook_imbalance: u32,
    pub max_queen_imbalance: u32,
    pub termination_whitelist: BTreeSet<Termination>,
}

impl Default for FilterPolicy {
    fn default() -> FilterPolicy {
        FilterPolicy {
            min_history_games: 50,
            history_window_months: 6,
            min_clock_seconds: 300,
            min_rating: 1200,
            ply_range: [10, 150],
            max_minor_rook_imbalance: 3,
            max_queen_imbalance: 2,
            termination_whitelist: BTreeSet::from([Termination::Normal]),
        }
    }
}

impl FilterPolicy {
    pub fn validate(&self) -> Result<(), PolicyError> {
        let positive = [
            ("min_history_games", self.min_history_games),
            ("history_window_months", self.history_window_months),
            ("min_clock_seconds", self.min_clock_seconds),
            ("min_rating", self.min_rating),
            ("max_minor_rook_imbalance", self.max_minor_rook_imbalance),
            ("max_queen_imbalance", self.max_queen_imbalance),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(PolicyError::Invalid(format!("{name} must be positive")));
            }
        }
        let [lo, hi] = self.ply_range;
        if lo == 0 || lo > hi {
            return Err(PolicyError::Invalid(format!("empty ply range [{lo}, {hi}]")));
        }
        if self.termination_whitelist.is_empty() {
            return Err(PolicyError::Invalid("termination whitelist is empty".into()));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<FilterPolicy, PolicyError> {
        let policy: FilterPolicy = toml::from_str(text).map_err(|e| PolicyError::Parse(e.to_string()))?;
        policy.validate()?;
        Ok(policy)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("policy serializes")
    }

    /// Whether a snapshot's material imbalance is plausible.
    pub fn imbalance_ok(&self, delta: &MaterialDelta) -> bool {
        let minor = self.max_minor_rook_imbalance;
        delta.knight.unsigned_abs() <= minor
            && delta.bishop.unsigned_abs() <= minor
            && delta.rook.unsigned_abs() <= minor
            && delta.queen.unsigned_abs() <= self.max_queen_imbalance
    }

    pub fn ply_in_range(&self, total_ply: u32) -> bool {
        (self.ply_range[0]..=self.ply_range[1]).contains(&total_ply)
    }
}

/// Game-level predicates, in evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Termination,
    Clock,
    Rating,
    PlyRange,
    History,
}

impl Predicate {
    pub const ALL: [Predicate; 5] = [
        Predicate::Termination,
        Predicate::Clock,
        Predicate::Rating,
        Predicate::PlyRange,
        Predicate::History,
    ];
}

/// Counts from a filter pass. Each rejected game is attributed to the first
/// predicate it fails, so `input == output + sum(rejected)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input: u64,
    pub output: u64,
    pub rejected: BTreeMap<Predicate, u64>,
    pub history_window_months: u32,
    /// Always false: the window covers the months strictly before the game's month.
    pub window_includes_game_month: bool,
    pub policy: FilterPolicy,
}

impl FilterReport {
    pub fn new(policy: &FilterPolicy) -> FilterReport {
        FilterReport {
            input: 0,
            output: 0,
            rejected: Predicate::ALL.iter().map(|p| (*p, 0)).collect(),
            history_window_months: policy.history_window_months,
            window_includes_game_month: false,
            policy: policy.clone(),
        }
    }

    pub fn total_rejected(&self) -> u64 {
        self.rejected.values().sum()
    }
}

/// Streaming form of [`filter_games`].
pub struct GameFilter<'a> {
    index: &'a PlayerHistoryIndex,
    policy: &'a FilterPolicy,
    report: FilterReport,
}

impl<'a> GameFilter<'a> {
    pub fn new(index: &'a PlayerHistoryIndex, policy: &'a FilterPolicy) -> GameFilter<'a> {
        GameFilter {
            index,
            policy,
            report: FilterReport::new(policy),
        }
    }

    /// First failing predicate, if any. Games without a recorded clock fail the clock predicate.
    pub fn check(&self, g: &GameRecord) -> Result<(), Predicate> {
        let p = self.policy;
        if !p.termination_whitelist.contains(&g.termination) {
            return Err(Predicate::Termination);
        }
        match g.time_control {
            Some(tc) if tc.initial_seconds >= p.min_clock_seconds => {}
            _ => return Err(Predicate::Clock),
        }
        if g.white_rating < p.min_rating || g.black_rating < p.min_rating {
            return Err(Predicate::Rating);
        }
        if !p.ply_in_range(g.total_ply) {
            return Err(Predicate::PlyRange);
        }
        let months = p.history_window_months;
        let min = u64::from(p.min_history_games);
        if self.index.window_total(&g.white, g.utc_month, months) < min
            || self.index.window_total(&g.black, g.utc_month, months) < min
        {
            return Err(Predicate::History);
        }
        Ok(())
    }

    pub fn apply(&mut self, g: GameRecord) -> Option<GameRecord> {
        self.report.input += 1;
        match self.check(&g) {
            Ok(()) => {
                self.report.output += 1;
                Some(g)
            }
            Err(pred) => {
                *self.report.rejected.entry(pred).or_default() += 1;
                None
            }
        }
    }

    pub fn report(&self) -> &FilterReport {
        &self.report
    }

    pub fn into_report(self) -> FilterReport {
        self.report
    }
}

/// Keeps the games meeting every policy predicate, in input order.
pub fn filter_games<I>(records: I, index: &PlayerHistoryIndex, policy: &FilterPolicy) -> (Vec<GameRecord>, FilterReport)
where
    I: IntoIterator<Item = GameRecord>,
{
    let mut filter = GameFilter::new(index, policy);
    let kept = records.into_iter().filter_map(|g| filter.apply(g)).collect();
    (kept, filter.into_report())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_toml() {
        let p = FilterPolicy::default();
        p.validate().unwrap();
        assert_eq!(FilterPolicy::from_toml_str("").unwrap(), p);
        assert_eq!(FilterPolicy::from_toml_str(&p.to_toml_string()).unwrap(), p);
        let q = FilterPolicy::from_toml_str(
            "min_rating = 1500\nply_range = [20, 100]\ntermination_whitelist = [\"normal\", \"time_forfeit\"]\n",
        )
        .unwrap();
        assert_eq!(q.min_rating, 1500);
        assert_eq!(q.ply_range, [20, 100]);
        assert!(q.termination_whitelist.contains(&Termination::TimeForfeit));
        assert!(FilterPolicy::from_toml_str("ply_range = [50, 10]").is_err());
        assert!(FilterPolicy::from_toml_str("min_rating = 0").is_err());
        assert!(FilterPolicy::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn queen_imbalance_of_three_is_rejected() {
        let p = FilterPolicy::default();
        let mut d = MaterialDelta::default();
        d.queen = 2;
        d.knight = -3;
        assert!(p.imbalance_ok(&d));
        d.queen = 3;
        assert!(!p.imbalance_ok(&d));
        d.queen = 0;
        d.rook = 4;
        assert!(!p.imbalance_ok(&d));
    }
}
