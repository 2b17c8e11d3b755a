//! Snapshot selection and feature extraction.
//!
//! A snapshot at ply `t` is the position after `t` plies have been played.
//! Every game gets its own RNG stream, so results do not depend on how games
//! are scheduled across threads.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::features::FeatureRow;
use crate::pgn::{FilterPolicy, GameRecord};
use piecevalue_rules::{Color, Position, Variant};

/// Which plies a snapshot is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    UniformRandom,
    FirstThird,
    MiddleThird,
    LastThird,
    PlyRange { lo: f64, hi: f64 },
}

impl SchemeKind {
    /// The four per-game draws used by ply-range selection, in priority order.
    pub const STANDARD: [SchemeKind; 4] = [
        SchemeKind::UniformRandom,
        SchemeKind::FirstThird,
        SchemeKind::MiddleThird,
        SchemeKind::LastThird,
    ];

    /// Inclusive candidate plies for a game of `total` plies, or `None` if empty.
    pub fn candidate_range(self, total: u32) -> Option<(u32, u32)> {
        let third = total.div_ceil(3);
        let two_thirds = (2 * total).div_ceil(3);
        let (lo, hi) = match self {
            SchemeKind::UniformRandom => (2, total),
            SchemeKind::FirstThird => (2, third),
            SchemeKind::MiddleThird => (third + 1, two_thirds),
            SchemeKind::LastThird => (two_thirds + 1, total),
            SchemeKind::PlyRange { lo, hi } => {
                if !(lo <= hi) {
                    return None;
                }
                let lo = lo.max(2.0).ceil();
                let hi = hi.min(f64::from(total)).floor();
                if lo > hi {
                    return None;
                }
                (lo as u32, hi as u32)
            }
        };
        (lo.max(2) <= hi && hi <= total).then_some((lo.max(2), hi))
    }

    fn stream_salt(self) -> u64 {
        match self {
            SchemeKind::UniformRandom => 0,
            SchemeKind::FirstThird => 1,
            SchemeKind::MiddleThird => 2,
            SchemeKind::LastThird => 3,
            SchemeKind::PlyRange { .. } => 4,
        }
    }

    /// Deterministic draw for one game.
    pub fn draw(self, total: u32, seed: u64, game: u64) -> Option<u32> {
        let (lo, hi) = self.candidate_range(total)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ self.stream_salt().wrapping_mul(0x9e37_79b9_7f4a_7c15));
        rng.set_stream(game);
        Some(rng.random_range(lo..=hi))
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeKind::UniformRandom => f.write_str("uniform"),
            SchemeKind::FirstThird => f.write_str("first-third"),
            SchemeKind::MiddleThird => f.write_str("middle-third"),
            SchemeKind::LastThird => f.write_str("last-third"),
            SchemeKind::PlyRange { lo, hi } => write!(f, "range:{lo}:{hi}"),
        }
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    /// Accepts `uniform`, `first-third`, `middle-third`, `last-third` and `range:LO:HI`.
    fn from_str(s: &str) -> Result<SchemeKind, String> {
        Ok(match s {
            "uniform" => SchemeKind::UniformRandom,
            "first-third" => SchemeKind::FirstThird,
            "middle-third" => SchemeKind::MiddleThird,
            "last-third" => SchemeKind::LastThird,
            _ => {
                let rest = s
                    .strip_prefix("range:")
                    .ok_or_else(|| format!("unknown snapshot scheme {s:?}"))?;
                let (a, b) = rest.split_once(':').ok_or_else(|| format!("bad range {s:?}"))?;
                let lo: f64 = a.parse().map_err(|_| format!("bad range start {a:?}"))?;
                let hi: f64 = b.parse().map_err(|_| format!("bad range end {b:?}"))?;
                if !(lo <= hi) {
                    return Err(format!("empty range {s:?}"));
                }
                SchemeKind::PlyRange { lo, hi }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotScheme {
    pub kind: SchemeKind,
    /// Number of following played moves that must not be captures (0, 1 or 2).
    pub no_capture_depth: u8,
    pub seed: u64,
}

impl Default for SnapshotScheme {
    fn default() -> SnapshotScheme {
        SnapshotScheme {
            kind: SchemeKind::UniformRandom,
            no_capture_depth: 1,
            seed: 0,
        }
    }
}

impl SnapshotScheme {
    pub fn validate(&self) -> Result<(), String> {
        if self.no_capture_depth > 2 {
            return Err(format!("no-capture depth {} exceeds 2", self.no_capture_depth));
        }
        if let SchemeKind::PlyRange { lo, hi } = self.kind {
            if !(lo <= hi) {
                return Err(format!("empty ply range [{lo}, {hi}]"));
            }
        }
        Ok(())
    }
}

/// Why a game produced no row.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Skip {
    EmptyRange,
    Capture,
    Imbalance,
    Replay(String),
}

impl Skip {
    pub fn kind(&self) -> &'static str {
        match self {
            Skip::EmptyRange => "empty_range",
            Skip::Capture => "capture",
            Skip::Imbalance => "imbalance",
            Skip::Replay(_) => "replay",
        }
    }
}

/// A replayed game: the position before every ply plus the final one.
pub struct Replayed<'a> {
    game: &'a GameRecord,
    positions: Vec<Position>,
    captures: Vec<bool>,
}

impl<'a> Replayed<'a> {
    pub fn new(game: &'a GameRecord) -> Result<Replayed<'a>, Skip> {
        let mut pos = game.start_position().map_err(|e| Skip::Replay(e.to_string()))?;
        let mut positions = Vec::with_capacity(game.moves.len() + 1);
        let mut captures = Vec::with_capacity(game.moves.len());
        for (i, san) in game.moves.iter().enumerate() {
            let mv = piecevalue_rules::parse_san(&pos, san)
                .map_err(|e| Skip::Replay(format!("ply {}: {e}", i + 1)))?;
            let (next, effect) = pos
                .play_with_effect(&mv)
                .map_err(|e| Skip::Replay(format!("ply {}: {e}", i + 1)))?;
            positions.push(pos);
            captures.push(effect.capture);
            pos = next;
        }
        positions.push(pos);
        Ok(Replayed {
            game,
            positions,
            captures,
        })
    }

    /// Whether any of the `depth` moves played after ply `t` is a capture.
    pub fn capture_follows(&self, t: u32, depth: u8) -> bool {
        let t = t as usize;
        (t..t + depth as usize).any(|i| self.captures.get(i).copied().unwrap_or(false))
    }

    pub fn position(&self, t: u32) -> &Position {
        &self.positions[t as usize]
    }

    /// Row for ply `t`, subject to the depth and imbalance filters.
    pub fn row(&self, t: u32, depth: u8, ordinal: u64, policy: &FilterPolicy) -> Result<FeatureRow, Skip> {
        if t as usize >= self.positions.len() {
            return Err(Skip::EmptyRange);
        }
        if self.capture_follows(t, depth) {
            return Err(Skip::Capture);
        }
        let row = features_at(self.game, self.position(t), t, ordinal);
        let d = self.position(t).material_counts().delta();
        if !policy.imbalance_ok(&d) {
            return Err(Skip::Imbalance);
        }
        Ok(row)
    }
}

/// Feature row for `pos`, the position after `ply` plies of `game`.
pub fn features_at(game: &GameRecord, pos: &Position, ply: u32, ordinal: u64) -> FeatureRow {
    let d = pos.material_counts().delta();
    FeatureRow {
        game: ordinal,
        variant: game.variant,
        snapshot_ply: ply,
        total_ply: game.total_ply,
        delta_rating: game.delta_rating(),
        tempo: if pos.turn() == Color::White { 1 } else { -1 },
        pawn: d.pawn,
        knight: d.knight,
        bishop: d.bishop,
        rook: d.rook,
        queen: d.queen,
        king: (game.variant == Variant::Antichess).then_some(d.king),
        passed: (game.variant != Variant::Horde).then_some(d.passed),
        outcome: game.white_score(),
    }
}

/// One snapshot of `game` (the `ordinal`-th game of the stream) under `scheme`.
pub fn snapshot(game: &GameRecord, ordinal: u64, scheme: &SnapshotScheme, policy: &FilterPolicy) -> Result<FeatureRow, Skip> {
    let t = scheme
        .kind
        .draw(game.total_ply, scheme.seed, ordinal)
        .ok_or(Skip::EmptyRange)?;
    Replayed::new(game)?.row(t, scheme.no_capture_depth, ordinal, policy)
}

/// The four standard draws (uniform, first, middle and last third) for a game.
pub fn standard_draws(total_ply: u32, seed: u64, ordinal: u64) -> [Option<u32>; 4] {
    SchemeKind::STANDARD.map(|k| k.draw(total_ply, seed, ordinal))
}

/// First of the four draws lying in `[lo, hi]` with no capture in the next
/// `depth` played moves; `None` if there is none or it fails the imbalance bound.
pub fn snapshot_for_range(
    game: &GameRecord,
    ordinal: u64,
    draws: &[Option<u32>; 4],
    range: (f64, f64),
    depth: u8,
    policy: &FilterPolicy,
) -> Result<FeatureRow, Skip> {
    let in_range: Vec<u32> = draws
        .iter()
        .flatten()
        .copied()
        .filter(|t| f64::from(*t) >= range.0 && f64::from(*t) <= range.1)
        .collect();
    if in_range.is_empty() {
        return Err(Skip::EmptyRange);
    }
    let replayed = Replayed::new(game)?;
    let t = in_range
        .into_iter()
        .find(|t| !replayed.capture_follows(*t, depth))
        .ok_or(Skip::Capture)?;
    replayed.row(t, depth, ordinal, policy)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SnapshotStats {
    pub games: u64,
    pub rows: u64,
    pub skipped: BTreeMap<String, u64>,
}

impl SnapshotStats {
    fn tally(results: &[Result<FeatureRow, Skip>]) -> SnapshotStats {
        let mut stats = SnapshotStats {
            games: results.len() as u64,
            ..SnapshotStats::default()
        };
        for r in results {
            match r {
                Ok(_) => stats.rows += 1,
                Err(s) => *stats.skipped.entry(s.kind().to_string()).or_default() += 1,
            }
        }
        stats
    }

    /// Mean snapshot ply over `rows`.
    pub fn mean_ply(rows: &[FeatureRow]) -> f64 {
        if rows.is_empty() {
            return f64::NAN;
        }
        rows.iter().map(|r| f64::from(r.snapshot_ply)).sum::<f64>() / rows.len() as f64
    }
}

/// Snapshots every game; game ordinals are positions in `games`.
pub fn snapshot_games(games: &[GameRecord], scheme: &SnapshotScheme, policy: &FilterPolicy) -> (Vec<FeatureRow>, SnapshotStats) {
    let results: Vec<_> = games
        .par_iter()
        .enumerate()
        .map(|(i, g)| snapshot(g, i as u64, scheme, policy))
        .collect();
    let stats = SnapshotStats::tally(&results);
    (results.into_iter().flatten().collect(), stats)
}

/// Rows per ply range, each game contributing at most one row per range.
pub fn snapshot_ranges(
    games: &[GameRecord],
    ranges: &[(f64, f64)],
    depth: u8,
    seed: u64,
    policy: &FilterPolicy,
) -> Vec<(Vec<FeatureRow>, SnapshotStats)> {
    ranges
        .iter()
        .map(|range| {
            let results: Vec<_> = games
                .par_iter()
                .enumerate()
                .map(|(i, g)| {
                    let draws = standard_draws(g.total_ply, seed, i as u64);
                    snapshot_for_range(g, i as u64, &draws, *range, depth, policy)
                })
                .collect();
            let stats = SnapshotStats::tally(&results);
            (results.into_iter().flatten().collect(), stats)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirds_partition_the_game() {
        for total in 4..200u32 {
            let (a0, a1) = SchemeKind::FirstThird.candidate_range(total).unwrap();
            let (b0, b1) = SchemeKind::MiddleThird.candidate_range(total).unwrap();
            let (c0, c1) = SchemeKind::LastThird.candidate_range(total).unwrap();
            assert_eq!(a0, 2);
            assert_eq!(a1, total.div_ceil(3));
            assert_eq!(b0, a1 + 1);
            assert_eq!(c0, b1 + 1);
            assert_eq!(c1, total);
        }
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("uniform".parse::<SchemeKind>().unwrap(), SchemeKind::UniformRandom);
        assert_eq!(
            "range:90:99.5".parse::<SchemeKind>().unwrap(),
            SchemeKind::PlyRange { lo: 90.0, hi: 99.5 }
        );
        assert!("range:5:1".parse::<SchemeKind>().is_err());
        for k in SchemeKind::STANDARD {
            assert_eq!(k.to_string().parse::<SchemeKind>().unwrap(), k);
        }
    }

    #[test]
    fn draws_are_reproducible_and_in_range() {
        for g in 0..500 {
            let a = SchemeKind::UniformRandom.draw(63, 7, g).unwrap();
            assert_eq!(Some(a), SchemeKind::UniformRandom.draw(63, 7, g));
            assert!((2..=63).contains(&a));
        }
        assert_eq!(SchemeKind::UniformRandom.draw(1, 7, 0), None);
        assert_eq!(SchemeKind::PlyRange { lo: 90.0, hi: 99.5 }.draw(80, 1, 0), None);
        assert_eq!(SchemeKind::PlyRange { lo: 90.0, hi: 99.5 }.candidate_range(120), Some((90, 99)));
    }
}
