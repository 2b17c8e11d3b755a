use std::collections::{BTreeMap, HashSet};

use proptest::prelude::*;

use piecevalue::features::{read_table, write_table};
use piecevalue::lab::{synthetic_archive, ArchiveConfig};
use piecevalue::pgn::{
    filter_games, stream_games, write_pgn, FilterPolicy, GameRecord, PlayerHistoryIndex, YearMonth,
};
use piecevalue::rules::{Position, Variant};
use piecevalue::snapshot::{snapshot_games, snapshot_ranges, SchemeKind, SnapshotScheme};

fn archive(variant: Variant, n: usize, seed: u64) -> Vec<GameRecord> {
    synthetic_archive(&ArchiveConfig {
        variant,
        n_games: n,
        seed,
        ..ArchiveConfig::default()
    })
}

fn to_pgn(games: &[GameRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    for g in games {
        write_pgn(&mut out, g).unwrap();
    }
    out
}

fn lenient() -> FilterPolicy {
    FilterPolicy {
        min_history_games: 5,
        ..FilterPolicy::default()
    }
}

#[test]
fn pgn_round_trip_through_the_stream() {
    for v in [Variant::Standard, Variant::Atomic, Variant::Horde, Variant::Chess960] {
        let games = archive(v, 40, 1);
        let text = to_pgn(&games);
        let parsed: Vec<GameRecord> = stream_games(&text[..], v).map(Result::unwrap).collect();
        assert_eq!(parsed, games, "{v}");
    }
}

#[test]
fn broken_games_are_skipped_and_counted() {
    let games = archive(Variant::Standard, 5, 2);
    let mut text = to_pgn(&games[..2]);
    text.extend_from_slice(b"[Event \"x\"]\n[White \"a\"]\n[Black \"b\"]\n[Result \"1-0\"]\n\n1. e4 e5 2. Ke3 1-0\n\n");
    text.extend_from_slice(&to_pgn(&games[2..]));
    let mut stream = stream_games(&text[..], Variant::Standard);
    let parsed: Vec<GameRecord> = stream.by_ref().map(Result::unwrap).collect();
    assert_eq!(parsed, games);
    let stats = stream.stats();
    assert_eq!(stats.games_seen, 6);
    assert_eq!(stats.records, 5);
    assert_eq!(stats.skipped, 1);
}

#[test]
fn history_sums_to_player_totals() {
    let games = archive(Variant::Standard, 300, 3);
    let index = PlayerHistoryIndex::build(&games);
    let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
    for g in &games {
        *totals.entry(&g.white).or_default() += 1;
        *totals.entry(&g.black).or_default() += 1;
    }
    for (player, n) in &totals {
        assert_eq!(index.player_total(player), *n);
        let by_month: u64 = index
            .entries()
            .filter(|(p, _, _)| p == player)
            .map(|(_, _, c)| u64::from(c))
            .sum();
        assert_eq!(by_month, *n);
    }
    let mut bytes = Vec::new();
    index.write_to(&mut bytes).unwrap();
    assert_eq!(PlayerHistoryIndex::read_from(&bytes[..]).unwrap(), index);
}

#[test]
fn history_window_excludes_the_games_month() {
    let mut index = PlayerHistoryIndex::new();
    let m = |y, mo| YearMonth::new(y, mo).unwrap();
    index.add("p", m(2021, 3), 100);
    index.add("p", m(2021, 2), 7);
    index.add("p", m(2020, 9), 5);
    index.add("p", m(2020, 8), 1000);
    // Six months before March 2021: September 2020 to February 2021.
    assert_eq!(index.window_total("p", m(2021, 3), 6), 12);
    assert_eq!(index.window_total("p", m(2021, 4), 6), 107);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn filter_is_idempotent_ordered_and_accounted(seed in any::<u64>(), min_games in 0u32..40) {
        let games = archive(Variant::Standard, 120, seed);
        let index = PlayerHistoryIndex::build(&games);
        let policy = FilterPolicy { min_history_games: min_games, ..FilterPolicy::default() };
        let (kept, report) = filter_games(games.clone(), &index, &policy);
        prop_assert_eq!(report.input, games.len() as u64);
        prop_assert_eq!(report.input, report.output + report.total_rejected());
        prop_assert_eq!(report.output, kept.len() as u64);
        // Order preserved: kept games form a subsequence of the input.
        let mut it = games.iter();
        for k in &kept {
            prop_assert!(it.any(|g| g == k));
        }
        let (again, report2) = filter_games(kept.clone(), &index, &policy);
        prop_assert_eq!(&again, &kept);
        prop_assert_eq!(report2.total_rejected(), 0);
    }
}

/// Piece counts read straight off the FEN board field.
fn fen_counts(pos: &Position) -> BTreeMap<char, i32> {
    let fen = pos.to_fen();
    let board = fen.split(' ').next().unwrap();
    let mut counts = BTreeMap::new();
    for c in board.chars().filter(|c| c.is_ascii_alphabetic()) {
        *counts.entry(c).or_insert(0) += 1;
    }
    counts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn snapshot_rows_match_a_board_recount(seed in any::<u64>(), variant_ix in 0usize..4) {
        let variant = [Variant::Standard, Variant::Antichess, Variant::Atomic, Variant::Chess960][variant_ix];
        let games = archive(variant, 40, seed);
        let scheme = SnapshotScheme { kind: SchemeKind::UniformRandom, no_capture_depth: 1, seed };
        let (rows, stats) = snapshot_games(&games, &scheme, &lenient());
        prop_assert_eq!(stats.games, games.len() as u64);
        prop_assert_eq!(stats.rows, rows.len() as u64);
        let ids: HashSet<u64> = rows.iter().map(|r| r.game).collect();
        prop_assert_eq!(ids.len(), rows.len());
        let (again, _) = snapshot_games(&games, &scheme, &lenient());
        prop_assert_eq!(&again, &rows);

        for r in &rows {
            let g = &games[r.game as usize];
            let mut pos = g.start_position().unwrap();
            for san in &g.moves[..r.snapshot_ply as usize] {
                let mv = piecevalue::rules::parse_san(&pos, san).unwrap();
                pos = pos.play_strict(&mv).unwrap();
            }
            let c = fen_counts(&pos);
            let d = |w: char| c.get(&w).copied().unwrap_or(0) - c.get(&w.to_ascii_lowercase()).copied().unwrap_or(0);
            prop_assert_eq!((r.pawn, r.knight, r.bishop, r.rook, r.queen), (d('P'), d('N'), d('B'), d('R'), d('Q')));
            prop_assert_eq!(r.tempo == 1, r.snapshot_ply % 2 == 0);
            prop_assert_eq!(r.king.is_some(), variant == Variant::Antichess);
            if let Some(k) = r.king {
                prop_assert_eq!(k, d('K'));
            }
            prop_assert!(r.knight.abs() <= 3 && r.bishop.abs() <= 3 && r.rook.abs() <= 3 && r.queen.abs() <= 2);
            prop_assert!(r.snapshot_ply <= r.total_ply);
        }
    }
}

#[test]
fn feature_table_round_trip() {
    let games = archive(Variant::Antichess, 60, 9);
    let (rows, _) = snapshot_games(&games, &SnapshotScheme::default(), &lenient());
    assert!(!rows.is_empty());
    let mut bytes = Vec::new();
    write_table(&mut bytes, &rows).unwrap();
    assert_eq!(read_table(&bytes[..]).unwrap(), rows);
}

#[test]
fn ranged_snapshots_stay_in_range() {
    let games = archive(Variant::Standard, 200, 4);
    let ranges = [(10.0, 19.5), (20.0, 29.5), (60.0, 69.5)];
    let out = snapshot_ranges(&games, &ranges, 1, 5, &lenient());
    for ((lo, hi), (rows, stats)) in ranges.iter().zip(&out) {
        assert!(!rows.is_empty());
        assert_eq!(stats.rows, rows.len() as u64);
        for r in rows {
            let t = f64::from(r.snapshot_ply);
            assert!(*lo <= t && t <= *hi);
        }
        let ids: HashSet<u64> = rows.iter().map(|r| r.game).collect();
        assert_eq!(ids.len(), rows.len());
    }
}
