use piecevalue_rules::{Color, Move, Position, Role, Variant};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Plays up to `plies` random legal moves, returning every visited position and move.
fn random_game(variant: Variant, seed: u64, plies: usize) -> Vec<(Position, Move)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos = match variant {
        Variant::Chess960 => Position::chess960((seed % 960) as u16).unwrap(),
        v => Position::start(v),
    };
    let mut out = Vec::new();
    for _ in 0..plies {
        if pos.outcome().is_some() {
            break;
        }
        let moves = pos.legal_moves();
        let Some(mv) = moves.choose(&mut rng).copied() else {
            break;
        };
        out.push((pos, mv));
        pos = pos.play(&mv).unwrap();
    }
    out
}

fn variant_strategy() -> impl Strategy<Value = Variant> {
    prop::sample::select(Variant::ALL.to_vec())
}

/// Independent passed-pawn scan: list enemy pawn coordinates, then test each pawn arithmetically.
fn passed_oracle(pos: &Position) -> [[u32; 4]; 2] {
    let mut pawns: Vec<(Color, i32, i32)> = Vec::new();
    for file in 0..8 {
        for rank in 0..8 {
            let sq = piecevalue_rules::Square::from_coords(file, rank);
            if let Some(p) = pos.piece_at(sq) {
                if p.role == Role::Pawn {
                    pawns.push((p.color, file as i32, rank as i32));
                }
            }
        }
    }
    let mut out = [[0u32; 4]; 2];
    for &(color, f, r) in &pawns {
        let blocked = pawns.iter().any(|&(c2, f2, r2)| {
            c2 != color
                && (f2 - f).abs() <= 1
                && match color {
                    Color::White => r2 > r,
                    Color::Black => r2 < r,
                }
        });
        if blocked {
            continue;
        }
        let rel = match color {
            Color::White => r + 1,
            Color::Black => 8 - r,
        };
        let bucket = match rel {
            2..=4 => 0,
            5 => 1,
            6 => 2,
            7 => 3,
            _ => continue,
        };
        out[color as usize][bucket] += 1;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn replay_is_deterministic(variant in variant_strategy(), seed in any::<u64>()) {
        let game = random_game(variant, seed, 120);
        let again = random_game(variant, seed, 120);
        prop_assert_eq!(&game, &again);
        if let Some((start, _)) = game.first() {
            let mut a = *start;
            for (_, mv) in &game {
                a = a.play(mv).unwrap();
            }
            let mut b = *start;
            for (_, mv) in &game {
                b = b.play(mv).unwrap();
            }
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn ply_and_piece_conservation(variant in variant_strategy(), seed in any::<u64>()) {
        for (pos, mv) in random_game(variant, seed, 150) {
            let (next, effect) = pos.play_with_effect(&mv).unwrap();
            prop_assert_eq!(next.ply(), pos.ply() + 1);
            prop_assert_eq!(effect.capture, pos.is_capture(&mv).unwrap());
            if variant == Variant::Atomic {
                continue;
            }
            let us = pos.turn();
            let side = |p: &Position, c: Color| p.pieces().filter(|(_, x)| x.color == c).count();
            prop_assert_eq!(side(&next, us), side(&pos, us));
            let lost = side(&pos, us.other()) - side(&next, us.other());
            prop_assert_eq!(lost, usize::from(effect.capture));
        }
    }

    #[test]
    fn atomic_blast_clears_neighbourhood(seed in any::<u64>()) {
        for (pos, mv) in random_game(Variant::Atomic, seed, 200) {
            let (next, effect) = pos.play_with_effect(&mv).unwrap();
            if !effect.capture {
                continue;
            }
            prop_assert!(next.piece_at(mv.to).is_none());
            for (sq, p) in next.pieces() {
                if sq.distance(mv.to) == 1 {
                    prop_assert_eq!(p.role, Role::Pawn);
                }
            }
        }
    }

    #[test]
    fn san_and_uci_resolve_back_to_the_move(variant in variant_strategy(), seed in any::<u64>()) {
        for (pos, mv) in random_game(variant, seed, 100) {
            let san = piecevalue_rules::to_san(&pos, &mv);
            prop_assert_eq!(piecevalue_rules::parse_san(&pos, &san).unwrap(), mv, "{}", san);
            let uci = piecevalue_rules::to_uci(&pos, &mv);
            prop_assert_eq!(piecevalue_rules::parse_uci(&pos, &uci).unwrap(), mv);
        }
    }

    #[test]
    fn fen_round_trip(variant in variant_strategy(), seed in any::<u64>()) {
        for (pos, _) in random_game(variant, seed, 100) {
            let back = Position::from_fen(&pos.to_fen(), variant).unwrap();
            prop_assert_eq!(back, pos);
        }
    }

    #[test]
    fn removing_an_enemy_pawn_never_shrinks_passed_buckets(variant in variant_strategy(), seed in any::<u64>()) {
        for (pos, _) in random_game(variant, seed, 80).into_iter().step_by(7) {
            let before = pos.material_counts();
            for (sq, p) in pos.pieces() {
                if p.role != Role::Pawn {
                    continue;
                }
                let mut cut = pos;
                cut.set_piece(sq, None);
                let after = cut.material_counts();
                let other = p.color.other();
                for b in 0..4 {
                    prop_assert!(after.side(other).passed[b] >= before.side(other).passed[b]);
                }
            }
        }
    }
}

#[test]
fn material_matches_bruteforce_scan_on_50_positions() {
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 50 {
        let variant = Variant::ALL[(seed % 5) as usize];
        let game = random_game(variant, seed, 90);
        seed += 1;
        let Some((pos, _)) = game.last() else { continue };
        let counts = pos.material_counts();
        let oracle = passed_oracle(pos);
        assert_eq!(counts.white.passed, oracle[0], "{}", pos.to_fen());
        assert_eq!(counts.black.passed, oracle[1], "{}", pos.to_fen());
        for color in [Color::White, Color::Black] {
            let side = counts.side(color);
            let bucketed: u32 = side.passed.iter().sum();
            assert!(bucketed <= side.pawns);
            for role in Role::ALL {
                assert_eq!(side.role(role) as usize, pos.count(color, role));
            }
        }
        checked += 1;
    }
}
