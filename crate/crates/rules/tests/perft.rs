use piecevalue_rules::{Position, Variant};

fn perft(pos: &Position, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let moves = pos.legal_moves();
    if depth == 1 {
        return moves.len() as u64;
    }
    moves
        .iter()
        .map(|m| perft(&pos.play(m).unwrap(), depth - 1))
        .sum()
}

fn fen(text: &str, variant: Variant) -> Position {
    Position::from_fen(text, variant).unwrap()
}

#[test]
fn standard_start() {
    let pos = Position::start(Variant::Standard);
    assert_eq!(perft(&pos, 1), 20);
    assert_eq!(perft(&pos, 2), 400);
    assert_eq!(perft(&pos, 3), 8902);
    assert_eq!(perft(&pos, 4), 197_281);
}

#[test]
fn kiwipete() {
    let pos = fen(
        "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
        Variant::Standard,
    );
    assert_eq!(perft(&pos, 1), 48);
    assert_eq!(perft(&pos, 2), 2039);
    assert_eq!(perft(&pos, 3), 97_862);
}

#[test]
fn endgame_with_en_passant_pins() {
    let pos = fen("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1", Variant::Standard);
    assert_eq!(perft(&pos, 1), 14);
    assert_eq!(perft(&pos, 2), 191);
    assert_eq!(perft(&pos, 3), 2812);
    assert_eq!(perft(&pos, 4), 43_238);
}

#[test]
fn promotions_and_castling_rights() {
    let pos = fen(
        "r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1",
        Variant::Standard,
    );
    assert_eq!(perft(&pos, 1), 6);
    assert_eq!(perft(&pos, 2), 264);
    assert_eq!(perft(&pos, 3), 9467);
}

#[test]
fn chess960_positions() {
    // Published Chess960 perft results.
    let pos = fen(
        "bqnb1rkr/pp3ppp/3ppn2/2p5/5P2/P2P4/NPP1P1PP/BQ1BNRKR w HFhf - 2 9",
        Variant::Chess960,
    );
    assert_eq!(perft(&pos, 1), 21);
    assert_eq!(perft(&pos, 2), 528);
    assert_eq!(perft(&pos, 3), 12_189);
    let pos = fen(
        "2nnrbkr/p1qppppp/8/1ppb4/6PP/3PP3/PPP2P2/BQNNRBKR w HEhe - 1 9",
        Variant::Chess960,
    );
    assert_eq!(perft(&pos, 1), 21);
    assert_eq!(perft(&pos, 2), 807);
    assert_eq!(perft(&pos, 3), 18_002);
}

#[test]
fn variant_starts() {
    assert_eq!(perft(&Position::start(Variant::Antichess), 1), 20);
    assert_eq!(perft(&Position::start(Variant::Antichess), 2), 400);
    assert_eq!(perft(&Position::start(Variant::Antichess), 3), 8067);
    assert_eq!(perft(&Position::start(Variant::Atomic), 1), 20);
    assert_eq!(perft(&Position::start(Variant::Atomic), 2), 400);
    assert_eq!(perft(&Position::start(Variant::Horde), 1), 8);
    assert_eq!(perft(&Position::start(Variant::Horde), 2), 128);
}
