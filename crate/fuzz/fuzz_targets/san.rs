#![no_main]

use libfuzzer_sys::fuzz_target;
use piecevalue::rules::{parse_san, to_san, Position, Variant};

// First line is a FEN (empty for the start position), the rest are SAN tokens.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (fen, moves) = text.split_once('\n').unwrap_or(("", text));
    for variant in Variant::ALL {
        let mut pos = if fen.is_empty() {
            Position::start(variant)
        } else {
            match Position::from_fen(fen, variant) {
                Ok(p) => p,
                Err(_) => continue,
            }
        };
        for token in moves.split_whitespace() {
            let Ok(mv) = parse_san(&pos, token) else { break };
            let written = to_san(&pos, &mv);
            assert_eq!(parse_san(&pos, &written).ok(), Some(mv));
            match pos.play_strict(&mv) {
                Ok(p) => pos = p,
                Err(_) => break,
            }
        }
    }
});
