#![no_main]

use libfuzzer_sys::fuzz_target;
use piecevalue::rules::{parse_uci, to_uci, Position, Variant};

fuzz_target!(|data: &[u8]| {
    let Some((&v, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let variant = Variant::ALL[usize::from(v) % Variant::ALL.len()];
    let mut pos = Position::start(variant);
    for token in text.split_whitespace() {
        let Ok(mv) = parse_uci(&pos, token) else { break };
        assert_eq!(parse_uci(&pos, &to_uci(&pos, &mv)).ok(), Some(mv));
        match pos.play_strict(&mv) {
            Ok(p) => pos = p,
            Err(_) => break,
        }
    }
});
