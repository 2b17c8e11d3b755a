#![no_main]

use libfuzzer_sys::fuzz_target;
use piecevalue::rules::{Position, Variant};

fuzz_target!(|data: &[u8]| {
    let Some((&v, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let variant = Variant::ALL[usize::from(v) % Variant::ALL.len()];
    if let Ok(pos) = Position::from_fen(text, variant) {
        let fen = pos.to_fen();
        let again = Position::from_fen(&fen, variant).expect("own output parses");
        assert_eq!(again.to_fen(), fen);
        let _ = pos.legal_moves();
    }
});
