#![no_main]

use libfuzzer_sys::fuzz_target;
use piecevalue::features::Term;
use piecevalue::pgn::YearMonth;
use piecevalue::rules::{Square, Variant};
use piecevalue::selfplay::FitShape;
use piecevalue::simex::parse_grid;
use piecevalue::snapshot::SchemeKind;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(grid) = parse_grid(text, 58.0) {
        assert!(grid.iter().all(|s| s.is_finite()));
    }
    let _ = text.parse::<Term>();
    let _ = text.parse::<YearMonth>();
    let _ = text.parse::<Square>();
    let _ = text.parse::<Variant>();
    let _ = text.parse::<FitShape>();
    let _ = text.parse::<SchemeKind>();
});
