#![no_main]

use libfuzzer_sys::fuzz_target;
use piecevalue::pgn::stream_games;
use piecevalue::rules::Variant;

fuzz_target!(|data: &[u8]| {
    let Some((&v, rest)) = data.split_first() else { return };
    let variant = Variant::ALL[usize::from(v) % Variant::ALL.len()];
    let mut stream = stream_games(rest, variant);
    let mut ok = 0u64;
    for game in stream.by_ref() {
        if game.is_ok() {
            ok += 1;
        }
    }
    assert_eq!(stream.stats().records, ok);
});
