#![no_main]

use libfuzzer_sys::fuzz_target;
use piecevalue::pgn::PlayerHistoryIndex;

fuzz_target!(|data: &[u8]| {
    if let Ok(index) = PlayerHistoryIndex::read_from(data) {
        let mut out = Vec::new();
        index.write_to(&mut out).unwrap();
        assert_eq!(PlayerHistoryIndex::read_from(&out[..]).unwrap(), index);
    }
});
