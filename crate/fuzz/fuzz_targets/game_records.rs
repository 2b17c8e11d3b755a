#![no_main]

use libfuzzer_sys::fuzz_target;
use piecevalue::pgn::read_records;

fuzz_target!(|data: &[u8]| {
    for _ in read_records(data) {}
});
