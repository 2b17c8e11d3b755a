#![no_main]

use libfuzzer_sys::fuzz_target;
use piecevalue::selfplay::{parse_ledger, SelfPlayRow};

fuzz_target!(|data: &[u8]| {
    if let Ok(entries) = parse_ledger(data) {
        for e in &entries {
            let _ = SelfPlayRow::from_entry(e);
        }
    }
});
