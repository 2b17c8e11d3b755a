#![no_main]

use libfuzzer_sys::fuzz_target;
use piecevalue::features::{read_table, write_table};

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_table(data) {
        let mut out = Vec::new();
        write_table(&mut out, &rows).unwrap();
        assert_eq!(read_table(&out[..]).unwrap(), rows);
    }
});
