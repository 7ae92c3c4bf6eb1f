#![no_main]

use libfuzzer_sys::fuzz_target;
use qusum::schur::BlockDecomposition;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(dec) = BlockDecomposition::parse_json(text) {
            let again = BlockDecomposition::parse_json(&dec.to_json_string()).expect("round trip");
            assert!(again.labels().eq(dec.labels()));
        }
    }
});
