#![no_main]

use libfuzzer_sys::fuzz_target;
use qusum::qmath::HermitianOperator;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(op) = HermitianOperator::parse_json(text) {
            let again = HermitianOperator::parse_json(&op.to_json_string()).expect("round trip");
            assert_eq!(again.dim(), op.dim());
        }
    }
});
