#![no_main]

use libfuzzer_sys::fuzz_target;
use qusum::cli::ScenarioConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let mut cfg = ScenarioConfig::default();
        if cfg.apply_kv(text).is_ok() && cfg.validate().is_ok() {
            let mut back = ScenarioConfig::default();
            back.apply_json(&cfg.to_json().to_string()).expect("echo parses");
            assert_eq!(back.to_json(), cfg.to_json());
        }
    }
});
