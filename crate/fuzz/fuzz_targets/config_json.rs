#![no_main]

use libfuzzer_sys::fuzz_target;
use qusum::cli::ScenarioConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let mut cfg = ScenarioConfig::default();
        let _ = cfg.apply_json(text);
        let _ = cfg.validate();
    }
});
