use std::fs;
use std::path::PathBuf;

use qusum::cli::ScenarioConfig;
use qusum::qmath::HermitianOperator;
use qusum::schur::{block_state, BlockDecomposition};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn config_kv_seeds() {
    for (name, text) in seeds("config_kv") {
        let mut cfg = ScenarioConfig::default();
        let ok = cfg.apply_kv(&text).is_ok() && cfg.validate().is_ok();
        assert_eq!(ok, !name.starts_with("bad"), "{name}");
        if ok {
            let mut back = ScenarioConfig::default();
            back.apply_json(&cfg.to_json().to_string()).unwrap();
            assert_eq!(back, cfg, "{name}");
        }
    }
}

#[test]
fn config_json_seeds() {
    for (name, text) in seeds("config_json") {
        let mut cfg = ScenarioConfig::default();
        let ok = cfg.apply_json(&text).is_ok() && cfg.validate().is_ok();
        assert_eq!(ok, name != "not_object", "{name}");
    }
}

#[test]
fn operator_json_seeds() {
    for (name, text) in seeds("operator_json") {
        let parsed = HermitianOperator::parse_json(&text);
        assert_eq!(parsed.is_ok(), !matches!(name.as_str(), "not_hermitian" | "short"), "{name}");
        if let Ok(op) = parsed {
            assert_eq!(HermitianOperator::parse_json(&op.to_json_string()).unwrap().max_abs_diff(&op), 0.0);
        }
    }
}

#[test]
fn block_json_seeds() {
    for (name, text) in seeds("block_json") {
        let parsed = BlockDecomposition::parse_json(&text);
        assert_eq!(parsed.is_ok(), name != "missing_block", "{name}: {:?}", parsed.err());
    }
    let l2 = BlockDecomposition::parse_json(&seeds("block_json").into_iter().find(|s| s.0 == "l2").unwrap().1).unwrap();
    assert!(l2.max_block_diff(&block_state(0.9, 2).unwrap()) < 1e-15);
}
