//! Replays the checked-in fuzz seeds through the parsers on stable.

use std::fs;
use std::path::PathBuf;

use bitangent_core::aronhold::CharMatrix;
use bitangent_core::characteristic::Characteristic;
use bitangent_core::PeriodMatrix;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn characteristic_seeds() {
    let mut parsed = 0;
    for (_, text) in seeds("parse_characteristic") {
        if let Ok(m) = text.parse::<Characteristic>() {
            parsed += 1;
            assert_eq!(m.to_string().parse::<Characteristic>().unwrap(), m);
            assert_eq!(m.label_string().parse::<Characteristic>().unwrap(), m);
        }
    }
    assert!(parsed >= 2);
}

#[test]
fn tau_seeds() {
    let mut accepted = Vec::new();
    for (name, text) in seeds("parse_tau_json") {
        if let Ok(tau) = PeriodMatrix::from_json(&text) {
            assert_eq!(PeriodMatrix::from_json(&tau.to_json()).unwrap().tau(), tau.tau());
            accepted.push(name);
        }
    }
    assert_eq!(accepted, ["identity.json", "seed1.json"]);
}

#[test]
fn table_seeds() {
    let mut accepted = Vec::new();
    for (name, text) in seeds("parse_char_table") {
        if CharMatrix::parse_table(&text).is_ok() {
            accepted.push(name);
        }
    }
    assert_eq!(accepted, ["reference"]);
}
