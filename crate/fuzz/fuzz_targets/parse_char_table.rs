#![no_main]

use bitangent_core::aronhold::CharMatrix;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = CharMatrix::parse_table(text) {
        for i in 0..8 {
            for k in 0..8 {
                assert_eq!(t.entry(i, k), t.entry(k, i));
            }
        }
    }
});
