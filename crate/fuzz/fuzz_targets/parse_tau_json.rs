#![no_main]

use bitangent_core::PeriodMatrix;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(tau) = PeriodMatrix::from_json(text) {
        assert!(tau.min_imag_eigenvalue() > 0.0);
        let again = PeriodMatrix::from_json(&tau.to_json()).expect("serialized matrix reloads");
        assert_eq!(again.tau(), tau.tau());
    }
});
