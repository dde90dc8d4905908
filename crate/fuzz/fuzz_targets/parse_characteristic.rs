#![no_main]

use bitangent_core::characteristic::Characteristic;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = text.parse::<Characteristic>() {
        assert_eq!(m.to_string().parse::<Characteristic>().unwrap(), m);
        assert_eq!(m.label_string().parse::<Characteristic>().unwrap(), m);
        assert_eq!(Characteristic::from_index(m.index()), m);
    }
});
