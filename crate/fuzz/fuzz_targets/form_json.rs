#![no_main]

use kf_core::io;
use kf_core::scalar::FieldSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(w) = io::form_from_json(s, FieldSpec::Rationals) {
        let back = io::form_from_json(&io::form_to_json(&w), FieldSpec::Rationals).unwrap();
        assert_eq!(back, w);
    }
});
