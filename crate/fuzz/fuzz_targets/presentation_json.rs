#![no_main]

use kf_core::io;
use kf_core::scalar::FieldSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = io::presentation_from_json(s, FieldSpec::Rationals) {
        let back = io::presentation_from_json(&io::presentation_to_json(&p), FieldSpec::Rationals).unwrap();
        assert_eq!(back.relations(), p.relations());
    }
});
