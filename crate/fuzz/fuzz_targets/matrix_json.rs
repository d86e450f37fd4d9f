#![no_main]

use kf_core::io;
use kf_core::scalar::FieldSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let _ = io::document_from_json(s, FieldSpec::Rationals);
    if let Ok(m) = io::matrix_from_json(s, FieldSpec::Rationals) {
        assert_eq!(io::matrix_from_json(&io::matrix_to_json(&m), FieldSpec::Rationals).unwrap(), m);
    }
});
