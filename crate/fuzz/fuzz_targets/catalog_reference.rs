#![no_main]

use kf_core::catalog;
use kf_core::scalar::FieldSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    // Parameters such as g for yang_mills scale the build; keep inputs short.
    if s.len() > 64 {
        return;
    }
    if catalog::parse_reference(s).is_ok() {
        let _ = catalog::build(s, Some(FieldSpec::prime(101).unwrap()));
    }
});
