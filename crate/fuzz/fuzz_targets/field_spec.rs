#![no_main]

use kf_core::scalar::FieldSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(f) = s.parse::<FieldSpec>() {
        assert_eq!(f.to_string().parse::<FieldSpec>().unwrap(), f);
    }
});
