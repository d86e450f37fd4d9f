#![no_main]

use kf_core::scalar::FieldSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    for f in [FieldSpec::Rationals, FieldSpec::prime(101).unwrap(), FieldSpec::prime(2).unwrap()] {
        if let Ok(x) = f.parse_scalar(s) {
            // printing and reparsing is the identity
            assert_eq!(f.parse_scalar(&x.to_string()).unwrap(), x);
        }
    }
});
