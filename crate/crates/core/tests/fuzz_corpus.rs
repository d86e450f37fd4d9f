//! Replays the checked-in fuzz corpus through every parser entry point, with the same
//! round-trip assertions the fuzz targets make.

use std::fs;
use std::path::PathBuf;

use kf_core::catalog;
use kf_core::io;
use kf_core::scalar::FieldSpec;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "empty corpus for {target}");
    out
}

#[test]
fn scalar_literals() {
    for (_, s) in seeds("scalar_literal") {
        for f in [FieldSpec::Rationals, FieldSpec::prime(101).unwrap(), FieldSpec::prime(2).unwrap()] {
            if let Ok(x) = f.parse_scalar(&s) {
                assert_eq!(f.parse_scalar(&x.to_string()).unwrap(), x, "{s:?} over {f}");
            }
        }
    }
}

#[test]
fn field_specs() {
    let mut accepted = 0;
    for (_, s) in seeds("field_spec") {
        if let Ok(f) = s.parse::<FieldSpec>() {
            assert_eq!(f.to_string().parse::<FieldSpec>().unwrap(), f);
            accepted += 1;
        }
    }
    assert!(accepted >= 4);
}

#[test]
fn form_files() {
    let mut accepted = 0;
    for (name, s) in seeds("form_json") {
        match io::form_from_json(&s, FieldSpec::Rationals) {
            Ok(w) => {
                assert_eq!(io::form_from_json(&io::form_to_json(&w), FieldSpec::Rationals).unwrap(), w, "{name}");
                accepted += 1;
            }
            Err(e) => assert!(!e.to_string().is_empty()),
        }
    }
    assert!(accepted >= 4);
}

#[test]
fn presentation_files() {
    for (name, s) in seeds("presentation_json") {
        if let Ok(p) = io::presentation_from_json(&s, FieldSpec::Rationals) {
            let back = io::presentation_from_json(&io::presentation_to_json(&p), FieldSpec::Rationals).unwrap();
            assert_eq!(back.relations(), p.relations(), "{name}");
        }
    }
}

#[test]
fn matrix_files() {
    for (name, s) in seeds("matrix_json") {
        let _ = io::document_from_json(&s, FieldSpec::Rationals);
        if let Ok(m) = io::matrix_from_json(&s, FieldSpec::Rationals) {
            assert_eq!(io::matrix_from_json(&io::matrix_to_json(&m), FieldSpec::Rationals).unwrap(), m, "{name}");
        }
    }
}

#[test]
fn catalog_references() {
    for (_, s) in seeds("catalog_reference") {
        if catalog::parse_reference(&s).is_ok() {
            let _ = catalog::build(&s, Some(FieldSpec::prime(101).unwrap()));
        }
    }
}
