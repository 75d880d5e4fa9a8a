//! Replays the checked-in fuzz corpus through the parsers on stable toolchains.

use std::fs;
use std::path::PathBuf;

use ramsey_ap::drivers::parse_certificate;
use ramsey_ap::estimation::parse_samples;
use ramsey_ap::satcore::{parse_dimacs_file, parse_solver_output};
use ramsey_ap::ParameterTuple;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (
                path.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&path).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn text(bytes: &[u8]) -> &str {
    std::str::from_utf8(bytes).unwrap()
}

#[test]
fn dimacs_seeds_parse() {
    for (name, data) in seeds("parse_dimacs") {
        let parsed = parse_dimacs_file(text(&data)).unwrap_or_else(|e| panic!("{name}: {e}"));
        if name == "map" {
            assert_eq!(parsed.map.len(), 2);
        }
    }
}

#[test]
fn certificate_seeds_parse() {
    for (name, data) in seeds("parse_certificate") {
        assert!(parse_certificate(text(&data)).is_ok(), "{name}");
    }
}

#[test]
fn samples_seeds_parse() {
    for (name, data) in seeds("parse_samples") {
        assert!(parse_samples(text(&data)).is_ok(), "{name}");
    }
}

#[test]
fn tuple_seeds_parse() {
    for (name, data) in seeds("parse_tuple") {
        assert!(text(&data).parse::<ParameterTuple>().is_ok(), "{name}");
    }
}

#[test]
fn solver_output_seeds_parse() {
    for (name, data) in seeds("parse_solver_output") {
        let (&n, rest) = data.split_first().unwrap();
        assert!(
            parse_solver_output(text(rest), n as usize).is_ok(),
            "{name}"
        );
    }
}
