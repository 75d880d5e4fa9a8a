#![no_main]

use libfuzzer_sys::fuzz_target;
use ramsey_ap::satcore::{parse_dimacs_file, write_dimacs};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(parsed) = parse_dimacs_file(text) else {
        return;
    };
    // whatever parses must survive a write/parse round trip
    let mut out = Vec::new();
    write_dimacs(&parsed.clauses, &parsed.map, &mut out).unwrap();
    let again = parse_dimacs_file(std::str::from_utf8(&out).unwrap()).unwrap();
    assert_eq!(again.clauses, parsed.clauses);
});
