#![no_main]

use libfuzzer_sys::fuzz_target;
use ramsey_ap::drivers::{parse_certificate, verify_certificate};
use ramsey_ap::{Family, ParameterTuple};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(colouring) = parse_certificate(text) else {
        return;
    };
    assert_eq!(
        parse_certificate(&colouring.to_string()).unwrap(),
        colouring
    );
    let t = ParameterTuple::new(vec![3, 3]).unwrap();
    let _ = verify_certificate(Family::Vdw, &t, 8, &colouring);
});
