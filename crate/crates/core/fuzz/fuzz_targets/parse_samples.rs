#![no_main]

use libfuzzer_sys::fuzz_target;
use ramsey_ap::estimation::{fit_count_model, format_samples, parse_samples};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(samples) = parse_samples(text) else {
        return;
    };
    assert_eq!(parse_samples(&format_samples(&samples)).unwrap(), samples);
    let _ = fit_count_model(3, &samples, 2);
});
