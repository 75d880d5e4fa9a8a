#![no_main]

use libfuzzer_sys::fuzz_target;
use ramsey_ap::ParameterTuple;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(t) = text.parse::<ParameterTuple>() {
        assert_eq!(t.to_string().parse::<ParameterTuple>().unwrap(), t);
        let _ = t.classify();
    }
});
