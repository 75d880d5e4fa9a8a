#![no_main]

use libfuzzer_sys::fuzz_target;
use ramsey_ap::satcore::parse_solver_output;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else {
        return;
    };
    let text = String::from_utf8_lossy(rest);
    if let Ok((_, Some(model))) = parse_solver_output(&text, n as usize) {
        assert_eq!(model.len(), n as usize);
    }
});
