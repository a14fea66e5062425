#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = hkperiod::report::parse_scenario(data) {
        // accepted documents satisfy every scenario invariant
        s.validate().expect("parsed scenario re-validates");
    }
});
