#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(v) = hkperiod::report::parse_vector_arg(text) {
            assert_eq!(v.len(), hkperiod::lattice::K3N_RANK);
        }
    }
});
