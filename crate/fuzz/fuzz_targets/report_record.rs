#![no_main]

use libfuzzer_sys::fuzz_target;
use hkperiod::report::ReportRecord;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rec) = ReportRecord::from_jsonl_line(text) {
        let _ = rec.revalidate();
        let again = ReportRecord::from_jsonl_line(&rec.to_jsonl_line()).expect("re-serialized record parses");
        assert_eq!(again, rec);
    }
});
