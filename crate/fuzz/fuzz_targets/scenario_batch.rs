#![no_main]

use libfuzzer_sys::fuzz_target;
use hkperiod::report::{parse_scenario_batch, scenario_to_value};

fuzz_target!(|data: &[u8]| {
    let Ok(docs) = parse_scenario_batch(data) else {
        return;
    };
    for d in docs {
        let text = scenario_to_value(d.id.as_deref(), &d.scenario, d.options.as_ref()).to_string();
        let again = hkperiod::report::parse_scenario_document(text.as_bytes()).expect("round trip");
        assert_eq!(again.scenario.b_class, d.scenario.b_class);
        assert_eq!(again.options, d.options);
    }
});
