#![no_main]

use libfuzzer_sys::fuzz_target;
use ncdegree::spec::{parse_observable, ObservableSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(obs) = parse_observable(text) {
        // accepted input must survive a trip through the spec form
        let again = ObservableSpec::from_observable(&obs).to_observable().unwrap();
        assert_eq!(again.modes(), obs.modes());
    }
});
