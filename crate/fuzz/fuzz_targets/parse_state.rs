#![no_main]

use libfuzzer_sys::fuzz_target;
use ncdegree::spec::{parse_state, StateSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(state) = parse_state(text) {
        StateSpec::from_state(&state).to_state().unwrap();
    }
});
