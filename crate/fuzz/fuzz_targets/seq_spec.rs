#![no_main]

use gsh_core::weights::{check_m1, SequenceSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = SequenceSpec::from_json_str(text) else { return };
    // keep builds cheap
    if spec.p_max.is_some_and(|p| p > 4096) {
        return;
    }
    if let Ok(seq) = spec.build() {
        let _ = check_m1(&seq);
    }
    let again = SequenceSpec::from_json_str(&spec.to_json_string()).expect("re-parse");
    assert_eq!(again.to_json_string(), spec.to_json_string());
});
