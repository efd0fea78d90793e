#![no_main]

use gsh_core::kernel::KernelCoefficients;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = KernelCoefficients::from_json_str(text) {
        let s = t.to_json_string();
        assert_eq!(KernelCoefficients::from_json_str(&s).unwrap(), t);
    }
});
