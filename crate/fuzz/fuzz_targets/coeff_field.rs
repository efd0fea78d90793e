#![no_main]

use gsh_core::hermite::CoefficientField;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(field) = CoefficientField::from_json_str(text) {
        let s = field.to_json_string();
        assert_eq!(CoefficientField::from_json_str(&s).unwrap(), field);
    }
});
