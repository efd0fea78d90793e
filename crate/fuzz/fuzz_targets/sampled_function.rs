#![no_main]

use gsh_core::hermite::SampledFunction;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = SampledFunction::from_json_str(text) {
        let mid: Vec<f64> = f.grids().iter().map(|g| 0.5 * (g[0] + g[g.len() - 1])).collect();
        let _ = f.interpolate(&mid);
        let s = f.to_json_string();
        assert_eq!(SampledFunction::from_json_str(&s).unwrap().to_json_string(), s);
    }
});
