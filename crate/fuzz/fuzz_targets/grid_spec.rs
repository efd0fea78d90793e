#![no_main]

use gsh_core::io::{parse_box, parse_grid, parse_range, parse_theta_grid};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_range(text) {
        if r.count <= 1 << 16 {
            let pts = r.points();
            assert_eq!(pts.len(), r.count);
        }
    }
    let _ = parse_box(text);
    for dim in 1..=3 {
        if let Ok(g) = parse_grid(text, dim) {
            assert_eq!(g.len(), dim);
        }
        let _ = parse_theta_grid(text, dim);
    }
});
