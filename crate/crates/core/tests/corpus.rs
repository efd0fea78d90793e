//! Replays the checked-in fuzz corpus through the same entry points as the
//! fuzz targets, so regressions surface under plain `cargo test`.

use std::fs;
use std::path::PathBuf;

use gsh_core::hermite::{CoefficientField, SampledFunction};
use gsh_core::io::{parse_box, parse_grid, parse_range, parse_theta_grid};
use gsh_core::kernel::KernelCoefficients;
use gsh_core::weights::{check_m1, SequenceSpec};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), String::from_utf8_lossy(&fs::read(&p).unwrap()).into_owned())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn seq_spec_seeds() {
    let mut accepted = 0;
    for (name, text) in seeds("seq_spec") {
        let Ok(spec) = SequenceSpec::from_json_str(&text) else { continue };
        if let Ok(seq) = spec.build() {
            accepted += 1;
            check_m1(&seq).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        let again = SequenceSpec::from_json_str(&spec.to_json_string()).unwrap();
        assert_eq!(again.to_json_string(), spec.to_json_string(), "{name}");
    }
    assert!(accepted >= 5);
}

#[test]
fn coeff_field_seeds() {
    for (name, text) in seeds("coeff_field") {
        if let Ok(f) = CoefficientField::from_json_str(&text) {
            assert_eq!(CoefficientField::from_json_str(&f.to_json_string()).unwrap(), f, "{name}");
        }
    }
}

#[test]
fn kernel_file_seeds() {
    let mut accepted = 0;
    for (name, text) in seeds("kernel_file") {
        if let Ok(t) = KernelCoefficients::from_json_str(&text) {
            accepted += 1;
            assert_eq!(KernelCoefficients::from_json_str(&t.to_json_string()).unwrap(), t, "{name}");
        }
    }
    assert_eq!(accepted, 2);
}

#[test]
fn sampled_function_seeds() {
    for (name, text) in seeds("sampled_function") {
        if let Ok(f) = SampledFunction::from_json_str(&text) {
            let mid: Vec<f64> = f.grids().iter().map(|g| 0.5 * (g[0] + g[g.len() - 1])).collect();
            assert!(f.interpolate(&mid).re.is_finite(), "{name}");
            let s = f.to_json_string();
            assert_eq!(SampledFunction::from_json_str(&s).unwrap().to_json_string(), s);
        }
    }
}

#[test]
fn grid_spec_seeds() {
    for (_, text) in seeds("grid_spec") {
        if let Ok(r) = parse_range(&text) {
            assert_eq!(r.points().len(), r.count);
        }
        let _ = parse_box(&text);
        for dim in 1..=3 {
            if let Ok(g) = parse_grid(&text, dim) {
                assert_eq!(g.len(), dim);
            }
            let _ = parse_theta_grid(&text, dim);
        }
    }
}
