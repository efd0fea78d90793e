use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Machine-readable run record. Keys in `config` and `results` are sorted,
/// so identical runs serialize identically.
#[derive(Serialize)]
pub struct Report {
    pub gsh_version: &'static str,
    pub command: String,
    pub config: Map<String, Value>,
    pub inputs: Vec<InputDigest>,
    /// sha256 over the concatenated input digests.
    pub inputs_sha256: String,
    pub results: Map<String, Value>,
    pub flags: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            gsh_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: Map::new(),
            inputs: Vec::new(),
            inputs_sha256: hex::encode(Sha256::digest(b"")),
            results: Map::new(),
            flags: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl Serialize) {
        self.config.insert(key.into(), to_value(value));
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.into(), to_value(value));
    }

    pub fn flag(&mut self, flag: impl Into<String>) {
        self.flags.push(flag.into());
    }

    /// Read an input file and record its digest.
    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        let mut all = Sha256::new();
        for d in &self.inputs {
            all.update(d.sha256.as_bytes());
        }
        self.inputs_sha256 = hex::encode(all.finalize());
        String::from_utf8(bytes)
            .map_err(|_| CliError::Validation(format!("{} is not UTF-8", path.display())))
    }

    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("value serializes")
}

/// Complex numbers as `[re, im]`.
pub fn c64(z: num_complex::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn path_str(p: &Option<PathBuf>) -> Value {
    match p {
        Some(p) => Value::String(p.display().to_string()),
        None => Value::Null,
    }
}

impl Report {
    pub fn read_seq(&mut self, path: &Path) -> Result<gsh_core::weights::WeightSequence, CliError> {
        let spec = gsh_core::weights::SequenceSpec::from_json_str(&self.read(path)?)?;
        Ok(spec.build()?)
    }

    pub fn read_field(&mut self, path: &Path) -> Result<gsh_core::hermite::CoefficientField, CliError> {
        Ok(gsh_core::hermite::CoefficientField::from_json_str(&self.read(path)?)?)
    }

    pub fn read_kernel(&mut self, path: &Path) -> Result<gsh_core::kernel::KernelCoefficients, CliError> {
        Ok(gsh_core::kernel::KernelCoefficients::from_json_str(&self.read(path)?)?)
    }
}
