//! Channel specifications: `name:key=val,...` or a path to channel JSON.

use std::collections::BTreeMap;
use std::path::Path;

use capcont_core::channels::{
    constant_channel, dephasing, depolarizing, embedded_identity, erasure, identity, sink_channel,
    truncated_classical_example, truncated_quantum_base, truncated_quantum_example,
};
use capcont_core::{io, QuantumChannel};

use crate::report::CliError;

pub const CHANNEL_NAMES: &[&str] = &[
    "identity",
    "constant",
    "erasure",
    "depolarizing",
    "dephasing",
    "embedded-identity",
    "sink",
    "truncated-classical",
    "truncated-quantum",
    "truncated-quantum-base",
];

fn looks_like_path(text: &str) -> bool {
    !text.contains(':') && (text.contains('/') || text.contains('\\') || text.ends_with(".json"))
}

struct Params {
    name: String,
    values: BTreeMap<String, String>,
}

impl Params {
    fn parse(text: &str) -> Result<Self, CliError> {
        let (name, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut values = BTreeMap::new();
        for item in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::bad_parameter(format!("expected key=value, got {item:?}")))?;
            if values.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(CliError::bad_parameter(format!("parameter {k:?} given twice")));
            }
        }
        Ok(Self {
            name: name.trim().to_string(),
            values,
        })
    }

    fn take<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, CliError> {
        let v = self
            .values
            .remove(key)
            .ok_or_else(|| CliError::bad_parameter(format!("{} needs parameter {key}", self.name)))?;
        v.parse()
            .map_err(|_| CliError::bad_parameter(format!("cannot parse {key}={v}")))
    }

    fn finish(self) -> Result<(), CliError> {
        match self.values.keys().next() {
            Some(k) => Err(CliError::bad_parameter(format!(
                "unknown parameter {k:?} for {}",
                self.name
            ))),
            None => Ok(()),
        }
    }
}

fn positive_dim(d: usize) -> Result<usize, CliError> {
    if d == 0 {
        return Err(CliError::bad_parameter("dimension must be positive"));
    }
    Ok(d)
}

/// Builds a channel from a named specification or reads channel JSON.
pub fn parse_channel_spec(text: &str, tol_psd: f64, tol_tp: f64) -> Result<QuantumChannel, CliError> {
    if looks_like_path(text) || Path::new(text).is_file() {
        let body = std::fs::read_to_string(text)
            .map_err(|e| CliError::new("io", format!("cannot read {text}: {e}")))?;
        return io::parse_channel_with(&body, tol_psd, tol_tp).map_err(CliError::from);
    }
    let mut p = Params::parse(text)?;
    let ch = match p.name.as_str() {
        "identity" => identity(positive_dim(p.take("d")?)?),
        "constant" => constant_channel(positive_dim(p.take("d")?)?),
        "erasure" => erasure(p.take("d")?, p.take("p")?)?,
        "depolarizing" => depolarizing(p.take("d")?, p.take("p")?)?,
        "dephasing" => dephasing(p.take("p")?)?,
        "embedded-identity" => embedded_identity(positive_dim(p.take("n")?)?),
        "sink" => sink_channel(positive_dim(p.take("n")?)?),
        "truncated-classical" => truncated_classical_example(p.take("n")?)?,
        "truncated-quantum" => truncated_quantum_example(p.take("n")?)?,
        "truncated-quantum-base" => truncated_quantum_base(p.take("n")?)?,
        other => {
            return Err(CliError::new(
                "unknown-channel",
                format!("unknown channel {other:?}; known: {}", CHANNEL_NAMES.join(", ")),
            ))
        }
    };
    p.finish()?;
    Ok(ch)
}
