use std::fmt;

use capcont_core::tol::Tolerances;
use capcont_core::Error;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    /// Stable machine-readable kind, e.g. `unknown-channel`.
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn bad_parameter(message: impl Into<String>) -> Self {
        Self::new("bad-parameter", message)
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("usage", message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Dimension(_) => "dimension",
            Error::Argument(_) => "bad-parameter",
            Error::Numeric(_) => "numeric",
            Error::CpViolation { .. } => "cp-violation",
            Error::TpViolation { .. } => "tp-violation",
            Error::Parse(_) => "malformed-json",
            Error::Domain(_) => "domain",
        };
        Self::new(code, e.to_string())
    }
}

#[derive(Debug, Serialize)]
struct Envelope<'a> {
    schema: u32,
    tool: &'static str,
    version: &'static str,
    seed: u64,
    tolerances: &'a Tolerances,
    command: &'a str,
    result: &'a Value,
}

/// Finds the first `null` (how serde_json encodes NaN and ±∞) in `v`.
fn find_null(v: &Value, path: &mut String) -> bool {
    match v {
        Value::Null => true,
        Value::Array(items) => items.iter().enumerate().any(|(i, x)| {
            let len = path.len();
            path.push_str(&format!("[{i}]"));
            let hit = find_null(x, path);
            if !hit {
                path.truncate(len);
            }
            hit
        }),
        Value::Object(map) => map.iter().any(|(k, x)| {
            let len = path.len();
            path.push('.');
            path.push_str(k);
            let hit = find_null(x, path);
            if !hit {
                path.truncate(len);
            }
            hit
        }),
        _ => false,
    }
}

/// Converts a result to JSON, rejecting non-finite numbers.
pub fn to_value<T: Serialize>(result: &T) -> Result<Value, CliError> {
    let v = serde_json::to_value(result).map_err(|e| CliError::new("internal", e.to_string()))?;
    let mut path = String::from("result");
    if find_null(&v, &mut path) {
        return Err(CliError::new(
            "non-finite",
            format!("non-finite or missing value at {path}"),
        ));
    }
    Ok(v)
}

pub fn envelope(seed: u64, tolerances: &Tolerances, command: &str, result: &Value) -> Result<String, CliError> {
    let env = Envelope {
        schema: SCHEMA,
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        seed,
        tolerances,
        command,
        result,
    };
    let text = serde_json::to_string_pretty(&env).map_err(|e| CliError::new("internal", e.to_string()))?;
    Ok(text + "\n")
}

pub fn error_envelope(err: &CliError) -> String {
    let v = serde_json::json!({
        "schema": SCHEMA,
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "error": { "code": err.code, "message": err.message },
    });
    serde_json::to_string_pretty(&v).unwrap_or_default() + "\n"
}

/// Arrays longer than this are summarized in pretty output.
const PRETTY_ARRAY_LIMIT: usize = 12;

/// `key = value` lines for human reading.
pub fn pretty(v: &Value) -> String {
    let mut out = String::new();
    pretty_into(v, "", &mut out);
    out
}

fn pretty_into(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                pretty_into(x, &key, out);
            }
        }
        Value::Array(items) if items.len() > PRETTY_ARRAY_LIMIT => {
            out.push_str(&format!("{prefix} = [{} items]\n", items.len()));
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{prefix} = [{}]\n", parts.join(", ")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                pretty_into(x, &format!("{prefix}[{i}]"), out);
            }
        }
        other => out.push_str(&format!("{prefix} = {}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
