//! The JSON certificate emitted by every subcommand: an echo of the input,
//! the verdicts, the constructed objects, and the list of named exact
//! checks with their outcomes. Rationals and big integers are serialized
//! as strings ("p/q") so nothing is lost to floating point.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, pass: bool) -> Self {
        Check {
            name: name.to_string(),
            pass,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StructureDump {
    pub base: u64,
    pub factors: Vec<String>,
    pub exponents: Vec<u32>,
    pub strict: bool,
    pub moduli: Vec<String>,
    pub stages: Vec<String>,
    pub digits: String,
    pub a_set: String,
    pub b_set: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TilingSetDump {
    pub finite_part: String,
    pub period: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    /// Echo of the inputs, sufficient to re-run the checks.
    pub input: serde_json::Value,
    pub verdicts: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureDump>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tiling_set: Option<TilingSetDump>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<String>>,
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn new(command: &str) -> Self {
        Certificate {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            input: serde_json::Value::Null,
            verdicts: serde_json::Value::Null,
            structure: None,
            tiling_set: None,
            measure: None,
            spectrum: None,
            checks: Vec::new(),
        }
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Same named checks with the same outcomes (order-insensitive).
    pub fn matches(&self, other: &Certificate) -> bool {
        let mut a: Vec<_> = self.checks.clone();
        let mut b: Vec<_> = other.checks.clone();
        a.sort_by(|x, y| x.name.cmp(&y.name));
        b.sort_by(|x, y| x.name.cmp(&y.name));
        a == b
    }
}
