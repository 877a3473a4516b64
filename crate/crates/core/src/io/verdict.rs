use serde::{Deserialize, Serialize};

use crate::witness::Witness;

/// Parameters a verdict was computed under.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_k: Option<u64>,
    pub faults: Vec<String>,
    pub secrets: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statistics {
    pub observer_states: usize,
    pub product_states: usize,
}

/// Wall-clock timing; only emitted on request so that output stays reproducible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// The JSON verdict format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictDocument {
    pub format_version: String,
    pub property: String,
    pub parameters: Parameters,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub statistics: Statistics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl VerdictDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("verdict serialization");
        s.push('\n');
        s
    }
}
