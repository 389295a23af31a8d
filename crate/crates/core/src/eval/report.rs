use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Elementary-operation counts of one run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EopsReport {
    pub total: u64,
    /// Keyed by output binding; sums to `total`.
    pub per_binding: BTreeMap<String, u64>,
    /// Keyed by the innermost enclosing operator (`map`, `reduce`, `reducei`)
    /// or `function` for applications outside any of them.
    pub per_operator: BTreeMap<String, u64>,
    pub notes: Vec<String>,
}

impl EopsReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn consistent(&self) -> bool {
        self.per_binding.values().sum::<u64>() == self.total && self.per_operator.values().sum::<u64>() == self.total
    }
}
