//! Golden EOPs tables: one row per verified operator instance.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{registry_list, run_stdlib, Instance, Status, StdlibOp};
use crate::error::{Error, Result};
use crate::Value;

pub const GOLDENS_SCHEMA_VERSION: u32 = 1;
pub const CSV_FILE: &str = "onnx_eops.csv";
pub const JSON_FILE: &str = "onnx_eops.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub op: String,
    pub shape: String,
    pub params: String,
    /// Measured elementary operations.
    pub eops: u64,
    /// The documented formula at this instance.
    pub eops_table: u64,
    pub flops_ref: Option<u64>,
    /// `eops / flops_ref`, absent without a positive FLOPs reference.
    pub ratio: Option<String>,
    pub input_digest: String,
    pub output_digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenTable {
    pub version: u32,
    pub records: Vec<GoldenRecord>,
}

/// Hex SHA-256 of the shape and the shortest round-trip text of every numeric.
pub fn digest(v: &Value) -> String {
    let mut h = Sha256::new();
    h.update(format!("{:?}|{}|", v.shape(), v.capacity()));
    for c in v.data() {
        h.update(format!("{c},"));
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect::<String>()[..16].to_string()
}

fn input_digest(inst: &Instance) -> String {
    let mut h = Sha256::new();
    for (k, v) in &inst.inputs {
        h.update(format!("{k}={};", digest(v)));
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect::<String>()[..16].to_string()
}

pub fn ratio_text(eops: u64, flops: Option<u64>) -> Option<String> {
    match flops {
        Some(f) if f > 0 => Some(format!("{:?}", eops as f64 / f as f64)),
        _ => None,
    }
}

pub fn record(op: &StdlibOp, inst: &Instance) -> Result<GoldenRecord> {
    let (out, report) = run_stdlib(op.name, &inst.inputs, 0)?;
    let (shape, params) = inst.describe();
    let flops_ref = op.flops.map(|f| f(inst));
    Ok(GoldenRecord {
        op: op.name.to_string(),
        shape,
        params,
        eops: report.total,
        eops_table: (op.eops)(inst),
        flops_ref,
        ratio: ratio_text(report.total, flops_ref),
        input_digest: input_digest(inst),
        output_digest: digest(&out),
    })
}

/// Rows for every instance of the selected verified operators, all of them when `ops` is `None`.
pub fn golden_table(ops: Option<&[&str]>) -> Result<GoldenTable> {
    let mut records = Vec::new();
    for op in registry_list() {
        if op.status != Status::Verified || ops.is_some_and(|sel| !sel.contains(&op.name)) {
            continue;
        }
        for inst in (op.instances)() {
            records.push(record(op, &inst)?);
        }
    }
    Ok(GoldenTable { version: GOLDENS_SCHEMA_VERSION, records })
}

impl GoldenTable {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let row_err = "in-memory csv";
        w.write_record(["op", "shape", "params", "eops", "eops_table", "flops_ref", "ratio", "input_digest", "output_digest"])
            .expect(row_err);
        for r in &self.records {
            let flops = r.flops_ref.map_or("-".to_string(), |f| f.to_string());
            w.write_record([
                r.op.as_str(),
                &r.shape,
                &r.params,
                &r.eops.to_string(),
                &r.eops_table.to_string(),
                &flops,
                r.ratio.as_deref().unwrap_or("-"),
                &r.input_digest,
                &r.output_digest,
            ])
            .expect(row_err);
        }
        String::from_utf8(w.into_inner().expect(row_err)).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Io(format!("goldens json: {e}")))
    }
}

/// Lines that differ between two renderings, as `-old` / `+new` pairs.
pub fn diff_lines(expected: &str, actual: &str) -> Vec<String> {
    let (a, b): (Vec<&str>, Vec<&str>) = (expected.lines().collect(), actual.lines().collect());
    let mut out = Vec::new();
    for i in 0..a.len().max(b.len()) {
        match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) if x == y => {}
            (x, y) => {
                if let Some(x) = x {
                    out.push(format!("-{x}"));
                }
                if let Some(y) = y {
                    out.push(format!("+{y}"));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regeneration_is_idempotent() {
        let a = golden_table(Some(&["MatMul", "Relu"])).unwrap();
        let b = golden_table(Some(&["MatMul", "Relu"])).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(GoldenTable::from_json(&a.to_json()).unwrap(), a);
        assert!(diff_lines(&a.to_csv(), &b.to_csv()).is_empty());
    }

    #[test]
    fn ratio_formatting() {
        assert_eq!(ratio_text(300, Some(200)).as_deref(), Some("1.5"));
        assert_eq!(ratio_text(1024, Some(1024)).as_deref(), Some("1.0"));
        assert_eq!(ratio_text(0, Some(0)), None);
        assert_eq!(ratio_text(5, None), None);
    }
}
