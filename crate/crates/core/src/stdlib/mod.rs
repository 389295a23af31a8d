//! ToLang sources for the ONNX operators, their cost formulas and a runner
//! that adapts axis arguments to the sources' fixed layouts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{run_source, EopsReport, RunOptions};
use crate::scalar::Numeric;
use crate::value::{count_of, Coords, ToL};
use crate::Value;

pub mod cases;
pub mod goldens;
mod table;

pub use cases::{case_studies, case_study, listings, CaseStudy};

pub const STDLIB_VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Verified,
    Transcribed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "VERIFIED",
            Status::Transcribed => "TRANSCRIBED",
        })
    }
}

/// How the runner presents tensors to a source that works on a fixed axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// Inputs are passed unchanged.
    Plain,
    /// The `axis` attribute is moved last and the tensor `t` viewed as `[rows, len]`.
    /// A `[rows]` result is restored with the reduced axis kept as extent 1.
    Rows,
    /// The `axis` attribute is moved first and every tensor input viewed as `[len, rest]`.
    Front,
}

/// Concrete inputs for one run, tensors and attributes alike, by name.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub inputs: BTreeMap<String, Value>,
}

impl Instance {
    pub fn new(inputs: impl IntoIterator<Item = (&'static str, Value)>) -> Self {
        Instance { inputs: inputs.into_iter().map(|(k, v)| (k.to_string(), v)).collect() }
    }

    pub fn shape(&self, name: &str) -> &[usize] {
        self.inputs.get(name).map(|v| v.shape()).unwrap_or(&[])
    }

    pub fn vol(&self, name: &str) -> u64 {
        self.inputs.get(name).map_or(0, |v| v.volume() as u64)
    }

    /// Integer attribute; panics on a missing or non-integral value.
    pub fn int(&self, name: &str) -> i64 {
        self.inputs
            .get(name)
            .and_then(|v| v.single_cell())
            .and_then(|c| c.as_exact_i64())
            .unwrap_or_else(|| panic!("integer attribute `{name}`"))
    }

    /// Short description of the tensor shapes and scalar attributes.
    pub fn describe(&self) -> (String, String) {
        let mut shapes = Vec::new();
        let mut params = Vec::new();
        for (k, v) in &self.inputs {
            if v.dim() == 0 {
                params.push(format!("{k}={}", v.data()[0]));
            } else if v.data().iter().all(|c| c.is_integral()) && v.dim() == 1 && v.volume() <= 4 && is_attr_vector(k) {
                params.push(format!("{k}={:?}", v.to_f64()));
            } else {
                shapes.push(format!("{k}={:?}", v.shape()));
            }
        }
        (shapes.join(" "), params.join(" "))
    }
}

fn is_attr_vector(name: &str) -> bool {
    name == "sha"
}

pub type Formula = fn(&Instance) -> u64;

/// One operator of the standard library.
#[derive(Clone)]
pub struct StdlibOp {
    pub name: &'static str,
    pub status: Status,
    pub tensors: &'static [&'static str],
    pub attrs: &'static [&'static str],
    pub layout: Layout,
    pub source: &'static str,
    pub eops_formula: &'static str,
    /// `None` where the reference gives no FLOPs count.
    pub flops_formula: Option<&'static str>,
    pub eops: Formula,
    pub flops: Option<Formula>,
    /// At least three concrete instances with every extent at most 8.
    pub instances: fn() -> Vec<Instance>,
}

impl fmt::Debug for StdlibOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StdlibOp").field("name", &self.name).field("status", &self.status).finish()
    }
}

impl StdlibOp {
    pub fn flops_text(&self) -> &'static str {
        self.flops_formula.unwrap_or("n/a")
    }
}

pub fn registry_list() -> &'static [StdlibOp] {
    static REG: OnceLock<Vec<StdlibOp>> = OnceLock::new();
    REG.get_or_init(table::all)
}

pub fn lookup(name: &str) -> Result<&'static StdlibOp> {
    registry_list().iter().find(|o| o.name == name).ok_or_else(|| Error::UnknownOperator(name.to_string()))
}

/// Runs one operator; `inputs` holds tensors, attributes and the optional
/// 1-based `axis`.
pub fn run_stdlib(name: &str, inputs: &BTreeMap<String, Value>, seed: u64) -> Result<(Value, EopsReport)> {
    let op = lookup(name)?;
    let (env, restore) = prepare(op, inputs)?;
    let out = run_source::<Numeric>(op.source, &env, &RunOptions { seed, memo: true })?;
    let result = out.get("result").cloned().ok_or_else(|| Error::MissingInput("result".into()))?;
    Ok((restore.apply(op, result)?, out.report))
}

/// The bindings a source sees for `inputs`, after the layout change.
pub fn source_inputs(name: &str, inputs: &BTreeMap<String, Value>) -> Result<HashMap<String, Value>> {
    prepare(lookup(name)?, inputs).map(|(env, _)| env)
}

/// Undoes the layout change on a source result.
struct Restore {
    perm: Vec<usize>,
    rest: Vec<usize>,
    len: usize,
}

impl Restore {
    fn apply(self, op: &StdlibOp, result: Value) -> Result<Value> {
        match op.layout {
            Layout::Plain => Ok(result),
            Layout::Rows => {
                let kept = if result.dim() == 1 { 1 } else { self.len };
                let mut shape = self.rest;
                shape.push(kept);
                permute(&result.with_shape(shape)?, &inverse(&self.perm))
            }
            Layout::Front => {
                if result.dim() < 2 {
                    return Err(Error::ShapeMismatch(format!("operator `{}` must return a matrix", op.name)));
                }
                let mut shape = result.shape()[..result.dim() - 1].to_vec();
                shape.extend(self.rest);
                let prefix = result.dim() - 2;
                let full: Vec<usize> = (0..prefix).chain(inverse(&self.perm).iter().map(|p| p + prefix)).collect();
                permute(&result.with_shape(shape)?, &full)
            }
        }
    }
}

fn prepare(op: &StdlibOp, inputs: &BTreeMap<String, Value>) -> Result<(HashMap<String, Value>, Restore)> {
    for t in op.tensors.iter().chain(op.attrs) {
        if !inputs.contains_key(*t) {
            return Err(Error::MissingInput(t.to_string()));
        }
    }
    let mut env: HashMap<String, Value> =
        inputs.iter().filter(|(k, _)| k.as_str() != "axis").map(|(k, v)| (k.clone(), v.clone())).collect();
    let mut restore = Restore { perm: Vec::new(), rest: Vec::new(), len: 0 };
    match op.layout {
        Layout::Plain => {}
        Layout::Rows => {
            let t = &env["t"];
            let rank = t.dim();
            let axis = axis_of(inputs, rank)?;
            let perm = move_to_last(rank, axis);
            let moved = permute(t, &perm)?;
            let len = moved.shape()[rank - 1];
            let rest = moved.shape()[..rank - 1].to_vec();
            env.insert("t".into(), moved.with_shape(vec![count_of(&rest), len])?);
            restore = Restore { perm, rest, len };
        }
        Layout::Front => {
            let rank = env[op.tensors[0]].dim();
            let axis = axis_of(inputs, rank)?;
            let perm = move_to_front(rank, axis);
            for t in op.tensors.iter().filter(|t| **t != "idx") {
                let v = &env[*t];
                if v.dim() != rank {
                    return Err(Error::ShapeMismatch(format!("`{t}` has dimension {}, expected {rank}", v.dim())));
                }
                let moved = permute(v, &perm)?;
                restore.rest = moved.shape()[1..].to_vec();
                let lead = moved.shape()[0];
                env.insert(t.to_string(), moved.with_shape(vec![lead, count_of(&restore.rest)])?);
            }
            restore.perm = perm;
        }
    }
    Ok((env, restore))
}

fn axis_of(inputs: &BTreeMap<String, Value>, rank: usize) -> Result<usize> {
    if rank == 0 {
        return Err(Error::DegenerateShape("an axis needs a tensor of dimension at least 1".into()));
    }
    let axis = match inputs.get("axis") {
        None => return Ok(rank - 1),
        Some(a) => a.single_cell().and_then(|c| c.as_exact_i64()),
    };
    match axis {
        Some(a) if a >= 1 && (a as usize) <= rank => Ok(a as usize - 1),
        _ => Err(Error::Index(format!("axis must be an integer in 1..={rank}"))),
    }
}

fn move_to_last(rank: usize, axis: usize) -> Vec<usize> {
    (0..rank).filter(|&a| a != axis).chain([axis]).collect()
}

fn move_to_front(rank: usize, axis: usize) -> Vec<usize> {
    [axis].into_iter().chain((0..rank).filter(|&a| a != axis)).collect()
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Output axis `i` is input axis `perm[i]` (0-based).
pub fn permute(t: &Value, perm: &[usize]) -> Result<Value> {
    let shape: Vec<usize> = perm.iter().map(|&p| t.shape()[p]).collect();
    let mut data = Vec::with_capacity(t.volume());
    let mut src = vec![0; perm.len()];
    for c in Coords::new(&shape) {
        for (i, &p) in perm.iter().enumerate() {
            src[p] = c[i];
        }
        let off = t.offset(&src)?;
        data.extend_from_slice(t.list_at(off));
    }
    ToL::new(t.type_list().clone(), shape, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixty_operators() {
        let reg = registry_list();
        assert_eq!(reg.len(), 60);
        let mut names: Vec<_> = reg.iter().map(|o| o.name).collect();
        names.dedup();
        assert_eq!(names.len(), 60);
    }

    #[test]
    fn formula_texts() {
        assert_eq!(lookup("MatMul").unwrap().eops_formula, "2*vol(t1)*|t2|[2]");
        assert_eq!(lookup("Relu").unwrap().eops_formula, "vol(t)");
        assert_eq!(lookup("Identity").unwrap().eops_formula, "0");
        assert!(matches!(lookup("Nope"), Err(Error::UnknownOperator(_))));
    }

    #[test]
    fn permute_round_trip() {
        let t = Value::from_i64(vec![2, 3, 4], &(0..24).collect::<Vec<_>>()).unwrap();
        let p = move_to_last(3, 0);
        let moved = permute(&t, &p).unwrap();
        assert_eq!(moved.shape(), &[3, 4, 2]);
        assert_eq!(permute(&moved, &inverse(&p)).unwrap(), t);
    }

    #[test]
    fn every_source_runs_on_its_instances() {
        let mut bad = Vec::new();
        for op in registry_list() {
            let insts = (op.instances)();
            assert!(insts.len() >= 3, "{}", op.name);
            for inst in insts {
                if inst.inputs.values().any(|v| v.shape().iter().any(|&d| d > 8)) {
                    bad.push(format!("{} has an extent above 8", op.name));
                }
                if let Err(e) = run_stdlib(op.name, &inst.inputs, 0) {
                    bad.push(format!("{} on {:?}: {e}", op.name, inst.describe()));
                }
            }
        }
        assert!(bad.is_empty(), "{}", bad.join("\n"));
    }
}
