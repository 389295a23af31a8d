mod common;

use std::collections::{BTreeMap, HashMap};

use common::{compare, oracle, Nd};
use tol::frontend::parse;
use tol::ops::lower::{eval_atomic, lower_program_with, InputShapes};
use tol::stdlib::goldens::golden_table;
use tol::stdlib::{lookup, registry_list, run_stdlib, source_inputs, Status};
use tol::{run_source, RunOptions, Value};

fn inputs(pairs: Vec<(&str, Value)>) -> BTreeMap<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn check_oracle(name: &str) {
    let op = lookup(name).unwrap();
    let insts = (op.instances)();
    assert!(insts.len() >= 3);
    for inst in insts {
        let (got, _) = run_stdlib(name, &inst.inputs, 0).unwrap();
        let want = oracle(name, &inst.inputs).expect("oracle exists");
        if let Err(e) = compare(&got, &want) {
            panic!("{name} on {:?}: {e}", inst.describe());
        }
    }
}

fn check_eops(name: &str) {
    let op = lookup(name).unwrap();
    let mut bad = Vec::new();
    for inst in (op.instances)() {
        let (_, report) = run_stdlib(name, &inst.inputs, 0).unwrap();
        assert!(report.consistent());
        let want = (op.eops)(&inst);
        if report.total != want {
            bad.push(format!("{:?}: measured {} vs {} = {want}", inst.describe(), report.total, op.eops_formula));
        }
    }
    assert!(bad.is_empty(), "{name}: {}", bad.join("; "));
}

macro_rules! verified {
    ($($m:ident => $name:literal),* $(,)?) => {
        $(
            mod $m {
                #[test]
                fn matches_oracle() {
                    super::check_oracle($name);
                }

                #[test]
                fn eops_match_formula() {
                    super::check_eops($name);
                }
            }
        )*

        const TESTED: &[&str] = &[$($name),*];
    };
}

verified! {
    argmax => "ArgMax",
    argmin => "ArgMin",
    average_pool => "AveragePool",
    batch_normalization => "BatchNormalization",
    celu => "Celu",
    clip => "Clip",
    concat => "Concat",
    conv => "Conv",
    cumsum => "CumSum",
    depth_to_space => "DepthToSpace",
    elu => "Elu",
    expand => "Expand",
    eye_like => "EyeLike",
    flatten => "Flatten",
    gather => "Gather",
    gemm => "Gemm",
    hard_sigmoid => "HardSigmoid",
    hard_swish => "HardSwish",
    identity => "Identity",
    leaky_relu => "LeakyRelu",
    log_softmax => "LogSoftmax",
    matmul => "MatMul",
    max_pool => "MaxPool",
    mean => "Mean",
    one_hot => "OneHot",
    pad => "Pad",
    prelu => "PRelu",
    reduce_l1 => "ReduceL1",
    reduce_l2 => "ReduceL2",
    reduce_log_sum => "ReduceLogSum",
    reduce_log_sum_exp => "ReduceLogSumExp",
    reduce_max => "ReduceMax",
    reduce_mean => "ReduceMean",
    reduce_min => "ReduceMin",
    reduce_prod => "ReduceProd",
    reduce_sum => "ReduceSum",
    reduce_sum_square => "ReduceSumSquare",
    relu => "Relu",
    reshape => "Reshape",
    selu => "Selu",
    shape => "Shape",
    sigmoid => "Sigmoid",
    size => "Size",
    slice => "Slice",
    softmax => "Softmax",
    softplus => "Softplus",
    softsign => "Softsign",
    space_to_depth => "SpaceToDepth",
    split => "Split",
    sum => "Sum",
    swish => "Swish",
    thresholded_relu => "ThresholdedRelu",
    transpose => "Transpose",
}

#[test]
fn every_verified_operator_is_tested() {
    let mut verified: Vec<&str> = registry_list().iter().filter(|o| o.status == Status::Verified).map(|o| o.name).collect();
    let mut tested = TESTED.to_vec();
    verified.sort();
    tested.sort();
    assert_eq!(verified, tested);
}

#[test]
fn transcribed_set() {
    let mut t: Vec<&str> = registry_list().iter().filter(|o| o.status == Status::Transcribed).map(|o| o.name).collect();
    t.sort();
    assert_eq!(t, ["ConvTranspose", "Dropout", "Hardmax", "LpNormalization", "LpPool", "MaxUnpool", "Range"]);
}

#[test]
fn sources_parse_resolve_and_format_canonically() {
    for op in registry_list() {
        let p = parse(op.source).unwrap_or_else(|e| panic!("{}: {e}", op.name));
        tol::frontend::resolve(&p).unwrap();
        assert_eq!(tol::frontend::format_program(&p), op.source, "{}", op.name);
        assert!(op.source.starts_with(&format!("# {}\n", op.name)));
    }
}

#[test]
fn zero_cost_operators() {
    for name in [
        "Concat", "Reshape", "Flatten", "Transpose", "Pad", "Identity", "Shape", "Size", "Slice", "Gather", "Expand",
        "DepthToSpace", "SpaceToDepth", "EyeLike", "OneHot", "Split",
    ] {
        let op = lookup(name).unwrap();
        assert_eq!(op.eops_formula, "0");
        for inst in (op.instances)() {
            assert_eq!(run_stdlib(name, &inst.inputs, 0).unwrap().1.total, 0, "{name}");
        }
    }
}

#[test]
fn matmul_small() {
    let a = Value::from_i64(vec![2, 2], &[1, 2, 3, 4]).unwrap();
    let b = Value::from_i64(vec![2, 2], &[5, 6, 7, 8]).unwrap();
    let (out, rep) = run_stdlib("MatMul", &inputs(vec![("t1", a), ("t2", b)]), 0).unwrap();
    assert_eq!(out, Value::from_i64(vec![2, 2], &[19, 22, 43, 50]).unwrap());
    assert_eq!(rep.total, 16);
}

#[test]
fn relu_small() {
    let t = Value::from_i64(vec![3], &[-1, 2, -3]).unwrap();
    let (out, rep) = run_stdlib("Relu", &inputs(vec![("t", t)]), 0).unwrap();
    assert_eq!(out, Value::from_i64(vec![3], &[0, 2, 0]).unwrap());
    assert_eq!(rep.total, 3);
}

#[test]
fn average_pool_small() {
    let t = Value::from_i64(vec![4], &[1, 2, 3, 4]).unwrap();
    let int = |x| Value::scalar(tol::Numeric::Int(x));
    let (out, _) =
        run_stdlib("AveragePool", &inputs(vec![("t", t), ("k", int(2)), ("s", int(2)), ("p", int(0))]), 0).unwrap();
    assert!(compare(&out, &Nd::new(vec![2], vec![1.5, 3.5])).is_ok());
}

#[test]
fn unknown_operator() {
    assert!(matches!(run_stdlib("Nope", &BTreeMap::new(), 0), Err(tol::Error::UnknownOperator(_))));
}

#[test]
fn axis_argument_moves_the_reduced_axis() {
    let t = Value::from_i64(vec![2, 3], &[1, 2, 3, 4, 5, 6]).unwrap();
    let int = |x| Value::scalar(tol::Numeric::Int(x));
    let (cols, _) = run_stdlib("ReduceSum", &inputs(vec![("t", t.clone()), ("axis", int(1))]), 0).unwrap();
    assert!(compare(&cols, &Nd::new(vec![1, 3], vec![5.0, 7.0, 9.0])).is_ok());
    let (rows, _) = run_stdlib("ReduceSum", &inputs(vec![("t", t.clone()), ("axis", int(2))]), 0).unwrap();
    assert!(compare(&rows, &Nd::new(vec![2, 1], vec![6.0, 15.0])).is_ok());
    assert!(run_stdlib("ReduceSum", &inputs(vec![("t", t), ("axis", int(3))]), 0).is_err());
}

#[test]
fn golden_reference_pairs() {
    let table = golden_table(Some(&["MatMul", "BatchNormalization", "Softmax"])).unwrap();
    let mm = table.records.iter().find(|r| r.op == "MatMul" && r.shape.contains("t1=[8, 8]")).unwrap();
    assert_eq!((mm.eops, mm.eops_table, mm.flops_ref), (1024, 1024, Some(1024)));
    assert_eq!(mm.ratio.as_deref(), Some("1.0"));
    let bn = table.records.iter().find(|r| r.op == "BatchNormalization" && r.shape.contains("[4, 5, 5]")).unwrap();
    assert_eq!((bn.eops, bn.flops_ref), (300, Some(200)));
    assert_eq!(bn.ratio.as_deref(), Some("1.5"));
    let sm = lookup("Softmax").unwrap();
    let inst = tol::stdlib::Instance::new([("t", Value::from_f64(vec![10], &[0.0; 10]).unwrap())]);
    assert_eq!((sm.eops)(&inst), 22);
    assert!(sm.flops.is_none());
    assert!(table.records.iter().filter(|r| r.op == "Softmax").all(|r| r.flops_ref.is_none() && r.ratio.is_none()));
}

/// Runs the source on its prepared inputs and on the lowered tree, tensors symbolic and attributes folded.
fn lowering_agrees(name: &str) -> Result<(), String> {
    let op = lookup(name).unwrap();
    let inst = (op.instances)().remove(0);
    let env = source_inputs(name, &inst.inputs).map_err(|e| e.to_string())?;
    let mut shapes = InputShapes::new();
    let mut constants = HashMap::new();
    for (k, v) in &env {
        if op.tensors.contains(&k.as_str()) && k != "idx" {
            shapes.insert(k.clone(), (v.shape().to_vec(), v.type_list().clone()));
        } else {
            constants.insert(k.clone(), v.clone());
        }
    }
    let p = parse(op.source).unwrap();
    let (_, tree) = lower_program_with(&p, &shapes, &constants).map_err(|e| e.to_string())?;
    let direct = run_source(op.source, &env, &RunOptions::default()).map_err(|e| e.to_string())?;
    let want = direct.get("result").unwrap();
    let got = eval_atomic(&tree, &env).map_err(|e| e.to_string())?;
    compare(&got, &Nd::of(want))
}

#[test]
fn lowering_is_sound_for_verified_operators() {
    let bad: Vec<String> = TESTED.iter().filter_map(|n| lowering_agrees(n).err().map(|e| format!("{n}: {e}"))).collect();
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}
