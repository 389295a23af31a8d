use super::{Formula, Instance, Layout, Status, StdlibOp};
use crate::eval::rng::unit;
use crate::scalar::Numeric;
use crate::value::count_of;
use crate::Value;

use Layout::{Front, Plain, Rows};
use Status::{Transcribed, Verified};

macro_rules! src {
    ($n:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/stdlib/v1/onnx/", $n, ".tol"))
    };
}

/// Deterministic test data: multiples of 1/8 in `[-2, 2]`, or in `(0, 2]` when `positive`.
pub(crate) fn data(shape: &[usize], salt: u64, positive: bool) -> Value {
    let xs: Vec<f64> = (0..count_of(shape) as u64)
        .map(|i| {
            let u = unit(0x70_1A_57D1, salt, shape, i);
            if positive {
                ((u * 16.0).floor() + 1.0) / 8.0
            } else {
                ((u * 33.0).floor() - 16.0) / 8.0
            }
        })
        .collect();
    Value::from_f64(shape.to_vec(), &xs).expect("shape matches")
}

fn ints(xs: &[i64]) -> Value {
    Value::from_i64(vec![xs.len()], xs).expect("vector")
}

fn int(x: i64) -> Value {
    Value::scalar(Numeric::Int(x))
}

fn flt(x: f64) -> Value {
    Value::scalar(Numeric::Float(x))
}

#[allow(clippy::too_many_arguments)]
fn op(
    name: &'static str,
    status: Status,
    tensors: &'static [&'static str],
    attrs: &'static [&'static str],
    layout: Layout,
    source: &'static str,
    eops_formula: &'static str,
    eops: Formula,
    flops: Option<(&'static str, Formula)>,
    instances: fn() -> Vec<Instance>,
) -> StdlibOp {
    StdlibOp {
        name,
        status,
        tensors,
        attrs,
        layout,
        source,
        eops_formula,
        flops_formula: flops.map(|f| f.0),
        eops,
        flops: flops.map(|f| f.1),
        instances,
    }
}

fn vol_t(i: &Instance) -> u64 {
    i.vol("t")
}

fn zero(_: &Instance) -> u64 {
    0
}

fn pool_len(i: &Instance, n: usize, k: i64) -> u64 {
    let (s, p) = (i.int("s"), i.int("p"));
    ((n as i64 + 2 * p - k) / s + 1) as u64
}

fn pool_cost(i: &Instance) -> u64 {
    pool_len(i, i.shape("t")[0], i.int("k")) * i.int("k") as u64
}

fn conv_cost(i: &Instance) -> u64 {
    let (t, w) = (i.shape("t"), i.shape("w"));
    let windows: u64 = t.iter().zip(w).map(|(&n, &k)| pool_len(i, n, k as i64)).product();
    windows * 2 * i.vol("w")
}

fn matmul_cost(i: &Instance) -> u64 {
    2 * i.vol("t1") * i.shape("t2")[1] as u64
}

fn lp_pool_cost(i: &Instance) -> u64 {
    let (n, k, s, p) = (i.shape("t")[0] as i64, i.int("k"), i.int("s"), i.int("p"));
    (((n + 2 * p - k) / s + 2) * 2 * k + 1) as u64
}

fn sum_cost(i: &Instance) -> u64 {
    let ts = i.shape("ts");
    (ts[0] * ts[1]) as u64
}

fn unary(attrs: &[(&'static str, Value)], positive: bool) -> Vec<Instance> {
    [vec![5], vec![2, 3], vec![2, 2, 3]]
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut v = vec![("t", data(s, k as u64, positive))];
            v.extend(attrs.iter().cloned());
            Instance::new(v)
        })
        .collect()
}

fn rows(positive: bool) -> Vec<Instance> {
    [(vec![4], 1), (vec![2, 3], 2), (vec![2, 3, 4], 2), (vec![3, 2], 1)]
        .iter()
        .enumerate()
        .map(|(k, (s, a))| Instance::new([("t", data(s, 10 + k as u64, positive)), ("axis", int(*a))]))
        .collect()
}

fn pools() -> Vec<Instance> {
    [(vec![4], 2, 2, 0), (vec![7], 3, 2, 1), (vec![8], 3, 1, 0), (vec![6], 2, 1, 1)]
        .iter()
        .enumerate()
        .map(|(n, (s, k, st, p))| {
            Instance::new([("t", data(s, 20 + n as u64, false)), ("k", int(*k)), ("s", int(*st)), ("p", int(*p))])
        })
        .collect()
}

fn matmuls() -> Vec<Instance> {
    [([2, 2], [2, 2]), ([2, 3], [3, 4]), ([8, 8], [8, 8]), ([1, 5], [5, 2])]
        .iter()
        .enumerate()
        .map(|(n, (a, b))| Instance::new([("t1", data(a, 30 + n as u64, false)), ("t2", data(b, 40 + n as u64, false))]))
        .collect()
}

fn plain_shapes() -> Vec<Instance> {
    [vec![3], vec![2, 3], vec![2, 3, 4]]
        .iter()
        .enumerate()
        .map(|(k, s)| Instance::new([("t", data(s, 50 + k as u64, false))]))
        .collect()
}

pub(super) fn all() -> Vec<StdlibOp> {
    vec![
        op("ArgMax", Verified, &["t"], &[], Rows, src!("ArgMax"), "vol(t)", vol_t, Some(("vol(t)", vol_t)), || rows(false)),
        op("ArgMin", Verified, &["t"], &[], Rows, src!("ArgMin"), "vol(t)", vol_t, Some(("vol(t)", vol_t)), || rows(false)),
        op(
            "AveragePool",
            Verified,
            &["t"],
            &["k", "s", "p"],
            Plain,
            src!("AveragePool"),
            "((|t|[1]+2*p-k)/s+1)*k",
            pool_cost,
            Some(("((|t|[1]+2*p-k)/s+1)*k", pool_cost)),
            pools,
        ),
        op(
            "BatchNormalization",
            Verified,
            &["t"],
            &["mean", "var"],
            Plain,
            src!("BatchNormalization"),
            "3*vol(t)",
            |i| 3 * i.vol("t"),
            Some(("2*vol(t)", |i| 2 * i.vol("t"))),
            || {
                [vec![8], vec![2, 5], vec![4, 5, 5]]
                    .iter()
                    .enumerate()
                    .map(|(k, s)| Instance::new([("t", data(s, 60 + k as u64, false)), ("mean", flt(0.25)), ("var", flt(2.0))]))
                    .collect()
            },
        ),
        op("Celu", Verified, &["t"], &["alpha"], Plain, src!("Celu"), "6*vol(t)", |i| 6 * i.vol("t"), None, || {
            let mut v = unary(&[("alpha", flt(0.5))], false);
            v.extend(unary(&[("alpha", flt(2.0))], false).into_iter().take(1));
            v
        }),
        op(
            "Clip",
            Verified,
            &["t"],
            &["mi", "ma"],
            Plain,
            src!("Clip"),
            "2*vol(t)",
            |i| 2 * i.vol("t"),
            Some(("2*vol(t)", |i| 2 * i.vol("t"))),
            || unary(&[("mi", flt(-0.5)), ("ma", flt(1.0))], false),
        ),
        op("Concat", Verified, &["t1", "t2"], &[], Front, src!("Concat"), "0", zero, Some(("0", zero)), || {
            vec![
                Instance::new([("t1", data(&[2, 3], 70, false)), ("t2", data(&[1, 3], 71, false)), ("axis", int(1))]),
                Instance::new([("t1", data(&[2, 2], 72, false)), ("t2", data(&[2, 3], 73, false)), ("axis", int(2))]),
                Instance::new([("t1", data(&[3], 74, false)), ("t2", data(&[2], 75, false)), ("axis", int(1))]),
                Instance::new([("t1", data(&[2, 1, 2], 76, false)), ("t2", data(&[2, 2, 2], 77, false)), ("axis", int(2))]),
            ]
        }),
        op(
            "Conv",
            Verified,
            &["t", "w"],
            &["s", "p"],
            Plain,
            src!("Conv"),
            "prod_a((|t|[a]+2*p-|w|[a])/s+1)*2*vol(w)",
            conv_cost,
            Some(("prod_a((|t|[a]+2*p-|w|[a])/s+1)*2*vol(w)", conv_cost)),
            || {
                [([4, 4], [2, 2], 1, 0), ([5, 5], [3, 3], 2, 1), ([6, 4], [2, 3], 1, 1)]
                    .iter()
                    .enumerate()
                    .map(|(n, (t, w, s, p))| {
                        Instance::new([
                            ("t", data(t, 80 + n as u64, false)),
                            ("w", data(w, 90 + n as u64, false)),
                            ("s", int(*s)),
                            ("p", int(*p)),
                        ])
                    })
                    .collect()
            },
        ),
        op(
            "ConvTranspose",
            Transcribed,
            &["t", "w"],
            &["s", "p"],
            Plain,
            src!("ConvTranspose"),
            "((|t|[1]+2*p-|w|[1])/s+1)*2*|w|[1]",
            |i| pool_len(i, i.shape("t")[0], i.shape("w")[0] as i64) * 2 * i.vol("w"),
            Some(("((|t|[1]+2*p-|w|[1])/s+1)*2*|w|[1]", |i| pool_len(i, i.shape("t")[0], i.shape("w")[0] as i64) * 2 * i.vol("w"))),
            || {
                [(3, 2, 2, 0), (4, 3, 1, 1), (2, 2, 3, 0)]
                    .iter()
                    .enumerate()
                    .map(|(n, (t, w, s, p))| {
                        Instance::new([
                            ("t", data(&[*t], 100 + n as u64, false)),
                            ("w", data(&[*w], 110 + n as u64, false)),
                            ("s", int(*s)),
                            ("p", int(*p)),
                        ])
                    })
                    .collect()
            },
        ),
        op("CumSum", Verified, &["t"], &[], Rows, src!("CumSum"), "vol(t)", vol_t, Some(("vol(t)", vol_t)), || rows(false)),
        op("DepthToSpace", Verified, &["t"], &["b"], Plain, src!("DepthToSpace"), "0", zero, Some(("0", zero)), || {
            vec![
                Instance::new([("t", data(&[4, 2, 2], 120, false)), ("b", int(2))]),
                Instance::new([("t", data(&[8, 1, 2], 121, false)), ("b", int(2))]),
                Instance::new([("t", data(&[4, 1, 3], 122, false)), ("b", int(2))]),
            ]
        }),
        op("Dropout", Transcribed, &["t"], &["ratio"], Plain, src!("Dropout"), "vol(t)", vol_t, Some(("vol(t)", vol_t)), || {
            unary(&[("ratio", flt(0.5))], false)
        }),
        op("Elu", Verified, &["t"], &["alpha"], Plain, src!("Elu"), "5*vol(t)", |i| 5 * i.vol("t"), None, || {
            let mut v = unary(&[("alpha", flt(1.0))], false);
            v.extend(unary(&[("alpha", flt(0.25))], false).into_iter().take(1));
            v
        }),
        op("Expand", Verified, &["t"], &["m"], Plain, src!("Expand"), "0", zero, Some(("0", zero)), || {
            vec![
                Instance::new([("t", data(&[3], 130, false)), ("m", int(2))]),
                Instance::new([("t", data(&[2, 2], 131, false)), ("m", int(3))]),
                Instance::new([("t", data(&[4], 132, false)), ("m", int(1))]),
            ]
        }),
        op("EyeLike", Verified, &["t"], &[], Plain, src!("EyeLike"), "0", zero, Some(("0", zero)), || {
            [1, 3, 5].iter().map(|&k| Instance::new([("t", data(&[k, k], 140, false))])).collect()
        }),
        op("Flatten", Verified, &["t"], &[], Plain, src!("Flatten"), "0", zero, Some(("0", zero)), plain_shapes),
        op("Gather", Verified, &["t", "idx"], &[], Front, src!("Gather"), "0", zero, Some(("0", zero)), || {
            vec![
                Instance::new([("t", data(&[5, 2], 150, false)), ("idx", ints(&[2, 5, 2])), ("axis", int(1))]),
                Instance::new([("t", data(&[3, 4], 151, false)), ("idx", ints(&[4, 1])), ("axis", int(2))]),
                Instance::new([("t", data(&[6], 152, false)), ("idx", ints(&[6, 5, 1, 3])), ("axis", int(1))]),
            ]
        }),
        op(
            "Gemm",
            Verified,
            &["t1", "t2"],
            &[],
            Plain,
            src!("Gemm"),
            "2*vol(t1)*|t2|[2]",
            matmul_cost,
            Some(("2*vol(t1)*|t2|[2]", matmul_cost)),
            matmuls,
        ),
        op("Hardmax", Transcribed, &["t"], &[], Rows, src!("Hardmax"), "1", |_| 1, None, || rows(false)),
        op(
            "HardSigmoid",
            Verified,
            &["t"],
            &["alpha", "beta"],
            Plain,
            src!("HardSigmoid"),
            "4*vol(t)",
            |i| 4 * i.vol("t"),
            None,
            || unary(&[("alpha", flt(0.2)), ("beta", flt(0.5))], false),
        ),
        op("HardSwish", Verified, &["t"], &[], Plain, src!("HardSwish"), "5*vol(t)", |i| 5 * i.vol("t"), None, || {
            let mut v = unary(&[], false);
            v.push(Instance::new([("t", Value::from_f64(vec![6], &[-4.0, -3.0, -1.5, 0.0, 3.0, 4.0]).expect("vector"))]));
            v
        }),
        op("Identity", Verified, &["t"], &[], Plain, src!("Identity"), "0", zero, Some(("0", zero)), plain_shapes),
        op("LeakyRelu", Verified, &["t"], &["alpha"], Plain, src!("LeakyRelu"), "2*vol(t)", |i| 2 * i.vol("t"), None, || {
            unary(&[("alpha", flt(0.125))], false)
        }),
        op("LogSoftmax", Verified, &["t"], &[], Rows, src!("LogSoftmax"), "2*vol(t)+3", |i| 2 * i.vol("t") + 3, None, || {
            rows(false)
        }),
        op(
            "LpNormalization",
            Transcribed,
            &["t"],
            &["p"],
            Rows,
            src!("LpNormalization"),
            "3*vol(t)",
            |i| 3 * i.vol("t"),
            Some(("3*vol(t)", |i| 3 * i.vol("t"))),
            || rows(true).into_iter().take(3).map(|mut i| { i.inputs.insert("p".into(), int(2)); i }).collect(),
        ),
        op(
            "LpPool",
            Transcribed,
            &["t"],
            &["k", "s", "p", "q"],
            Plain,
            src!("LpPool"),
            "((|t|[1]+2*p-k)/s+2)*2*k+1",
            lp_pool_cost,
            None,
            || pools().into_iter().take(3).map(|mut i| { i.inputs.insert("q".into(), int(2)); i }).collect(),
        ),
        op(
            "MatMul",
            Verified,
            &["t1", "t2"],
            &[],
            Plain,
            src!("MatMul"),
            "2*vol(t1)*|t2|[2]",
            matmul_cost,
            Some(("2*vol(t1)*|t2|[2]", matmul_cost)),
            matmuls,
        ),
        op(
            "MaxPool",
            Verified,
            &["t"],
            &["k", "s", "p"],
            Plain,
            src!("MaxPool"),
            "((|t|[1]+2*p-k)/s+1)*k",
            pool_cost,
            Some(("((|t|[1]+2*p-k)/s+1)*k", pool_cost)),
            pools,
        ),
        op(
            "MaxUnpool",
            Transcribed,
            &["t", "idx"],
            &["n"],
            Plain,
            src!("MaxUnpool"),
            "((|t|[1]+2*p-k)/s+1)*k",
            |i| pool_len(i, i.int("n") as usize, i.int("k")) * i.int("k") as u64,
            Some(("((|t|[1]+2*p-k)/s+1)*k", |i| pool_len(i, i.int("n") as usize, i.int("k")) * i.int("k") as u64)),
            || {
                [(vec![2], vec![2, 3], 4), (vec![3], vec![1, 4, 6], 6), (vec![1], vec![2], 2)]
                    .iter()
                    .enumerate()
                    .map(|(k, (t, idx, n))| {
                        Instance::new([
                            ("t", data(t, 160 + k as u64, false)),
                            ("idx", ints(idx)),
                            ("n", int(*n)),
                            ("k", int(2)),
                            ("s", int(2)),
                            ("p", int(0)),
                        ])
                    })
                    .collect()
            },
        ),
        op("Mean", Verified, &["t"], &[], Plain, src!("Mean"), "vol(t)", vol_t, Some(("vol(t)", vol_t)), || unary(&[], false)),
        op("OneHot", Verified, &["idx"], &["d"], Plain, src!("OneHot"), "0", zero, None, || {
            vec![
                Instance::new([("idx", ints(&[1, 3, 4])), ("d", int(4))]),
                Instance::new([("idx", ints(&[2])), ("d", int(2))]),
                Instance::new([("idx", ints(&[5, 1, 5, 2, 3])), ("d", int(5))]),
            ]
        }),
        op("Pad", Verified, &["t"], &["p"], Plain, src!("Pad"), "0", zero, Some(("0", zero)), || {
            vec![
                Instance::new([("t", data(&[2, 3], 170, false)), ("p", int(1))]),
                Instance::new([("t", data(&[3, 3], 171, false)), ("p", int(2))]),
                Instance::new([("t", data(&[2, 2], 172, false)), ("p", int(0))]),
            ]
        }),
        op("PRelu", Verified, &["t"], &["slope"], Plain, src!("PRelu"), "2*vol(t)", |i| 2 * i.vol("t"), None, || {
            unary(&[("slope", flt(0.25))], false)
        }),
        op(
            "Range",
            Transcribed,
            &[],
            &["start", "limit", "delta"],
            Plain,
            src!("Range"),
            "vol(t)",
            |i| ((i.int("limit") - i.int("start")) / i.int("delta")) as u64,
            Some(("vol(t)", |i| ((i.int("limit") - i.int("start")) / i.int("delta")) as u64)),
            || {
                [(1, 7, 2), (0, 5, 1), (3, 15, 4)]
                    .iter()
                    .map(|&(a, b, d)| Instance::new([("start", int(a)), ("limit", int(b)), ("delta", int(d))]))
                    .collect()
            },
        ),
        op("ReduceL1", Verified, &["t"], &[], Rows, src!("ReduceL1"), "2*vol(t)", |i| 2 * i.vol("t"), Some(("2*vol(t)", |i| 2 * i.vol("t"))), || {
            rows(false)
        }),
        op("ReduceL2", Verified, &["t"], &[], Rows, src!("ReduceL2"), "2*vol(t)", |i| 2 * i.vol("t"), Some(("2*vol(t)", |i| 2 * i.vol("t"))), || {
            rows(false)
        }),
        op(
            "ReduceLogSum",
            Verified,
            &["t"],
            &[],
            Rows,
            src!("ReduceLogSum"),
            "2*vol(t)",
            |i| 2 * i.vol("t"),
            Some(("2*vol(t)", |i| 2 * i.vol("t"))),
            || rows(true),
        ),
        op(
            "ReduceLogSumExp",
            Verified,
            &["t"],
            &[],
            Rows,
            src!("ReduceLogSumExp"),
            "3*vol(t)",
            |i| 3 * i.vol("t"),
            Some(("3*vol(t)", |i| 3 * i.vol("t"))),
            || rows(false),
        ),
        op("ReduceMax", Verified, &["t"], &[], Rows, src!("ReduceMax"), "vol(t)", vol_t, Some(("vol(t)", vol_t)), || rows(false)),
        op("ReduceMean", Verified, &["t"], &[], Rows, src!("ReduceMean"), "vol(t)", vol_t, Some(("vol(t)", vol_t)), || rows(false)),
        op("ReduceMin", Verified, &["t"], &[], Rows, src!("ReduceMin"), "vol(t)", vol_t, Some(("vol(t)", vol_t)), || rows(false)),
        op("ReduceProd", Verified, &["t"], &[], Rows, src!("ReduceProd"), "vol(t)", vol_t, Some(("vol(t)", vol_t)), || rows(false)),
        op("ReduceSum", Verified, &["t"], &[], Rows, src!("ReduceSum"), "vol(t)", vol_t, Some(("vol(t)", vol_t)), || rows(false)),
        op(
            "ReduceSumSquare",
            Verified,
            &["t"],
            &[],
            Rows,
            src!("ReduceSumSquare"),
            "2*vol(t)",
            |i| 2 * i.vol("t"),
            Some(("2*vol(t)", |i| 2 * i.vol("t"))),
            || rows(false),
        ),
        op("Relu", Verified, &["t"], &[], Plain, src!("Relu"), "vol(t)", vol_t, None, || unary(&[], false)),
        op("Reshape", Verified, &["t"], &["sha"], Plain, src!("Reshape"), "0", zero, Some(("0", zero)), || {
            vec![
                Instance::new([("t", data(&[2, 3], 180, false)), ("sha", ints(&[3, 2]))]),
                Instance::new([("t", data(&[2, 3, 4], 181, false)), ("sha", ints(&[4, -1]))]),
                Instance::new([("t", data(&[6], 182, false)), ("sha", ints(&[2, 3]))]),
            ]
        }),
        op("Selu", Verified, &["t"], &["alpha", "gamma"], Plain, src!("Selu"), "6*vol(t)", |i| 6 * i.vol("t"), None, || {
            unary(&[("alpha", flt(1.625)), ("gamma", flt(1.0625))], false)
        }),
        op("Shape", Verified, &["t"], &[], Plain, src!("Shape"), "0", zero, Some(("0", zero)), plain_shapes),
        op("Sigmoid", Verified, &["t"], &[], Plain, src!("Sigmoid"), "4*vol(t)", |i| 4 * i.vol("t"), None, || unary(&[], false)),
        op("Size", Verified, &["t"], &[], Plain, src!("Size"), "0", zero, Some(("0", zero)), plain_shapes),
        op("Slice", Verified, &["t"], &["start", "stop", "step"], Front, src!("Slice"), "0", zero, Some(("0", zero)), || {
            vec![
                Instance::new([("t", data(&[8], 190, false)), ("start", int(2)), ("stop", int(8)), ("step", int(2)), ("axis", int(1))]),
                Instance::new([("t", data(&[5, 3], 191, false)), ("start", int(1)), ("stop", int(5)), ("step", int(1)), ("axis", int(1))]),
                Instance::new([("t", data(&[4, 6], 192, false)), ("start", int(2)), ("stop", int(7)), ("step", int(3)), ("axis", int(2))]),
            ]
        }),
        op("Softmax", Verified, &["t"], &[], Rows, src!("Softmax"), "2*vol(t)+2", |i| 2 * i.vol("t") + 2, None, || rows(false)),
        op("Softplus", Verified, &["t"], &[], Plain, src!("Softplus"), "3*vol(t)", |i| 3 * i.vol("t"), None, || unary(&[], false)),
        op("Softsign", Verified, &["t"], &[], Plain, src!("Softsign"), "3*vol(t)", |i| 3 * i.vol("t"), None, || unary(&[], false)),
        op("SpaceToDepth", Verified, &["t"], &["b"], Plain, src!("SpaceToDepth"), "0", zero, Some(("0", zero)), || {
            vec![
                Instance::new([("t", data(&[1, 4, 4], 200, false)), ("b", int(2))]),
                Instance::new([("t", data(&[2, 2, 4], 201, false)), ("b", int(2))]),
                Instance::new([("t", data(&[1, 3, 3], 202, false)), ("b", int(3))]),
            ]
        }),
        op("Split", Verified, &["t"], &["parts"], Front, src!("Split"), "0", zero, Some(("0", zero)), || {
            vec![
                Instance::new([("t", data(&[4, 3], 210, false)), ("parts", int(2)), ("axis", int(1))]),
                Instance::new([("t", data(&[6], 211, false)), ("parts", int(3)), ("axis", int(1))]),
                Instance::new([("t", data(&[2, 6], 212, false)), ("parts", int(3)), ("axis", int(2))]),
            ]
        }),
        op("Sum", Verified, &["ts"], &[], Plain, src!("Sum"), "vol(t)*n", sum_cost, Some(("vol(t)*n", sum_cost)), || {
            [[2, 5], [3, 4], [4, 6]]
                .iter()
                .enumerate()
                .map(|(k, s)| Instance::new([("ts", data(s, 220 + k as u64, false))]))
                .collect()
        }),
        op("Swish", Verified, &["t"], &[], Plain, src!("Swish"), "5*vol(t)", |i| 5 * i.vol("t"), None, || unary(&[], false)),
        op(
            "ThresholdedRelu",
            Verified,
            &["t"],
            &["th"],
            Plain,
            src!("ThresholdedRelu"),
            "2*vol(t)",
            |i| 2 * i.vol("t"),
            None,
            || unary(&[("th", flt(0.5))], false),
        ),
        op("Transpose", Verified, &["t"], &[], Plain, src!("Transpose"), "0", zero, Some(("0", zero)), || {
            [[2, 3], [4, 4], [1, 5]]
                .iter()
                .enumerate()
                .map(|(k, s)| Instance::new([("t", data(s, 230 + k as u64, false))]))
                .collect()
        }),
    ]
}
