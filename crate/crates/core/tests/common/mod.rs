//! Brute-force reference implementations of the ONNX operators, written
//! directly from the operator definitions on flat `f64` arrays.
#![allow(dead_code)]

use std::collections::BTreeMap;

use tol::Value;

pub const ABS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Nd {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Nd {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Nd {
        assert_eq!(shape.iter().product::<usize>(), data.len());
        Nd { shape, data }
    }

    pub fn of(v: &Value) -> Nd {
        Nd::new(v.shape().to_vec(), v.to_f64())
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.shape.len()];
        for i in (0..self.shape.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.shape[i + 1];
        }
        s
    }

    /// 0-based coordinate to flat offset.
    pub fn at(&self, c: &[usize]) -> f64 {
        let off: usize = c.iter().zip(self.strides()).map(|(a, s)| a * s).sum();
        self.data[off]
    }

    pub fn coords(shape: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for &d in shape {
            out = out.into_iter().flat_map(|c| (0..d).map(move |i| [c.clone(), vec![i]].concat())).collect();
        }
        out
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Nd {
        Nd::new(self.shape.clone(), self.data.iter().map(|&x| f(x)).collect())
    }

    pub fn build(shape: Vec<usize>, f: impl Fn(&[usize]) -> f64) -> Nd {
        let data = Nd::coords(&shape).iter().map(|c| f(c)).collect();
        Nd::new(shape, data)
    }

    /// Every line along `axis`, as (coordinate with axis index 0, values).
    fn lanes(&self, axis: usize) -> Vec<(Vec<usize>, Vec<f64>)> {
        let mut outer = self.shape.clone();
        outer[axis] = 1;
        Nd::coords(&outer)
            .into_iter()
            .map(|c| {
                let vals = (0..self.shape[axis])
                    .map(|i| {
                        let mut k = c.clone();
                        k[axis] = i;
                        self.at(&k)
                    })
                    .collect();
                (c, vals)
            })
            .collect()
    }

    /// Reduction along `axis`, keeping it with extent 1.
    pub fn reduce_axis(&self, axis: usize, f: impl Fn(&[f64]) -> f64) -> Nd {
        let mut shape = self.shape.clone();
        shape[axis] = 1;
        Nd::new(shape, self.lanes(axis).iter().map(|(_, v)| f(v)).collect())
    }

    /// Lane-wise transform along `axis` with an unchanged shape.
    pub fn along_axis(&self, axis: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Nd {
        let mut out = vec![0.0; self.data.len()];
        let st = self.strides();
        for (c, vals) in self.lanes(axis) {
            let base: usize = c.iter().zip(&st).map(|(a, s)| a * s).sum();
            for (i, y) in f(&vals).into_iter().enumerate() {
                out[base + i * st[axis]] = y;
            }
        }
        Nd::new(self.shape.clone(), out)
    }
}

pub fn close(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= ABS_TOL
}

/// `Ok` when shapes agree and every entry is within the tolerance.
pub fn compare(got: &Value, want: &Nd) -> Result<(), String> {
    let g = Nd::of(got);
    if g.shape != want.shape {
        return Err(format!("shape {:?}, expected {:?}", g.shape, want.shape));
    }
    for (i, (x, y)) in g.data.iter().zip(&want.data).enumerate() {
        if !close(*x, *y) {
            return Err(format!("entry {i}: {x} vs {y}"));
        }
    }
    Ok(())
}

struct Args<'a>(&'a BTreeMap<String, Value>);

impl Args<'_> {
    fn t(&self, n: &str) -> Nd {
        Nd::of(&self.0[n])
    }
    fn f(&self, n: &str) -> f64 {
        self.0[n].to_f64()[0]
    }
    fn u(&self, n: &str) -> usize {
        self.f(n) as usize
    }
    fn i(&self, n: &str) -> i64 {
        self.f(n) as i64
    }
    fn axis(&self, rank: usize) -> usize {
        self.0.get("axis").map_or(rank - 1, |v| v.to_f64()[0] as usize - 1)
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn first_arg(v: &[f64], better: impl Fn(f64, f64) -> bool) -> f64 {
    let mut best = 0;
    for i in 1..v.len() {
        if better(v[i], v[best]) {
            best = i;
        }
    }
    (best + 1) as f64
}

fn softmax(v: &[f64]) -> Vec<f64> {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = v.iter().map(|x| (x - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|x| x / s).collect()
}

fn pool(a: &Args, init: f64, fold: impl Fn(f64, f64) -> f64, finish: impl Fn(f64) -> f64) -> Nd {
    let t = a.t("t");
    let (k, s, p) = (a.u("k"), a.u("s"), a.u("p"));
    let n = t.shape[0];
    let out = (n + 2 * p - k) / s + 1;
    Nd::build(vec![out], |c| {
        let mut acc = init;
        for j in 0..k {
            let pos = c[0] * s + j;
            let x = if pos >= p && pos - p < n { t.data[pos - p] } else { init };
            acc = fold(acc, x);
        }
        finish(acc)
    })
}

/// Reference output of a verified operator; `None` for names without an oracle.
pub fn oracle(op: &str, inputs: &BTreeMap<String, Value>) -> Option<Nd> {
    let a = Args(inputs);
    let unary = |f: &dyn Fn(f64) -> f64| a.t("t").map(f);
    let axis_reduce = |f: &dyn Fn(&[f64]) -> f64| {
        let t = a.t("t");
        let ax = a.axis(t.shape.len());
        t.reduce_axis(ax, f)
    };
    let axis_map = |f: &dyn Fn(&[f64]) -> Vec<f64>| {
        let t = a.t("t");
        let ax = a.axis(t.shape.len());
        t.along_axis(ax, f)
    };
    Some(match op {
        "Relu" => unary(&|x| x.max(0.0)),
        "LeakyRelu" => {
            let al = a.f("alpha");
            unary(&|x| if x >= 0.0 { x } else { al * x })
        }
        "PRelu" => {
            let sl = a.f("slope");
            unary(&|x| if x >= 0.0 { x } else { sl * x })
        }
        "Sigmoid" => unary(&sigmoid),
        "Swish" => unary(&|x| x * sigmoid(x)),
        "Softplus" => unary(&|x| (1.0 + x.exp()).ln()),
        "Softsign" => unary(&|x| x / (1.0 + x.abs())),
        "BatchNormalization" => {
            let (m, v) = (a.f("mean"), a.f("var"));
            unary(&|x| (x - m) / v.sqrt())
        }
        "Celu" => {
            let al = a.f("alpha");
            unary(&|x| x.max(0.0) + (al * ((x / al).exp() - 1.0)).min(0.0))
        }
        "Elu" => {
            let al = a.f("alpha");
            unary(&|x| if x > 0.0 { x } else { al * (x.exp() - 1.0) })
        }
        "Selu" => {
            let (al, g) = (a.f("alpha"), a.f("gamma"));
            unary(&|x| g * if x > 0.0 { x } else { al * (x.exp() - 1.0) })
        }
        "Clip" => {
            let (lo, hi) = (a.f("mi"), a.f("ma"));
            unary(&|x| x.max(lo).min(hi))
        }
        "ThresholdedRelu" => {
            let th = a.f("th");
            unary(&|x| if x > th { x } else { 0.0 })
        }
        "HardSigmoid" => {
            let (al, be) = (a.f("alpha"), a.f("beta"));
            unary(&|x| (al * x + be).clamp(0.0, 1.0))
        }
        "HardSwish" => unary(&|x| x * ((x + 3.0) / 6.0).clamp(0.0, 1.0)),
        "ArgMax" => axis_reduce(&|v| first_arg(v, |x, y| x > y)),
        "ArgMin" => axis_reduce(&|v| first_arg(v, |x, y| x < y)),
        "ReduceSum" => axis_reduce(&|v| v.iter().sum()),
        "ReduceMax" => axis_reduce(&|v| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
        "ReduceMin" => axis_reduce(&|v| v.iter().cloned().fold(f64::INFINITY, f64::min)),
        "ReduceProd" => axis_reduce(&|v| v.iter().product()),
        "ReduceMean" => axis_reduce(&|v| v.iter().sum::<f64>() / v.len() as f64),
        "ReduceL1" => axis_reduce(&|v| v.iter().map(|x| x.abs()).sum()),
        "ReduceL2" => axis_reduce(&|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()),
        "ReduceSumSquare" => axis_reduce(&|v| v.iter().map(|x| x * x).sum()),
        "ReduceLogSum" => axis_reduce(&|v| v.iter().sum::<f64>().ln()),
        "ReduceLogSumExp" => axis_reduce(&|v| v.iter().map(|x| x.exp()).sum::<f64>().ln()),
        "CumSum" => axis_map(&|v| {
            v.iter()
                .scan(0.0, |acc, x| {
                    *acc += x;
                    Some(*acc)
                })
                .collect()
        }),
        "Softmax" => axis_map(&softmax),
        "LogSoftmax" => axis_map(&|v| softmax(v).iter().map(|x| x.ln()).collect()),
        "MatMul" | "Gemm" => {
            let (x, y) = (a.t("t1"), a.t("t2"));
            let (n, m, q) = (x.shape[0], x.shape[1], y.shape[1]);
            Nd::build(vec![n, q], |c| (0..m).map(|k| x.at(&[c[0], k]) * y.at(&[k, c[1]])).sum())
        }
        "Conv" => {
            let (x, w) = (a.t("t"), a.t("w"));
            let (s, p) = (a.u("s"), a.u("p"));
            let (h, wd, kh, kw) = (x.shape[0], x.shape[1], w.shape[0], w.shape[1]);
            let get = |r: usize, c: usize| {
                if r < p || c < p || r - p >= h || c - p >= wd {
                    0.0
                } else {
                    x.at(&[r - p, c - p])
                }
            };
            Nd::build(vec![(h + 2 * p - kh) / s + 1, (wd + 2 * p - kw) / s + 1], |c| {
                let mut acc = 0.0;
                for i in 0..kh {
                    for j in 0..kw {
                        acc += get(c[0] * s + i, c[1] * s + j) * w.at(&[i, j]);
                    }
                }
                acc
            })
        }
        "AveragePool" => {
            let k = a.f("k");
            pool(&a, 0.0, |x, y| x + y, |s| s / k)
        }
        "MaxPool" => pool(&a, f64::NEG_INFINITY, f64::max, |m| m),
        "Mean" => {
            let t = a.t("t");
            Nd::new(vec![], vec![t.data.iter().sum::<f64>() / t.data.len() as f64])
        }
        "Sum" => {
            let ts = a.t("ts");
            Nd::build(vec![ts.shape[1]], |c| (0..ts.shape[0]).map(|i| ts.at(&[i, c[0]])).sum())
        }
        "Identity" => a.t("t"),
        "Shape" => {
            let t = a.t("t");
            Nd::new(vec![t.shape.len()], t.shape.iter().map(|&d| d as f64).collect())
        }
        "Size" => Nd::new(vec![], vec![a.t("t").data.len() as f64]),
        "Reshape" => {
            let t = a.t("t");
            let mut sha: Vec<i64> = inputs["sha"].to_f64().iter().map(|&x| x as i64).collect();
            let known: i64 = sha.iter().filter(|&&d| d > 0).product();
            for d in sha.iter_mut() {
                if *d == -1 {
                    *d = t.data.len() as i64 / known;
                }
            }
            Nd::new(sha.iter().map(|&d| d as usize).collect(), t.data)
        }
        "Flatten" => {
            let t = a.t("t");
            let d0 = t.shape[0];
            Nd::new(vec![d0, t.data.len() / d0], t.data)
        }
        "Transpose" => {
            let t = a.t("t");
            Nd::build(vec![t.shape[1], t.shape[0]], |c| t.at(&[c[1], c[0]]))
        }
        "Expand" => {
            let t = a.t("t");
            let m = a.u("m");
            Nd::build([vec![m], t.shape.clone()].concat(), |c| t.at(&c[1..]))
        }
        "EyeLike" => {
            let k = a.t("t").shape[0];
            Nd::build(vec![k, k], |c| if c[0] == c[1] { 1.0 } else { 0.0 })
        }
        "OneHot" => {
            let idx = a.t("idx");
            let d = a.u("d");
            Nd::build(vec![idx.data.len(), d], |c| if idx.data[c[0]] as usize == c[1] + 1 { 1.0 } else { 0.0 })
        }
        "Pad" => {
            let t = a.t("t");
            let p = a.u("p");
            let (h, w) = (t.shape[0], t.shape[1]);
            Nd::build(vec![h + 2 * p, w + 2 * p], |c| {
                if c[0] < p || c[1] < p || c[0] - p >= h || c[1] - p >= w {
                    0.0
                } else {
                    t.at(&[c[0] - p, c[1] - p])
                }
            })
        }
        "Gather" => {
            let t = a.t("t");
            let idx = a.t("idx");
            let ax = a.axis(t.shape.len());
            let mut shape = t.shape.clone();
            shape[ax] = idx.data.len();
            Nd::build(shape, |c| {
                let mut k = c.to_vec();
                k[ax] = idx.data[c[ax]] as usize - 1;
                t.at(&k)
            })
        }
        "Slice" => {
            let t = a.t("t");
            let ax = a.axis(t.shape.len());
            let (start, stop, step) = (a.i("start"), a.i("stop"), a.i("step"));
            let picks: Vec<usize> = (0..).map(|j| start + j * step).take_while(|&x| x < stop).map(|x| x as usize - 1).collect();
            let mut shape = t.shape.clone();
            shape[ax] = picks.len();
            Nd::build(shape, |c| {
                let mut k = c.to_vec();
                k[ax] = picks[c[ax]];
                t.at(&k)
            })
        }
        "Concat" => {
            let (x, y) = (a.t("t1"), a.t("t2"));
            let ax = a.axis(x.shape.len());
            let mut shape = x.shape.clone();
            shape[ax] += y.shape[ax];
            Nd::build(shape, |c| {
                let mut k = c.to_vec();
                if c[ax] < x.shape[ax] {
                    x.at(&k)
                } else {
                    k[ax] -= x.shape[ax];
                    y.at(&k)
                }
            })
        }
        "Split" => {
            let t = a.t("t");
            let ax = a.axis(t.shape.len());
            let parts = a.u("parts");
            let chunk = t.shape[ax] / parts;
            let mut shape = t.shape.clone();
            shape[ax] = chunk;
            Nd::build([vec![parts], shape].concat(), |c| {
                let mut k = c[1..].to_vec();
                k[ax] += c[0] * chunk;
                t.at(&k)
            })
        }
        "DepthToSpace" => {
            let t = a.t("t");
            let b = a.u("b");
            let cout = t.shape[0] / (b * b);
            Nd::build(vec![cout, t.shape[1] * b, t.shape[2] * b], |c| {
                let (bh, bw) = (c[1] % b, c[2] % b);
                t.at(&[(bh * b + bw) * cout + c[0], c[1] / b, c[2] / b])
            })
        }
        "SpaceToDepth" => {
            let t = a.t("t");
            let b = a.u("b");
            let cin = t.shape[0];
            Nd::build(vec![cin * b * b, t.shape[1] / b, t.shape[2] / b], |c| {
                let (q, ch) = (c[0] / cin, c[0] % cin);
                t.at(&[ch, c[1] * b + q / b, c[2] * b + q % b])
            })
        }
        _ => return None,
    })
}

/// Min-plus product of a square matrix with itself.
pub fn min_plus(e: &Nd) -> Nd {
    let n = e.shape[0];
    Nd::build(vec![n, n], |c| (0..n).map(|k| e.at(&[c[0], k]) + e.at(&[k, c[1]])).fold(f64::INFINITY, f64::min))
}

/// 3x3 same-size convolution with zero padding 1.
pub fn conv_same(x: &Nd, k: &Nd) -> Nd {
    let (h, w) = (x.shape[0] as i64, x.shape[1] as i64);
    Nd::build(x.shape.clone(), |c| {
        let mut acc = 0.0;
        for i in 0..3i64 {
            for j in 0..3i64 {
                let (r, q) = (c[0] as i64 + i - 1, c[1] as i64 + j - 1);
                if r >= 0 && q >= 0 && r < h && q < w {
                    acc += x.at(&[r as usize, q as usize]) * k.at(&[i as usize, j as usize]);
                }
            }
        }
        acc
    })
}

pub fn batch_norm(x: &Nd, eps: f64) -> Nd {
    let n = x.data.len() as f64;
    let mean = x.data.iter().sum::<f64>() / n;
    let var = x.data.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    x.map(|v| (v - mean) / (var + eps).sqrt())
}

/// conv, bn, relu, conv, bn, residual add, relu.
pub fn resnet_block(x: &Nd, k1: &Nd, k2: &Nd) -> Nd {
    let relu = |t: &Nd| t.map(|v| v.max(0.0));
    let y = batch_norm(&conv_same(&relu(&batch_norm(&conv_same(x, k1), 1e-5)), k2), 1e-5);
    Nd::new(x.shape.clone(), y.data.iter().zip(&x.data).map(|(a, b)| (a + b).max(0.0)).collect())
}
pub mod programs;
