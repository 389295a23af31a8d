//! Random ToLang programs over map, reduce, part, reshape and joins with literals.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tol::ops::lower::InputShapes;
use tol::{run_source, Numeric, RunOptions, SpaceId, TypeList, Value};

pub struct Generated {
    pub source: String,
    pub inputs: HashMap<String, Value>,
    pub shapes: InputShapes,
    /// Every numeric is an integer, so results must agree exactly.
    pub integer: bool,
}

/// Applied to a tensor argument, so repeated calls can hit the memo.
const PRELUDE: &str = "g(u)=map(u,mul(*,2))\n";

struct Gen {
    rng: ChaCha8Rng,
    integer: bool,
    inputs: HashMap<String, Value>,
    stmts: Vec<String>,
    names: Vec<String>,
}

fn nested(shape: &[usize], next: &mut impl FnMut() -> String) -> String {
    match shape.split_first() {
        None => next(),
        Some((&d, rest)) => format!("[{}]", (0..d).map(|_| nested(rest, next)).collect::<Vec<_>>().join(",")),
    }
}

impl Gen {
    fn number(&mut self) -> String {
        if self.integer {
            self.rng.gen_range(0..=5).to_string()
        } else {
            format!("{:?}", self.rng.gen_range(0..=12) as f64 / 4.0)
        }
    }

    fn literal(&mut self, shape: &[usize]) -> String {
        nested(shape, &mut || self.number())
    }

    fn random_shape(&mut self, max_rank: usize) -> Vec<usize> {
        let r = self.rng.gen_range(1..=max_rank);
        (0..r).map(|_| self.rng.gen_range(1..=3)).collect()
    }

    fn shape_of(&self, expr: &str) -> Option<Vec<usize>> {
        let mut src = format!("{PRELUDE}{}", self.stmts.concat());
        src += &format!("probe:={expr}\n");
        let out = run_source(&src, &self.inputs, &RunOptions::default()).ok()?;
        let v = out.get("probe")?;
        (v.capacity() == 1 && v.dim() <= 3 && v.shape().iter().all(|&d| d <= 3)).then(|| v.shape().to_vec())
    }

    fn leaf(&mut self) -> String {
        match self.rng.gen_range(0..4) {
            0 => {
                let s = self.random_shape(3);
                self.literal(&s)
            }
            1 if !self.names.is_empty() => self.names[self.rng.gen_range(0..self.names.len())].clone(),
            _ => "x".to_string(),
        }
    }

    fn factorization(&mut self, vol: usize) -> Vec<usize> {
        let mut dims = Vec::new();
        let mut rest = vol;
        while dims.len() < 2 && rest > 1 {
            let divs: Vec<usize> = (1..=rest).filter(|d| rest % d == 0 && *d <= 3).collect();
            let d = divs[self.rng.gen_range(0..divs.len())];
            dims.push(d);
            rest /= d;
        }
        dims.push(rest);
        dims
    }

    fn expr(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.leaf();
        }
        let sub = self.expr(depth - 1);
        let Some(shape) = self.shape_of(&sub) else { return self.leaf() };
        if shape.is_empty() {
            return sub;
        }
        let n = shape.len();
        match self.rng.gen_range(0..7) {
            0 | 1 => {
                let f = ["add", "mul", "max", "min", "sub"][self.rng.gen_range(0..5)];
                let k = self.number();
                format!("map({sub},{f}(*,{k}))")
            }
            2 => {
                let (f, init) = [("add", "0"), ("max", "0"), ("min", "9"), ("mul", "1")][self.rng.gen_range(0..4)];
                format!("reduce({sub},{f},{init})")
            }
            3 => {
                let m = self.rng.gen_range(1..=n);
                let (mut a, mut b) = (Vec::new(), Vec::new());
                for &d in &shape[..m] {
                    let (x, y) = (self.rng.gen_range(1..=d), self.rng.gen_range(1..=d));
                    a.push(x.min(y).to_string());
                    b.push(x.max(y).to_string());
                }
                if self.rng.gen_bool(0.3) {
                    format!("part({sub},[{}])", a.join(","))
                } else {
                    format!("part({sub},[{}],[{}])", a.join(","), b.join(","))
                }
            }
            4 => {
                let vol: usize = shape.iter().product();
                let dims = self.factorization(vol);
                let mut text: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
                if self.rng.gen_bool(0.3) {
                    let i = self.rng.gen_range(0..text.len());
                    text[i] = "-1".into();
                }
                format!("reshape({sub},[{}])", text.join(","))
            }
            5 => {
                let mut lit_shape = shape[..n - 1].to_vec();
                lit_shape.push(self.rng.gen_range(1..=2));
                let lit = self.literal(&lit_shape);
                if self.rng.gen_bool(0.5) {
                    format!("join({sub},{lit})")
                } else {
                    format!("join({lit},{sub})")
                }
            }
            _ => format!("g({sub})"),
        }
    }
}

pub fn program(seed: u64) -> Generated {
    for attempt in 0.. {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt * 0x9E37_79B9));
        let integer = rng.gen_bool(0.5);
        let mut g = Gen { rng, integer, inputs: HashMap::new(), stmts: Vec::new(), names: Vec::new() };
        let xs = g.random_shape(3);
        let n: usize = xs.iter().product();
        let (x, space) = if integer {
            let data: Vec<i64> = (0..n).map(|_| g.rng.gen_range(-4..=4)).collect();
            (Value::from_i64(xs.clone(), &data).unwrap(), SpaceId::Z)
        } else {
            let data: Vec<f64> = (0..n).map(|_| g.rng.gen_range(-16..=16) as f64 / 4.0).collect();
            (Value::from_f64(xs.clone(), &data).unwrap(), SpaceId::R)
        };
        let x = x.with_type_list(TypeList::single(space)).unwrap();
        g.inputs.insert("x".into(), x);
        let count = g.rng.gen_range(0..=2);
        for i in 0..count {
            let e = g.expr(2);
            let name = format!("v{i}");
            let op = if g.rng.gen_bool(0.5) { ":=" } else { "=" };
            g.stmts.push(format!("{name}{op}{e}\n"));
            g.names.push(name);
        }
        let e = g.expr(3);
        g.stmts.push(format!("result:={e}\n"));
        let source = format!("{PRELUDE}{}", g.stmts.concat());
        if run_source(&source, &g.inputs, &RunOptions::default()).is_err() {
            continue;
        }
        let mut shapes = InputShapes::new();
        shapes.insert("x".into(), (xs, TypeList::single(space)));
        return Generated { source, inputs: g.inputs, shapes, integer };
    }
    unreachable!()
}

pub fn bits(v: &Value) -> Vec<(u8, u64)> {
    v.data()
        .iter()
        .map(|c| match *c {
            Numeric::Bool(b) => (0, b as u64),
            Numeric::Int(i) => (1, i as u64),
            Numeric::Float(f) => (2, f.to_bits()),
            Numeric::Char(c) => (3, c as u64),
        })
        .collect()
}
