//! Tree-walking evaluation of ToLang programs with elementary-operation accounting.
//!
//! Every application of a basic function to a value adds the value's volume to the
//! running count. Arithmetic on indices, shapes and type lists is structural and is
//! not counted.

mod report;
pub mod rng;

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

pub use report::{EopsReport, REPORT_SCHEMA_VERSION};

use crate::cell::Cell;
use crate::elementary::{self, instrument::StructuralGuard, Elementary};
use crate::error::{Error, Result, Span};
use crate::frontend::ast::*;
use crate::frontend::{builtin_arity, parse, resolve};
use crate::ops;
use crate::scalar::Numeric;
use crate::space::{SpaceId, TypeList, TypeSpace};
use crate::value::ToL;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: u64,
    /// Reuse results of definitions applied to equal arguments in an equal environment.
    pub memo: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0, memo: true }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput<C: Cell> {
    /// Output bindings in first-binding order.
    pub outputs: Vec<(String, ToL<C>)>,
    /// Name of the program result: `result` if bound, else the last output binding.
    pub result: Option<String>,
    pub report: EopsReport,
}

impl<C: Cell> RunOutput<C> {
    pub fn get(&self, name: &str) -> Option<&ToL<C>> {
        self.outputs.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn result_value(&self) -> Option<&ToL<C>> {
        self.result.as_deref().and_then(|n| self.get(n))
    }
}

/// Parses, resolves and runs `src`.
pub fn run_source<C: Cell>(src: &str, inputs: &HashMap<String, ToL<C>>, opts: &RunOptions) -> Result<RunOutput<C>> {
    let p = parse(src)?;
    resolve(&p)?;
    run(&p, inputs, opts)
}

/// Runs a resolved program.
pub fn run<C: Cell>(p: &Program, inputs: &HashMap<String, ToL<C>>, opts: &RunOptions) -> Result<RunOutput<C>> {
    let mut it = Interp::new(p, inputs, opts);
    it.program()
}

/// Value of one expression in an empty environment, with its cost.
pub fn eval_expr_source<C: Cell>(src: &str) -> Result<(ToL<C>, u64)> {
    let out = run_source::<C>(&format!("value__ := {src}"), &HashMap::new(), &RunOptions::default())?;
    let v = out.get("value__").cloned().expect("binding exists");
    Ok((v, out.report.total))
}

struct DefInfo<'p> {
    name: &'p str,
    params: Option<&'p [String]>,
    body: &'p Expr,
    names: Rc<Vec<&'p str>>,
}

struct Global<C: Cell> {
    def: Option<usize>,
    value: Option<(Rc<ToL<C>>, u64)>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum KeyPart<C: Cell> {
    Absent,
    Open,
    Val(ToL<C>),
    Global(Option<u64>, Option<(usize, Vec<KeyPart<C>>)>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct MemoKey<C: Cell> {
    def: usize,
    args: Vec<ToL<C>>,
    structural: bool,
    env: Vec<KeyPart<C>>,
}

#[derive(Clone, Copy)]
enum Func {
    Def(usize),
    Elem(Elementary),
}

struct Interp<'p, 'i, C: Cell> {
    program: &'p Program,
    inputs: &'i HashMap<String, ToL<C>>,
    defs: Vec<DefInfo<'p>>,
    globals: HashMap<String, Global<C>>,
    spaces: HashMap<String, TypeSpace>,
    lists: HashMap<String, TypeList>,
    frames: Vec<HashMap<&'p str, Rc<ToL<C>>>>,
    stars: Vec<(ToL<C>, Vec<usize>)>,
    positions: Vec<Vec<usize>>,
    active: Vec<usize>,
    memo: HashMap<MemoKey<C>, (ToL<C>, u64)>,
    use_memo: bool,
    seed: u64,
    structural: u32,
    cost: u64,
    cost_nomemo: u64,
    per_operator: std::collections::BTreeMap<String, u64>,
    ops: Vec<&'static str>,
    binding_id: u64,
    rand_used: bool,
    version: u64,
    lints: BTreeSet<String>,
}

fn int<C: Cell>(i: i64) -> ToL<C> {
    ToL::scalar(C::constant(Numeric::Int(i)))
}

fn body_names(body: &Expr) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    body.walk(&mut |e| match &e.kind {
        ExprKind::Name(n) | ExprKind::Call { name: n, prime: false, .. } => out.push(n),
        ExprKind::Chain { names, .. } => out.extend(names.iter().map(String::as_str)),
        _ => {}
    });
    out.sort_unstable();
    out.dedup();
    out
}

impl<'p, 'i, C: Cell> Interp<'p, 'i, C> {
    fn new(program: &'p Program, inputs: &'i HashMap<String, ToL<C>>, opts: &RunOptions) -> Self {
        let mut globals = HashMap::new();
        for (k, v) in inputs {
            globals.insert(k.clone(), Global { def: None, value: Some((Rc::new(v.clone()), 0)) });
        }
        Interp {
            program,
            inputs,
            defs: Vec::new(),
            globals,
            spaces: HashMap::new(),
            lists: HashMap::new(),
            frames: Vec::new(),
            stars: Vec::new(),
            positions: Vec::new(),
            active: Vec::new(),
            memo: HashMap::new(),
            use_memo: opts.memo,
            seed: opts.seed,
            structural: 0,
            cost: 0,
            cost_nomemo: 0,
            per_operator: Default::default(),
            ops: Vec::new(),
            binding_id: 0,
            rand_used: false,
            version: 0,
            lints: BTreeSet::new(),
        }
    }

    fn program(&mut self) -> Result<RunOutput<C>> {
        let mut outputs: Vec<(String, ToL<C>)> = Vec::new();
        let mut report = EopsReport::default();
        let mut last = None;
        for (i, s) in self.program.stmts.iter().enumerate() {
            self.binding_id = i as u64;
            let before = self.cost;
            let bound = self.stmt(s).map_err(|e| e.in_context(|| format!("in `{}`", s.kind.name())))?;
            if let Some(v) = bound {
                let name = s.kind.name().to_string();
                *report.per_binding.entry(name.clone()).or_insert(0) += self.cost - before;
                match outputs.iter_mut().find(|(n, _)| *n == name) {
                    Some(slot) => slot.1 = v,
                    None => outputs.push((name.clone(), v)),
                }
                last = Some(name);
            }
        }
        report.total = self.cost;
        report.per_operator = std::mem::take(&mut self.per_operator);
        report.notes.push(
            "traversal multiplier is vol(t) = product of the shape times the capacity, applied once".into(),
        );
        if self.use_memo && self.cost != self.cost_nomemo {
            report.notes.push(format!(
                "memoized total {}; without memoization {}",
                self.cost, self.cost_nomemo
            ));
        }
        report.notes.extend(std::mem::take(&mut self.lints));
        let result = if outputs.iter().any(|(n, _)| n == "result") { Some("result".to_string()) } else { last };
        Ok(RunOutput { outputs, result, report })
    }

    fn set_value(&mut self, name: &str, v: ToL<C>, keep_def: bool) {
        self.version += 1;
        let g = self.globals.entry(name.to_string()).or_insert(Global { def: None, value: None });
        if !keep_def {
            g.def = None;
        }
        g.value = Some((Rc::new(v), self.version));
    }

    fn stmt(&mut self, s: &'p Stmt) -> Result<Option<ToL<C>>> {
        match &s.kind {
            StmtKind::Space { name, space, bounds } => {
                let id: SpaceId = space.parse()?;
                let ts = match bounds {
                    None => TypeSpace::new(id),
                    Some((lo, hi)) => {
                        let lo = self.structural_f64(lo)?;
                        let hi = self.structural_f64(hi)?;
                        TypeSpace::bounded(id, lo, hi)?
                    }
                };
                self.spaces.insert(name.clone(), ts);
                Ok(None)
            }
            StmtKind::List { name, items } => {
                let tl = self.type_list(items)?;
                self.lists.insert(name.clone(), tl);
                Ok(None)
            }
            StmtKind::Tol { name, items, shape } => {
                let tl = self.type_list(items)?;
                let shape = match shape {
                    Some(xs) => Some(self.shape_of(xs)?),
                    None => None,
                };
                let v = match (self.inputs.get(name), shape) {
                    (Some(v), shape) => {
                        if let Some(sh) = shape {
                            if sh != v.shape() {
                                return Err(Error::ShapeMismatch(format!(
                                    "input `{name}` has shape {:?}, declared {sh:?}",
                                    v.shape()
                                )));
                            }
                        }
                        ops::op_convert(v, &tl)?
                    }
                    (None, Some(_)) => return Err(Error::MissingInput(name.clone())),
                    (None, None) => {
                        let zero = C::constant(Numeric::Int(0));
                        ToL::new(tl.clone(), vec![], vec![zero; tl.capacity()])?
                    }
                };
                self.set_value(name, v, false);
                Ok(None)
            }
            StmtKind::TolShape { name, shape } => {
                let sh = self.shape_of(shape)?;
                let v = match self.inputs.get(name) {
                    Some(v) if v.shape() == sh.as_slice() => v.clone(),
                    Some(v) => {
                        return Err(Error::ShapeMismatch(format!(
                            "input `{name}` has shape {:?}, declared {sh:?}",
                            v.shape()
                        )))
                    }
                    None => ToL::zeros(sh),
                };
                self.set_value(name, v, false);
                Ok(None)
            }
            StmtKind::Def { name, params, body, output } => {
                let id = self.defs.len();
                if params.is_some() || !output {
                    self.defs.push(DefInfo {
                        name,
                        params: params.as_deref(),
                        body,
                        names: Rc::new(body_names(body)),
                    });
                }
                match (params, output) {
                    (None, false) => {
                        let g = self.globals.entry(name.clone()).or_insert(Global { def: None, value: None });
                        g.def = Some(id);
                        g.value = None;
                        Ok(None)
                    }
                    (Some(_), false) => {
                        self.globals.entry(name.clone()).or_insert(Global { def: None, value: None }).def = Some(id);
                        Ok(None)
                    }
                    (None, true) => {
                        let v = self.eval(body)?;
                        self.set_value(name, v.clone(), false);
                        Ok(Some(v))
                    }
                    (Some(ps), true) => {
                        self.globals.entry(name.clone()).or_insert(Global { def: None, value: None }).def = Some(id);
                        if !ps.iter().all(|p| self.globals.contains_key(p)) {
                            return Ok(None);
                        }
                        let v = self.call_def(id, Vec::new())?;
                        self.set_value(name, v.clone(), true);
                        Ok(Some(v))
                    }
                }
            }
        }
    }

    fn type_list(&self, items: &[TypeItem]) -> Result<TypeList> {
        let mut spaces = Vec::new();
        for item in items {
            match item {
                TypeItem::Name(n) => spaces.extend(self.space_ref(n)?),
                TypeItem::Group(ns) => {
                    for n in ns {
                        spaces.extend(self.space_ref(n)?);
                    }
                }
            }
        }
        TypeList::new(spaces)
    }

    fn space_ref(&self, name: &str) -> Result<Vec<TypeSpace>> {
        if let Some(s) = self.spaces.get(name) {
            return Ok(vec![s.clone()]);
        }
        if let Some(l) = self.lists.get(name) {
            return Ok(l.spaces().to_vec());
        }
        let id: SpaceId = name.parse()?;
        Ok(vec![TypeSpace::new(id)])
    }

    // ---- accounting ----

    fn charge(&mut self, n: usize) {
        if self.structural > 0 {
            return;
        }
        let n = n as u64;
        self.cost += n;
        self.cost_nomemo += n;
        let op = self.ops.last().copied().unwrap_or("function");
        *self.per_operator.entry(op.to_string()).or_insert(0) += n;
    }

    fn structurally<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.structural += 1;
        let guard = StructuralGuard::enter();
        let r = f(self);
        drop(guard);
        self.structural -= 1;
        r
    }

    fn apply_elem(&mut self, f: Elementary, args: &[&ToL<C>], span: Span) -> Result<ToL<C>> {
        if f == Elementary::Rand {
            return self.rand(args[0], span);
        }
        let out = ops::broadcast_apply(f, args)?;
        self.charge(out.volume());
        Ok(out)
    }

    fn rand(&mut self, bound: &ToL<C>, span: Span) -> Result<ToL<C>> {
        self.rand_used = true;
        let mut pos: Vec<usize> = self.positions.iter().flatten().copied().collect();
        pos.push(span.line as usize);
        pos.push(span.col as usize);
        let data = bound
            .data()
            .iter()
            .enumerate()
            .map(|(i, x)| rng::seeded_rand(self.seed, self.binding_id, &pos, i as u64, x))
            .collect::<Result<Vec<_>>>()?;
        let out = ToL::from_cells(bound.shape().to_vec(), bound.capacity(), data)?;
        self.charge(out.volume());
        Ok(out)
    }

    // ---- names ----

    fn frame_value(&self, name: &str) -> Option<Rc<ToL<C>>> {
        self.frames.iter().rev().find_map(|f| f.get(name).cloned())
    }

    fn global_value(&self, name: &str) -> Option<Rc<ToL<C>>> {
        self.globals.get(name).and_then(|g| g.value.as_ref()).map(|(v, _)| v.clone())
    }

    fn global_def(&self, name: &str) -> Option<usize> {
        self.globals.get(name).and_then(|g| g.def)
    }

    fn lookup(&mut self, name: &str) -> Result<Rc<ToL<C>>> {
        if let Some(v) = self.frame_value(name) {
            return Ok(v);
        }
        if let Some(v) = self.global_value(name) {
            return Ok(v);
        }
        if let Some(id) = self.global_def(name) {
            return self.call_def(id, Vec::new()).map(Rc::new);
        }
        Err(Error::MissingInput(name.to_string()))
    }

    fn key_part(&self, name: &str, stack: &mut Vec<usize>) -> KeyPart<C> {
        if let Some(v) = self.frame_value(name) {
            return KeyPart::Val((*v).clone());
        }
        let Some(g) = self.globals.get(name) else { return KeyPart::Absent };
        let ver = g.value.as_ref().map(|(_, v)| *v);
        let def = g.def.map(|d| {
            if stack.contains(&d) {
                return (d, vec![KeyPart::Open]);
            }
            stack.push(d);
            let names = self.defs[d].names.clone();
            let parts = names.iter().map(|n| self.key_part(n, stack)).collect();
            stack.pop();
            (d, parts)
        });
        KeyPart::Global(ver, def)
    }

    fn memo_key(&self, id: usize, args: &[ToL<C>]) -> MemoKey<C> {
        let def = &self.defs[id];
        let bound = &def.params.unwrap_or(&[])[..args.len()];
        let mut stack = vec![id];
        let env = def
            .names
            .iter()
            .copied()
            .chain(def.params.unwrap_or(&[])[args.len()..].iter().map(String::as_str))
            .filter(|n| !bound.iter().any(|b| b == n))
            .map(|n| self.key_part(n, &mut stack))
            .collect();
        MemoKey { def: id, args: args.to_vec(), structural: self.structural > 0, env }
    }

    fn call_def(&mut self, id: usize, args: Vec<ToL<C>>) -> Result<ToL<C>> {
        self.call_def_memo(id, args, true)
    }

    /// Per-element applications by map and reduce pass `memo = false`: each is a
    /// separate application, as for elementary functions.
    fn call_def_memo(&mut self, id: usize, args: Vec<ToL<C>>, memo: bool) -> Result<ToL<C>> {
        let (name, params, body) = {
            let d = &self.defs[id];
            (d.name, d.params, d.body)
        };
        let np = params.map_or(0, <[String]>::len);
        if args.len() > np {
            return Err(Error::Arity(format!("`{name}` takes at most {np} arguments, got {}", args.len())));
        }
        if self.active.contains(&id) {
            return Err(Error::Cycle(name.to_string()));
        }
        let key = (self.use_memo && memo).then(|| self.memo_key(id, &args));
        if let Some(k) = &key {
            if let Some((v, c)) = self.memo.get(k) {
                self.cost_nomemo += c;
                return Ok(v.clone());
            }
        }
        let frame: HashMap<&'p str, Rc<ToL<C>>> =
            params.unwrap_or(&[]).iter().zip(args).map(|(p, a)| (p.as_str(), Rc::new(a))).collect();
        self.frames.push(frame);
        self.active.push(id);
        let outer_rand = std::mem::replace(&mut self.rand_used, false);
        let before = self.cost_nomemo;
        let r = self.eval(body);
        self.active.pop();
        self.frames.pop();
        let used_rand = self.rand_used;
        self.rand_used |= outer_rand;
        let v = r?;
        if let Some(k) = key {
            if !used_rand {
                self.memo.insert(k, (v.clone(), self.cost_nomemo - before));
            }
        }
        Ok(v)
    }

    // ---- expressions ----

    fn eval(&mut self, e: &'p Expr) -> Result<ToL<C>> {
        match &e.kind {
            ExprKind::Int(i) => Ok(int(*i)),
            ExprKind::Float(f) => Ok(ToL::scalar(C::constant(Numeric::Float(*f)))),
            ExprKind::Bool(b) => Ok(ToL::scalar(C::constant(Numeric::Bool(*b)))),
            ExprKind::Char(c) => Ok(ToL::scalar(C::constant(Numeric::Char(*c)))),
            ExprKind::Inf(neg) => {
                let x = if *neg { f64::NEG_INFINITY } else { f64::INFINITY };
                Ok(ToL::scalar(C::constant(Numeric::Float(x))))
            }
            ExprKind::Name(n) => Ok((*self.lookup(n)?).clone()),
            ExprKind::Star => match self.stars.last() {
                Some((elem, _)) => Ok(elem.clone()),
                None => Err(Error::StarOutsideIterator(e.span)),
            },
            ExprKind::Neg(x) => {
                let v = self.operand(x)?;
                self.apply_elem(Elementary::Sub, &[&int(0), &v], e.span)
            }
            ExprKind::Binary(op, a, b) => {
                let a = self.operand(a)?;
                let b = self.operand(b)?;
                let f = elementary::lookup(op.function())?;
                self.apply_elem(f, &[&a, &b], e.span)
            }
            ExprKind::Call { name, prime, args } => self.call(e, name, *prime, args),
            ExprKind::Chain { names, args } => {
                let mut v = self.call(e, &names[0], false, args)?;
                for n in &names[1..] {
                    v = self.call_values(e, n, vec![v])?;
                }
                Ok(v)
            }
            ExprKind::Index { target, index, slot } => {
                let t = self.eval_shared(target)?;
                if *slot {
                    let j = self.structural_index(&index[0])?;
                    return ops::op_part_slot(&t, j);
                }
                let comps = self.index_comps(index)?;
                self.select(&t, &comps)
            }
            ExprKind::Shape(x) => {
                let v = self.eval_shared(x)?;
                Ok(ToL::vector(C::shape_cells(&v)))
            }
            ExprKind::Dim(x) => {
                let v = self.eval_shared(x)?;
                Ok(ToL::scalar(ops::op_dim(&v)?))
            }
            ExprKind::Cap(x) => {
                let v = self.eval_shared(x)?;
                Ok(ToL::scalar(C::capacity_cell(&v)))
            }
            ExprKind::Tuple(xs) => {
                let mut acc = self.eval(&xs[0])?;
                for x in &xs[1..] {
                    let v = self.eval(x)?;
                    acc = acc.join_list(&v)?;
                }
                Ok(acc)
            }
            ExprKind::Bracket(xs) => {
                let vals = xs.iter().map(|x| self.eval(x)).collect::<Result<Vec<_>>>()?;
                bracket(vals)
            }
            ExprKind::ConstTol(xs) => {
                let sh = self.shape_of(xs)?;
                Ok(ToL::zeros(sh))
            }
        }
    }

    /// Evaluates without copying when the expression names a bound value.
    fn eval_shared(&mut self, e: &'p Expr) -> Result<Rc<ToL<C>>> {
        match &e.kind {
            ExprKind::Name(n) => self.lookup(n),
            _ => self.eval(e).map(Rc::new),
        }
    }

    /// An arithmetic operand; the shape of a 1-D value is used as its single extent.
    fn operand(&mut self, e: &'p Expr) -> Result<ToL<C>> {
        let v = self.eval(e)?;
        if matches!(e.kind, ExprKind::Shape(_)) && v.shape() == [1] {
            self.lints.insert(format!(
                "lint: shape of a 1-D value used as a scalar at {}; read as its first extent",
                e.span
            ));
            return v.with_shape(vec![]);
        }
        Ok(v)
    }

    fn call_values(&mut self, e: &'p Expr, name: &str, args: Vec<ToL<C>>) -> Result<ToL<C>> {
        if let Some(id) = self.global_def(name) {
            return self.call_def(id, args);
        }
        if let Ok(f) = elementary::lookup(name) {
            let refs: Vec<&ToL<C>> = args.iter().collect();
            return self.apply_elem(f, &refs, e.span);
        }
        match name {
            "tile" => ops::op_tile(&args[0]),
            "embed" => Ok(args[0].embed()),
            _ => Err(Error::UnboundName { name: name.to_string(), span: e.span }),
        }
    }

    fn call(&mut self, e: &'p Expr, name: &'p str, prime: bool, args: &'p [Expr]) -> Result<ToL<C>> {
        if prime {
            return match name {
                "part" => {
                    let t = self.eval_shared(&args[0])?;
                    let j = self.structural_index(&args[1])?;
                    ops::op_part_slot(&t, j)
                }
                _ => {
                    let mut acc = self.eval(&args[0])?;
                    for a in &args[1..] {
                        let v = self.eval(a)?;
                        acc = acc.join_list(&v)?;
                    }
                    Ok(acc)
                }
            };
        }
        if let Some(v) = self.frame_value(name) {
            let comps = self.index_comps(args)?;
            return self.select(&v, &comps);
        }
        if let Some(id) = self.global_def(name) {
            let vals = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>>>()?;
            return self.call_def(id, vals);
        }
        if let Some(v) = self.global_value(name) {
            let comps = self.index_comps(args)?;
            return self.select(&v, &comps);
        }
        if builtin_arity(name).is_some() {
            return self.builtin(e, name, args);
        }
        if elementary::lookup(name).is_ok() {
            let vals = args.iter().map(|a| self.operand(a)).collect::<Result<Vec<_>>>()?;
            return self.call_values(e, name, vals);
        }
        Err(Error::UnboundName { name: name.to_string(), span: e.span })
    }

    fn builtin(&mut self, e: &'p Expr, name: &str, args: &'p [Expr]) -> Result<ToL<C>> {
        match name {
            "shape" => {
                let v = self.eval_shared(&args[0])?;
                Ok(ToL::vector(C::shape_cells(&v)))
            }
            "dim" => {
                let v = self.eval_shared(&args[0])?;
                Ok(ToL::scalar(ops::op_dim(&v)?))
            }
            "capacity" => {
                let v = self.eval_shared(&args[0])?;
                Ok(ToL::scalar(C::capacity_cell(&v)))
            }
            "vol" => {
                let v = self.eval_shared(&args[0])?;
                Ok(ToL::scalar(ops::op_vol(&v)))
            }
            "space" => Err(Error::TypeListMismatch(format!(
                "space(..) is only meaningful as the target of convert at {}",
                e.span
            ))),
            "convert" => {
                let t = self.eval_shared(&args[0])?;
                let tl = match &args[1].kind {
                    ExprKind::Bracket(xs) if xs.iter().all(|x| matches!(x.kind, ExprKind::Name(_))) => {
                        let mut spaces = Vec::new();
                        for x in xs {
                            if let ExprKind::Name(n) = &x.kind {
                                spaces.extend(self.space_ref(n)?);
                            }
                        }
                        TypeList::new(spaces)?
                    }
                    ExprKind::Call { name, prime: false, args: inner } if name == "space" => {
                        let v = self.eval_shared(&inner[0])?;
                        ops::op_space(&v)
                    }
                    _ => {
                        return Err(Error::TypeListMismatch(format!(
                            "convert needs [space names] or space(x) at {}",
                            args[1].span
                        )))
                    }
                };
                ops::op_convert(&t, &tl)
            }
            "part" => {
                let t = self.eval_shared(&args[0])?;
                let a = self.index_comps(std::slice::from_ref(&args[1]))?;
                if args.len() == 2 {
                    return self.select(&t, &a);
                }
                let b = self.index_comps(std::slice::from_ref(&args[2]))?;
                let a = constant_indices(&a)?;
                let b = constant_indices(&b)?;
                ops::op_part_block(&t, &a, &b)
            }
            "swap" => {
                let t = self.eval_shared(&args[0])?;
                let d = self.structural_index(&args[1])?;
                let perm = self.structural_ints(&args[2])?;
                let perm = perm
                    .into_iter()
                    .map(|p| usize::try_from(p).map_err(|_| Error::NotAPermutation(format!("{p} in permutation"))))
                    .collect::<Result<Vec<_>>>()?;
                ops::op_swap(&t, d, &perm)
            }
            "reshape" => {
                let t = self.eval_shared(&args[0])?;
                let target = self.structural_ints(&args[1])?;
                ops::op_reshape(&t, &target)
            }
            "tile" => {
                let t = self.eval_shared(&args[0])?;
                ops::op_tile(&t)
            }
            "embed" => {
                let t = self.eval_shared(&args[0])?;
                Ok(t.embed())
            }
            "join" => {
                let mut acc = self.eval(&args[0])?;
                for a in &args[1..] {
                    let v = self.eval(a)?;
                    acc = acc.join_last(&v)?;
                }
                Ok(acc)
            }
            "map" => self.map(args),
            "reduce" => self.reduce(e, args, false),
            "reducei" => self.reduce(e, args, true),
            _ => Err(Error::UnboundName { name: name.to_string(), span: e.span }),
        }
    }

    /// The function named by a map/reduce argument, if it names one.
    fn function_arg(&self, f: &Expr, def_arities: &[usize], elem_arity: usize) -> Option<Func> {
        let ExprKind::Name(n) = &f.kind else { return None };
        if self.frame_value(n).is_some() {
            return None;
        }
        if let Some(id) = self.global_def(n) {
            if let Some(ps) = self.defs[id].params {
                if def_arities.contains(&ps.len()) {
                    return Some(Func::Def(id));
                }
            }
        }
        if self.global_value(n).is_some() {
            return None;
        }
        let ef = elementary::lookup(n).ok()?;
        let (lo, hi) = ef.arity();
        (lo <= elem_arity && elem_arity <= hi).then_some(Func::Elem(ef))
    }

    fn apply_func(&mut self, f: Func, args: Vec<ToL<C>>, span: Span) -> Result<ToL<C>> {
        match f {
            Func::Def(id) => {
                let np = self.defs[id].params.map_or(0, <[String]>::len);
                let args = args.into_iter().take(np).collect();
                self.call_def_memo(id, args, false)
            }
            Func::Elem(ef) => {
                let (_, hi) = ef.arity();
                let refs: Vec<&ToL<C>> = args.iter().take(hi).collect();
                self.apply_elem(ef, &refs, span)
            }
        }
    }

    fn map(&mut self, args: &'p [Expr]) -> Result<ToL<C>> {
        let t = self.eval_shared(&args[0])?;
        let func = self.function_arg(&args[1], &[1, 2], 1);
        let body = &args[1];
        let iters: Vec<&'p str> = match &args.get(2).map(|a| &a.kind) {
            Some(ExprKind::Name(n)) => vec![n.as_str()],
            Some(ExprKind::Bracket(xs)) => xs
                .iter()
                .filter_map(|x| match &x.kind {
                    ExprKind::Name(n) => Some(n.as_str()),
                    _ => None,
                })
                .collect(),
            Some(_) => return Err(Error::Arity(format!("map iterator at {}", args[2].span))),
            None => Vec::new(),
        };
        if iters.len() > t.dim() {
            return Err(Error::Arity(format!(
                "{} iterator names for a dimension-{} value at {}",
                iters.len(),
                t.dim(),
                args[0].span
            )));
        }
        self.ops.push("map");
        let r = ops::op_map(&t, |elem, c| {
            self.positions.push(c.to_vec());
            let r = match func {
                Some(f) => {
                    let coord = ToL::vector(c.iter().map(|&i| C::constant(Numeric::Int(i as i64))).collect());
                    self.apply_func(f, vec![elem, coord], body.span)
                }
                None => {
                    self.stars.push((elem, c.to_vec()));
                    let frame = iters.iter().zip(c).map(|(n, &i)| (*n, Rc::new(int(i as i64)))).collect();
                    self.frames.push(frame);
                    let r = self.eval(body);
                    self.frames.pop();
                    self.stars.pop();
                    r
                }
            };
            self.positions.pop();
            r.map_err(|e| e.in_context(|| format!("at {c:?}")))
        });
        self.ops.pop();
        r
    }

    fn reduce(&mut self, e: &'p Expr, args: &'p [Expr], indexed: bool) -> Result<ToL<C>> {
        let op = if indexed { "reducei" } else { "reduce" };
        let t = self.eval_shared(&args[0])?;
        let func = self
            .function_arg(&args[1], &[2, 3], 2)
            .ok_or_else(|| Error::Arity(format!("{op} needs the name of a binary function at {}", args[1].span)))?;
        let init = match args.get(2) {
            Some(x) => Some(self.eval(x)?),
            None => None,
        };
        let span = e.span;
        self.ops.push(op);
        let r = if indexed {
            let init = init.ok_or_else(|| Error::Arity(format!("reducei needs an initial value at {span}")))?;
            let mut i = 0usize;
            ops::op_reduce_indexed(&t, init, |elem, acc| {
                i += 1;
                self.positions.push(vec![i]);
                let r = self.apply_func(func, vec![elem, acc], span);
                self.positions.pop();
                r
            })
            .map(|(_, idx)| ToL::scalar(idx))
        } else {
            ops::op_reduce(&t, init, |elem, acc, c| {
                self.positions.push(c.to_vec());
                let coord = ToL::vector(c.iter().map(|&i| C::constant(Numeric::Int(i as i64))).collect());
                let r = self.apply_func(func, vec![elem, acc, coord], span);
                self.positions.pop();
                r.map_err(|e| e.in_context(|| format!("at {c:?}")))
            })
        };
        self.ops.pop();
        r
    }

    // ---- structural helpers ----

    fn index_comps(&mut self, idx: &'p [Expr]) -> Result<Vec<C>> {
        self.structurally(|me| {
            let mut out = Vec::new();
            for x in idx {
                if let ExprKind::Star = x.kind {
                    let (_, c) = me.stars.last().ok_or(Error::StarOutsideIterator(x.span))?;
                    out.extend(c.iter().map(|&i| C::constant(Numeric::Int(i as i64))));
                    continue;
                }
                let v = me.eval(x)?;
                if v.capacity() != 1 || v.dim() > 1 {
                    return Err(Error::Index(format!(
                        "index at {} must be a number or a vector of numbers, got shape {:?} capacity {}",
                        x.span,
                        v.shape(),
                        v.capacity()
                    )));
                }
                out.extend(v.into_data());
            }
            Ok(out)
        })
    }

    fn select(&mut self, t: &ToL<C>, comps: &[C]) -> Result<ToL<C>> {
        let Some(pos) = comps.iter().position(|c| c.to_constant().is_none()) else {
            let idx = constant_indices(comps)?;
            return ops::op_part(t, &idx);
        };
        let prefix = constant_indices(&comps[..pos])?;
        let t = ops::op_part(t, &prefix)?;
        let d = *t.shape().first().ok_or_else(|| Error::Index("too many indices".into()))?;
        if d == 0 {
            return Err(Error::Index("index into an empty dimension".into()));
        }
        let options = (1..=d)
            .map(|k| {
                let sub = ops::op_part(&t, &[k])?;
                self.select(&sub, &comps[pos + 1..])
            })
            .collect::<Result<Vec<_>>>()?;
        let first = &options[0];
        let data = (0..first.data().len())
            .map(|i| {
                let cells: Vec<C> = options.iter().map(|o| o.data()[i].clone()).collect();
                C::mux(&comps[pos], &cells)
            })
            .collect::<Result<Vec<_>>>()?;
        ToL::new(first.type_list().clone(), first.shape().to_vec(), data)
    }

    fn structural_ints(&mut self, e: &'p Expr) -> Result<Vec<i64>> {
        let v = self.structurally(|me| me.eval(e))?;
        v.data().iter().map(constant_int).collect()
    }

    fn structural_index(&mut self, e: &'p Expr) -> Result<usize> {
        let xs = self.structural_ints(e)?;
        match xs.as_slice() {
            [k] if *k >= 1 => Ok(*k as usize),
            _ => Err(Error::Index(format!("expected one positive index at {}, got {xs:?}", e.span))),
        }
    }

    fn structural_f64(&mut self, e: &'p Expr) -> Result<f64> {
        let v = self.structurally(|me| me.eval(e))?;
        match v.data() {
            [c] => c
                .to_constant()
                .and_then(|n| n.as_f64())
                .ok_or_else(|| Error::UnsupportedLowering(format!("bound at {} is not a constant", e.span))),
            _ => Err(Error::ShapeMismatch(format!("bound at {} is not a single number", e.span))),
        }
    }

    fn shape_of(&mut self, xs: &'p [Expr]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for x in xs {
            for k in self.structural_ints(x)? {
                out.push(usize::try_from(k).map_err(|_| Error::DegenerateShape(format!("negative extent {k}")))?);
            }
        }
        Ok(out)
    }
}

fn constant_int<C: Cell>(c: &C) -> Result<i64> {
    let n = c
        .to_constant()
        .ok_or_else(|| Error::UnsupportedLowering(format!("`{c}` must be known before the inputs")))?;
    n.as_exact_i64().ok_or_else(|| Error::Index(format!("{n} is not an integer")))
}

fn constant_indices<C: Cell>(cs: &[C]) -> Result<Vec<usize>> {
    cs.iter()
        .map(|c| {
            let k = constant_int(c)?;
            usize::try_from(k).ok().filter(|&k| k >= 1).ok_or_else(|| Error::Index(format!("index {k} is not positive")))
        })
        .collect()
}

/// `[x1, ..., xn]`: equal shapes stack on a new leading dimension, otherwise the
/// elements concatenate along the leading dimension. Empty elements are skipped and
/// force concatenation.
fn bracket<C: Cell>(vals: Vec<ToL<C>>) -> Result<ToL<C>> {
    let n = vals.len();
    let vals: Vec<ToL<C>> = vals.into_iter().filter(|v| !v.is_empty()).collect();
    let skipped = vals.len() != n;
    let Some(first) = vals.first() else { return Ok(ToL::zeros(vec![0])) };
    let join_tl = |vals: &[ToL<C>]| {
        vals[1..].iter().fold(vals[0].type_list().clone(), |acc, v| {
            acc.join(v.type_list()).unwrap_or(acc)
        })
    };
    let same = !skipped && vals.iter().all(|v| v.shape() == first.shape() && v.capacity() == first.capacity());
    if same {
        let mut shape = vec![vals.len()];
        shape.extend_from_slice(first.shape());
        let tl = join_tl(&vals);
        let data = vals.into_iter().flat_map(ToL::into_data).collect();
        return ToL::new(tl, shape, data);
    }
    let r = vals.iter().map(ToL::dim).max().unwrap_or(0);
    if r == 0 {
        return Err(Error::ShapeMismatch("bracket elements differ in capacity".into()));
    }
    let mut lead = 0;
    let mut trailing: Option<&[usize]> = None;
    for v in &vals {
        let (n, rest) = if v.dim() == r { (v.shape()[0], &v.shape()[1..]) } else if v.dim() + 1 == r { (1, v.shape()) } else {
            return Err(Error::ShapeMismatch(format!("cannot concatenate shape {:?} with dimension {r}", v.shape())));
        };
        if v.capacity() != first.capacity() || trailing.is_some_and(|t| t != rest) {
            return Err(Error::ShapeMismatch(format!(
                "bracket elements disagree on trailing shape: {:?}",
                vals.iter().map(|v| v.shape().to_vec()).collect::<Vec<_>>()
            )));
        }
        trailing = Some(rest);
        lead += n;
    }
    let mut shape = vec![lead];
    shape.extend_from_slice(trailing.unwrap_or(&[]));
    let tl = join_tl(&vals);
    let data = vals.into_iter().flat_map(ToL::into_data).collect();
    ToL::new(tl, shape, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Value;

    fn inputs(xs: &[(&str, Value)]) -> HashMap<String, Value> {
        xs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn reduce_counts_every_element() {
        let (v, cost) = eval_expr_source::<Numeric>("reduce([1,2,3,4,5],add,0)").unwrap();
        assert_eq!(v, Value::scalar(Numeric::Int(15)));
        assert_eq!(cost, 5);
    }

    #[test]
    fn affine_costs_two() {
        let src = "f(x)=a*x+b\ny := f(x)";
        let inp = inputs(&[
            ("a", Value::scalar(Numeric::Int(2))),
            ("b", Value::scalar(Numeric::Int(3))),
            ("x", Value::scalar(Numeric::Int(5))),
        ]);
        let out = run_source(src, &inp, &RunOptions::default()).unwrap();
        assert_eq!(out.get("y").unwrap(), &Value::scalar(Numeric::Int(13)));
        assert_eq!(out.report.total, 2);
    }

    #[test]
    fn structural_work_is_free() {
        let (_, c) = eval_expr_source::<Numeric>("reshape([1,2,3,4,5,6],[2,3])").unwrap();
        assert_eq!(c, 0);
        let (v, c) = eval_expr_source::<Numeric>("[10,20,30][1+1]").unwrap();
        assert_eq!((v, c), (Value::scalar(Numeric::Int(20)), 0));
    }

    #[test]
    fn fold_without_init_and_sub_order() {
        let (v, c) = eval_expr_source::<Numeric>("reduce([1,2,3],sub,0)").unwrap();
        assert_eq!((v, c), (Value::scalar(Numeric::Int(2)), 3));
        let (v, c) = eval_expr_source::<Numeric>("reduce([4,1,3],max)").unwrap();
        assert_eq!((v, c), (Value::scalar(Numeric::Int(4)), 2));
    }

    #[test]
    fn reducei_finds_last_improvement() {
        let (v, _) = eval_expr_source::<Numeric>("reducei([3,9,2,9],max,-Inf)").unwrap();
        assert_eq!(v, Value::scalar(Numeric::Int(2)));
    }

    #[test]
    fn brackets_stack_or_concatenate() {
        let (v, _) = eval_expr_source::<Numeric>("[[1,2],[3,4]]").unwrap();
        assert_eq!(v.shape(), &[2, 2]);
        let (v, _) = eval_expr_source::<Numeric>("[[1,2],[3,4,5]]").unwrap();
        assert_eq!(v.shape(), &[5]);
        let (v, _) = eval_expr_source::<Numeric>("[tol[0], [1,2]]").unwrap();
        assert_eq!(v.shape(), &[2]);
    }

    #[test]
    fn memo_changes_cost_not_values() {
        let src = "tol x=[4]\nm = reduce(x,add,0)\ny := map(x, *-m)";
        let inp = inputs(&[("x", Value::from_i64(vec![4], &[1, 2, 3, 4]).unwrap())]);
        let on = run_source(src, &inp, &RunOptions::default()).unwrap();
        let off = run_source(src, &inp, &RunOptions { memo: false, ..Default::default() }).unwrap();
        assert_eq!(on.get("y"), off.get("y"));
        assert_eq!(on.report.total, 4 + 4);
        assert_eq!(off.report.total, 4 + 4 * 4);
        assert!(on.report.notes.iter().any(|n| n.contains("without memoization 20")));
    }

    #[test]
    fn cycles_are_reported() {
        let r = run_source::<Numeric>("a = b+1\nb = a+1\ny := a", &HashMap::new(), &RunOptions::default());
        assert!(matches!(r, Err(Error::Cycle(_))));
    }

    #[test]
    fn rand_is_reproducible() {
        let src = "tol t=[3]\ny := map(t, rand(10))";
        let a = run_source::<Numeric>(src, &HashMap::new(), &RunOptions::default()).unwrap();
        let b = run_source::<Numeric>(src, &HashMap::new(), &RunOptions { memo: false, seed: 0 }).unwrap();
        assert_eq!(a.get("y"), b.get("y"));
        let c = run_source::<Numeric>(src, &HashMap::new(), &RunOptions { memo: true, seed: 9 }).unwrap();
        assert_ne!(a.get("y"), c.get("y"));
    }

    #[test]
    fn missing_inputs_and_shapes() {
        let r = run_source::<Numeric>("tol x: R [2]\ny := x", &HashMap::new(), &RunOptions::default());
        assert!(matches!(r, Err(Error::MissingInput(n)) if n == "x"));
        let inp = inputs(&[("x", Value::from_i64(vec![3], &[1, 2, 3]).unwrap())]);
        let r = run_source("tol x: R [2]\ny := x", &inp, &RunOptions::default());
        assert!(matches!(r, Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn chains_apply_left_to_right() {
        let src = "inc(x)=x+1\ndbl(x)=x*2\ny := inc.dbl(3)";
        let out = run_source::<Numeric>(src, &HashMap::new(), &RunOptions::default()).unwrap();
        assert_eq!(out.get("y").unwrap(), &Value::scalar(Numeric::Int(8)));
    }
}
