//! Lowering to the five atomic computations.
//!
//! Programs are executed over symbolic cells ([`Sym`]); each result cell is then
//! an expression over input members, and the result value is rebuilt from its
//! cells with member, join and embed.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::cell::Cell;
use crate::elementary::Elementary;
use crate::error::{Error, Result};
use crate::scalar::Numeric;
use crate::space::{SpaceId, TypeList, TypeSpace};
use crate::value::{Coords, ToL};

/// A symbolic cell: a lambda tree over input members and constants.
#[derive(Clone)]
pub struct Sym(Arc<SymNode>);

struct SymNode {
    kind: SymKind,
    hash: u64,
}

#[derive(Clone, Debug, PartialEq, Hash)]
pub enum SymKind {
    Const(Numeric),
    /// Slot `slot` of the list at `coord` of input `name`.
    Input { name: Arc<str>, shape: Arc<[usize]>, capacity: usize, coord: Vec<usize>, slot: usize },
    /// `‖name‖[axis]`.
    ShapeOf { name: Arc<str>, ndim: usize, axis: usize, value: usize },
    DimOf { name: Arc<str>, value: usize },
    CapOf { name: Arc<str>, value: usize },
    Apply(Elementary, Vec<Sym>),
}

impl Sym {
    pub fn new(kind: SymKind) -> Self {
        let mut h = DefaultHasher::new();
        kind.hash(&mut h);
        Sym(Arc::new(SymNode { hash: h.finish(), kind }))
    }

    pub fn kind(&self) -> &SymKind {
        &self.0.kind
    }

    /// The symbolic value of an input with the given shape and type list.
    pub fn input(name: &str, shape: &[usize], tl: &TypeList) -> ToL<Sym> {
        let name: Arc<str> = Arc::from(name);
        let extents: Arc<[usize]> = Arc::from(shape);
        let k = tl.capacity();
        let mut data = Vec::new();
        for coord in Coords::new(shape) {
            for slot in 1..=k {
                data.push(Sym::new(SymKind::Input {
                    name: name.clone(),
                    shape: extents.clone(),
                    capacity: k,
                    coord: coord.clone(),
                    slot,
                }));
            }
        }
        ToL::new(tl.clone(), shape.to_vec(), data).expect("input cells match shape")
    }

    fn folded(f: Elementary, args: Vec<Sym>) -> Result<Sym> {
        let consts: Option<Vec<Numeric>> = args.iter().map(Cell::to_constant).collect();
        match consts {
            Some(c) => Ok(Sym::new(SymKind::Const(f.apply(&c)?))),
            None => Ok(Sym::new(SymKind::Apply(f, args))),
        }
    }

    fn int(v: i64) -> Sym {
        Sym::new(SymKind::Const(Numeric::Int(v)))
    }
}

/// The input a whole value was read from, when it is exactly that input.
fn whole_input(t: &ToL<Sym>) -> Option<Arc<str>> {
    let first = t.data().first()?;
    let SymKind::Input { name, shape, capacity, .. } = first.kind() else { return None };
    if **shape != *t.shape() || *capacity != t.capacity() {
        return None;
    }
    let k = t.capacity();
    for (i, coord) in t.coords().enumerate() {
        for slot in 1..=k {
            match t.data()[i * k + slot - 1].kind() {
                SymKind::Input { name: n, coord: c, slot: s, .. }
                    if n == name && c == &coord && *s == slot => {}
                _ => return None,
            }
        }
    }
    Some(name.clone())
}

impl PartialEq for Sym {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.kind == other.0.kind)
    }
}

impl Eq for Sym {}

impl Hash for Sym {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", sym_to_atomic(self, &mut HashMap::new()))
    }
}

impl Cell for Sym {
    fn constant(n: Numeric) -> Self {
        Sym::new(SymKind::Const(n))
    }

    fn to_constant(&self) -> Option<Numeric> {
        match self.kind() {
            SymKind::Const(n) => Some(*n),
            SymKind::ShapeOf { value, .. } | SymKind::DimOf { value, .. } | SymKind::CapOf { value, .. } => {
                Some(Numeric::Int(*value as i64))
            }
            _ => None,
        }
    }

    fn apply(f: Elementary, args: &[Self]) -> Result<Self> {
        let (lo, hi) = f.arity();
        if args.len() < lo || args.len() > hi {
            return Err(Error::Arity(format!("{f} takes {lo}..={hi} arguments, got {}", args.len())));
        }
        if f == Elementary::Rand {
            return Err(Error::UnsupportedLowering("rand has no atomic form".into()));
        }
        Sym::folded(f, args.to_vec())
    }

    fn rand(_bound: &Self, _unit: f64) -> Result<Self> {
        Err(Error::UnsupportedLowering("rand has no atomic form".into()))
    }

    fn default_space(&self) -> SpaceId {
        match self.to_constant() {
            Some(n) => SpaceId::default_of(&n),
            None => SpaceId::R,
        }
    }

    fn convert(&self, space: &TypeSpace) -> Result<Self> {
        match self.kind() {
            SymKind::Const(n) => Ok(Sym::new(SymKind::Const(space.convert(n)?))),
            _ => Ok(self.clone()),
        }
    }

    fn select_if_ne(a: &Self, b: &Self, then: Self, otherwise: Self) -> Result<Self> {
        if let (Some(x), Some(y)) = (a.to_constant(), b.to_constant()) {
            return Ok(if x.value_eq(&y) { otherwise } else { then });
        }
        let ne = Sym::folded(Elementary::Ineq, vec![a.clone(), b.clone()])?;
        let eq = Sym::folded(Elementary::Eq, vec![a.clone(), b.clone()])?;
        let l = Sym::folded(Elementary::Mul, vec![ne, then])?;
        let r = Sym::folded(Elementary::Mul, vec![eq, otherwise])?;
        Sym::folded(Elementary::Add, vec![l, r])
    }

    fn mux(selector: &Self, options: &[Self]) -> Result<Self> {
        if selector.to_constant().is_some() {
            return Numeric::mux(&selector.to_constant().unwrap_or(Numeric::Int(0)), &(1..=options.len() as i64).map(Numeric::Int).collect::<Vec<_>>())
                .map(|k| options[k.as_i64().unwrap_or(1) as usize - 1].clone());
        }
        let mut acc: Option<Sym> = None;
        for (k, opt) in options.iter().enumerate() {
            let hit = Sym::folded(Elementary::Eq, vec![selector.clone(), Sym::int(k as i64 + 1)])?;
            let term = Sym::folded(Elementary::Mul, vec![hit, opt.clone()])?;
            acc = Some(match acc {
                None => term,
                Some(a) => Sym::folded(Elementary::Add, vec![a, term])?,
            });
        }
        acc.ok_or_else(|| Error::Index("selection among zero options".into()))
    }

    fn shape_cells(t: &ToL<Self>) -> Vec<Self> {
        match whole_input(t) {
            Some(name) => t
                .shape()
                .iter()
                .enumerate()
                .map(|(i, &d)| {
                    Sym::new(SymKind::ShapeOf { name: name.clone(), ndim: t.dim(), axis: i + 1, value: d })
                })
                .collect(),
            None => t.shape().iter().map(|&d| Sym::int(d as i64)).collect(),
        }
    }

    fn dim_cell(t: &ToL<Self>) -> Self {
        match whole_input(t) {
            Some(name) => Sym::new(SymKind::DimOf { name, value: t.dim() }),
            None => Sym::int(t.dim() as i64),
        }
    }

    fn capacity_cell(t: &ToL<Self>) -> Self {
        match whole_input(t) {
            Some(name) => Sym::new(SymKind::CapOf { name, value: t.capacity() }),
            None => Sym::int(t.capacity() as i64),
        }
    }
}

/// An expression over the atomic computations only.
#[derive(Clone, Debug, PartialEq)]
pub enum AtomicExpr {
    Leaf(String),
    Const(Numeric),
    Lambda(Elementary, Vec<Arc<AtomicExpr>>),
    Norm(Arc<AtomicExpr>),
    NormCap(Arc<AtomicExpr>),
    Member(Arc<AtomicExpr>, Vec<usize>),
    MemberSlot(Arc<AtomicExpr>, usize),
    Join(Arc<AtomicExpr>, Arc<AtomicExpr>),
    JoinList(Arc<AtomicExpr>, Arc<AtomicExpr>),
    Embed(Arc<AtomicExpr>),
}

impl AtomicExpr {
    pub fn children(&self) -> Vec<&Arc<AtomicExpr>> {
        match self {
            AtomicExpr::Leaf(_) | AtomicExpr::Const(_) => vec![],
            AtomicExpr::Lambda(_, args) => args.iter().collect(),
            AtomicExpr::Norm(x)
            | AtomicExpr::NormCap(x)
            | AtomicExpr::Member(x, _)
            | AtomicExpr::MemberSlot(x, _)
            | AtomicExpr::Embed(x) => vec![x],
            AtomicExpr::Join(a, b) | AtomicExpr::JoinList(a, b) => vec![a, b],
        }
    }

    /// Number of nodes of the expanded tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn count_lambdas(&self) -> usize {
        let own = usize::from(matches!(self, AtomicExpr::Lambda(..)));
        own + self.children().iter().map(|c| c.count_lambdas()).sum::<usize>()
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for AtomicExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomicExpr::Leaf(n) => f.write_str(n),
            AtomicExpr::Const(c) => write!(f, "{c}"),
            AtomicExpr::Lambda(func, args) => {
                write!(f, "(lambda {func}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            AtomicExpr::Norm(x) => write!(f, "(norm {x})"),
            AtomicExpr::NormCap(x) => write!(f, "(norm' {x})"),
            AtomicExpr::Member(x, c) => {
                write!(f, "(member {x}")?;
                for i in c {
                    write!(f, " {i}")?;
                }
                f.write_str(")")
            }
            AtomicExpr::MemberSlot(x, j) => write!(f, "(member' {x} {j})"),
            AtomicExpr::Join(a, b) => write!(f, "(join {a} {b})"),
            AtomicExpr::JoinList(a, b) => write!(f, "(join' {a} {b})"),
            AtomicExpr::Embed(x) => write!(f, "(embed {x})"),
        }
    }
}

fn leaf_member(name: &Arc<str>, coord: &[usize]) -> Arc<AtomicExpr> {
    let leaf = Arc::new(AtomicExpr::Leaf(name.to_string()));
    if coord.is_empty() {
        leaf
    } else {
        Arc::new(AtomicExpr::Member(leaf, coord.to_vec()))
    }
}

/// Converts a symbolic cell, sharing converted subtrees.
pub fn sym_to_atomic(s: &Sym, cache: &mut HashMap<usize, Arc<AtomicExpr>>) -> Arc<AtomicExpr> {
    let key = Arc::as_ptr(&s.0) as usize;
    if let Some(e) = cache.get(&key) {
        return e.clone();
    }
    let out = match s.kind() {
        SymKind::Const(n) => Arc::new(AtomicExpr::Const(*n)),
        SymKind::Input { name, capacity, coord, slot, .. } => {
            let m = leaf_member(name, coord);
            if *capacity == 1 {
                m
            } else {
                Arc::new(AtomicExpr::MemberSlot(m, *slot))
            }
        }
        SymKind::ShapeOf { name, axis, .. } => Arc::new(AtomicExpr::Member(
            Arc::new(AtomicExpr::Norm(Arc::new(AtomicExpr::Leaf(name.to_string())))),
            vec![*axis],
        )),
        SymKind::DimOf { name, .. } => Arc::new(AtomicExpr::Member(
            Arc::new(AtomicExpr::Norm(Arc::new(AtomicExpr::Norm(Arc::new(AtomicExpr::Leaf(name.to_string())))))),
            vec![1],
        )),
        SymKind::CapOf { name, .. } => Arc::new(AtomicExpr::NormCap(Arc::new(AtomicExpr::Leaf(name.to_string())))),
        SymKind::Apply(f, args) => {
            Arc::new(AtomicExpr::Lambda(*f, args.iter().map(|a| sym_to_atomic(a, cache)).collect()))
        }
    };
    cache.insert(key, out.clone());
    out
}

/// Rebuilds a symbolic value from its cells: lists by list join, then each
/// dimension from the first outwards by embedding and joining.
pub fn assemble(t: &ToL<Sym>) -> Result<Arc<AtomicExpr>> {
    if let Some(name) = whole_input(t) {
        return Ok(Arc::new(AtomicExpr::Leaf(name.to_string())));
    }
    if t.dim() == 1 && t.capacity() == 1 {
        let cells = t.data();
        if let Some(SymKind::ShapeOf { name, ndim, .. }) = cells.first().map(Sym::kind) {
            let full = *ndim == cells.len()
                && cells.iter().enumerate().all(|(i, c)| {
                    matches!(c.kind(), SymKind::ShapeOf { name: n, axis, .. } if n == name && *axis == i + 1)
                });
            if full {
                return Ok(Arc::new(AtomicExpr::Norm(Arc::new(AtomicExpr::Leaf(name.to_string())))));
            }
        }
    }
    if t.shape().iter().any(|&d| d == 0) {
        return Err(Error::UnsupportedLowering("an empty result has no atomic form".into()));
    }
    let mut cache = HashMap::new();
    let k = t.capacity();
    let mut cell = |coord: &[usize]| -> Result<Arc<AtomicExpr>> {
        let i = t.offset(coord)?;
        let list = t.list_at(i);
        let mut e = sym_to_atomic(&list[0], &mut cache);
        for s in &list[1..] {
            e = Arc::new(AtomicExpr::JoinList(e, sym_to_atomic(s, &mut cache)));
        }
        Ok(e)
    };
    debug_assert!(k >= 1);
    fn level(
        l: usize,
        tail: &mut Vec<usize>,
        shape: &[usize],
        cell: &mut dyn FnMut(&[usize]) -> Result<Arc<AtomicExpr>>,
    ) -> Result<Arc<AtomicExpr>> {
        if l == 0 {
            return cell(tail);
        }
        let mut acc: Option<Arc<AtomicExpr>> = None;
        for a in 1..=shape[l - 1] {
            tail.insert(0, a);
            let part = Arc::new(AtomicExpr::Embed(level(l - 1, tail, shape, cell)?));
            tail.remove(0);
            acc = Some(match acc {
                None => part,
                Some(prev) => Arc::new(AtomicExpr::Join(prev, part)),
            });
        }
        Ok(acc.expect("non-empty dimension"))
    }
    level(t.dim(), &mut Vec::new(), t.shape(), &mut cell)
}

/// Input shapes and type lists for lowering.
pub type InputShapes = std::collections::BTreeMap<String, (Vec<usize>, TypeList)>;

/// Lowers the result of `p` for the given input shapes.
pub fn lower_program(p: &crate::frontend::Program, shapes: &InputShapes) -> Result<(String, Arc<AtomicExpr>)> {
    lower_program_with(p, shapes, &HashMap::new())
}

/// Like [`lower_program`], with some inputs fixed to known values that fold into the tree.
pub fn lower_program_with(
    p: &crate::frontend::Program,
    shapes: &InputShapes,
    constants: &HashMap<String, ToL<Numeric>>,
) -> Result<(String, Arc<AtomicExpr>)> {
    let mut inputs: HashMap<String, ToL<Sym>> =
        shapes.iter().map(|(n, (sh, tl))| (n.clone(), Sym::input(n, sh, tl))).collect();
    for (n, v) in constants {
        let data = v.data().iter().map(|c| Sym::constant(*c)).collect();
        inputs.insert(n.clone(), ToL::new(v.type_list().clone(), v.shape().to_vec(), data)?);
    }
    let out = crate::eval::run(p, &inputs, &crate::eval::RunOptions::default())?;
    let name = out
        .result
        .clone()
        .ok_or_else(|| Error::UnsupportedLowering("the program binds no output".into()))?;
    let value = out.get(&name).expect("result is bound");
    Ok((name, assemble(value)?))
}

/// Direct interpreter of atomic expressions.
pub fn eval_atomic<C: Cell>(e: &Arc<AtomicExpr>, env: &HashMap<String, ToL<C>>) -> Result<ToL<C>> {
    let mut cache: HashMap<usize, ToL<C>> = HashMap::new();
    eval_rec(e, env, &mut cache)
}

fn eval_rec<C: Cell>(
    e: &Arc<AtomicExpr>,
    env: &HashMap<String, ToL<C>>,
    cache: &mut HashMap<usize, ToL<C>>,
) -> Result<ToL<C>> {
    let key = Arc::as_ptr(e) as usize;
    if let Some(v) = cache.get(&key) {
        return Ok(v.clone());
    }
    let out = match &**e {
        AtomicExpr::Leaf(n) => env.get(n).cloned().ok_or_else(|| Error::MissingInput(n.clone()))?,
        AtomicExpr::Const(c) => ToL::scalar(C::constant(*c)),
        AtomicExpr::Lambda(f, args) => {
            let mut cells = Vec::with_capacity(args.len());
            for a in args {
                let v = eval_rec(a, env, cache)?;
                let c = v
                    .single_cell()
                    .cloned()
                    .ok_or_else(|| Error::ShapeMismatch(format!("lambda argument of shape {:?} is not a numeric", v.shape())))?;
                cells.push(c);
            }
            ToL::scalar(C::apply(*f, &cells)?)
        }
        AtomicExpr::Norm(x) => eval_rec(x, env, cache)?.norm()?,
        AtomicExpr::NormCap(x) => ToL::scalar(eval_rec(x, env, cache)?.norm_capacity()),
        AtomicExpr::Member(x, c) => eval_rec(x, env, cache)?.member(c)?,
        AtomicExpr::MemberSlot(x, j) => eval_rec(x, env, cache)?.member_slot(*j)?,
        AtomicExpr::Join(a, b) => eval_rec(a, env, cache)?.join_last(&eval_rec(b, env, cache)?)?,
        AtomicExpr::JoinList(a, b) => eval_rec(a, env, cache)?.join_list(&eval_rec(b, env, cache)?)?,
        AtomicExpr::Embed(x) => eval_rec(x, env, cache)?.embed(),
    };
    cache.insert(key, out.clone());
    Ok(out)
}

/// Parses the parenthesized text form.
pub fn parse_atomic(src: &str) -> Result<Arc<AtomicExpr>> {
    let tokens = tokenize_atomic(src);
    let mut pos = 0;
    let e = parse_node(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(atomic_err(format!("trailing input `{}`", tokens[pos])));
    }
    Ok(e)
}

fn atomic_err(msg: String) -> Error {
    Error::Parse { span: Default::default(), msg }
}

fn tokenize_atomic(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = src.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            }
            '\'' if cur.is_empty() => {
                // character literal 'x'
                cur.push(c);
                if let Some(x) = chars.next() {
                    cur.push(x);
                }
                if let Some(q) = chars.next() {
                    cur.push(q);
                }
                out.push(std::mem::take(&mut cur));
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_atom(tok: &str) -> Result<AtomicExpr> {
    let num = match tok {
        "+Inf" => Some(Numeric::Float(f64::INFINITY)),
        "-Inf" => Some(Numeric::Float(f64::NEG_INFINITY)),
        "true" => Some(Numeric::Bool(true)),
        "false" => Some(Numeric::Bool(false)),
        _ if tok.starts_with('\'') => tok.chars().nth(1).map(Numeric::Char),
        _ if tok.starts_with(|c: char| c.is_ascii_digit() || c == '-') => {
            if let Ok(i) = tok.parse::<i64>() {
                Some(Numeric::Int(i))
            } else {
                Some(Numeric::Float(tok.parse::<f64>().map_err(|_| atomic_err(format!("bad number `{tok}`")))?))
            }
        }
        _ => None,
    };
    Ok(match num {
        Some(n) => AtomicExpr::Const(n),
        None => AtomicExpr::Leaf(tok.to_string()),
    })
}

fn parse_index(tok: Option<&String>) -> Result<usize> {
    tok.and_then(|t| t.parse::<usize>().ok()).ok_or_else(|| atomic_err(format!("expected an index, got {tok:?}")))
}

fn parse_node(tokens: &[String], pos: &mut usize) -> Result<Arc<AtomicExpr>> {
    let tok = tokens.get(*pos).ok_or_else(|| atomic_err("unexpected end of input".into()))?;
    *pos += 1;
    if tok != "(" {
        if tok == ")" {
            return Err(atomic_err("unexpected `)`".into()));
        }
        return Ok(Arc::new(parse_atom(tok)?));
    }
    let head = tokens.get(*pos).cloned().ok_or_else(|| atomic_err("missing operator".into()))?;
    *pos += 1;
    let sub = |pos: &mut usize| parse_node(tokens, pos);
    let node = match head.as_str() {
        "lambda" => {
            let name = tokens.get(*pos).ok_or_else(|| atomic_err("missing function".into()))?;
            let f = crate::elementary::lookup(name)?;
            *pos += 1;
            let mut args = Vec::new();
            while tokens.get(*pos).map(String::as_str) != Some(")") {
                args.push(sub(pos)?);
            }
            AtomicExpr::Lambda(f, args)
        }
        "norm" => AtomicExpr::Norm(sub(pos)?),
        "norm'" => AtomicExpr::NormCap(sub(pos)?),
        "member" => {
            let x = sub(pos)?;
            let mut c = Vec::new();
            while tokens.get(*pos).map(String::as_str) != Some(")") {
                c.push(parse_index(tokens.get(*pos))?);
                *pos += 1;
            }
            AtomicExpr::Member(x, c)
        }
        "member'" => {
            let x = sub(pos)?;
            let j = parse_index(tokens.get(*pos))?;
            *pos += 1;
            AtomicExpr::MemberSlot(x, j)
        }
        "join" => AtomicExpr::Join(sub(pos)?, sub(pos)?),
        "join'" => AtomicExpr::JoinList(sub(pos)?, sub(pos)?),
        "embed" => AtomicExpr::Embed(sub(pos)?),
        other => return Err(atomic_err(format!("unknown atomic computation `{other}`"))),
    };
    if tokens.get(*pos).map(String::as_str) != Some(")") {
        return Err(atomic_err(format!("expected `)` after `{head}`")));
    }
    *pos += 1;
    Ok(Arc::new(node))
}
