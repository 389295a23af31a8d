use crate::error::Span;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub stmts: Vec<Stmt>,
    /// Comments after the last statement.
    pub trailing: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
    /// Comment lines directly above the statement, without the `#`.
    pub comments: Vec<String>,
}

/// A slot type in a declaration: a space or list name, or a bracketed group.
#[derive(Clone, Debug, PartialEq)]
pub enum TypeItem {
    Name(String),
    Group(Vec<String>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    /// `space v: S` or `space v: S [lo, hi]`
    Space { name: String, space: String, bounds: Option<(Expr, Expr)> },
    /// `list l: items`
    List { name: String, items: Vec<TypeItem> },
    /// `tol v: items` with an optional `[shape]`
    Tol { name: String, items: Vec<TypeItem>, shape: Option<Vec<Expr>> },
    /// `tol v=[e, ...]`
    TolShape { name: String, shape: Vec<Expr> },
    /// `name(params) = body` (lazy) or `name(params) := body` (output)
    Def { name: String, params: Option<Vec<String>>, body: Expr, output: bool },
}

impl StmtKind {
    pub fn name(&self) -> &str {
        match self {
            StmtKind::Space { name, .. }
            | StmtKind::List { name, .. }
            | StmtKind::Tol { name, .. }
            | StmtKind::TolShape { name, .. }
            | StmtKind::Def { name, .. } => name,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Pow => "^",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
        }
    }

    /// The named elementary function the operator stands for.
    pub fn function(self) -> &'static str {
        match self {
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::Mul => "mul",
            BinOp::Div => "div",
            BinOp::Mod => "mod",
            BinOp::Pow => "pow",
            BinOp::Lt => "lt",
            BinOp::Gt => "gt",
            BinOp::Le => "le",
            BinOp::Ge => "ge",
            BinOp::Eq => "eq",
            BinOp::Ne => "ineq",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge | BinOp::Eq | BinOp::Ne => PREC_CMP,
            BinOp::Add | BinOp::Sub => PREC_ADD,
            BinOp::Mul | BinOp::Div | BinOp::Mod => PREC_MUL,
            BinOp::Pow => PREC_POW,
        }
    }

    pub fn right_assoc(self) -> bool {
        self == BinOp::Pow
    }
}

pub const PREC_CMP: u8 = 1;
pub const PREC_ADD: u8 = 2;
pub const PREC_MUL: u8 = 3;
pub const PREC_UNARY: u8 = 4;
pub const PREC_POW: u8 = 5;
pub const PREC_POSTFIX: u8 = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Float(f64),
    Bool(bool),
    Char(char),
    /// `+Inf` (false) or `-Inf` (true)
    Inf(bool),
    Name(String),
    /// The element placeholder `*`.
    Star,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// `name(args)`; `prime` for `name'(args)`.
    Call { name: String, prime: bool, args: Vec<Expr> },
    /// `f.g.h(args)`, applied left to right.
    Chain { names: Vec<String>, args: Vec<Expr> },
    /// `t[i, ...]`, or `t[j]'` when `slot`.
    Index { target: Box<Expr>, index: Vec<Expr>, slot: bool },
    Shape(Box<Expr>),
    Dim(Box<Expr>),
    Cap(Box<Expr>),
    Tuple(Vec<Expr>),
    Bracket(Vec<Expr>),
    /// `tol[d1, ...]`
    ConstTol(Vec<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Int(_)
            | ExprKind::Float(_)
            | ExprKind::Bool(_)
            | ExprKind::Char(_)
            | ExprKind::Inf(_)
            | ExprKind::Name(_)
            | ExprKind::Star => vec![],
            ExprKind::Neg(x) | ExprKind::Shape(x) | ExprKind::Dim(x) | ExprKind::Cap(x) => vec![x],
            ExprKind::Binary(_, a, b) => vec![a, b],
            ExprKind::Call { args, .. } | ExprKind::Chain { args, .. } => args.iter().collect(),
            ExprKind::Index { target, index, .. } => std::iter::once(&**target).chain(index.iter()).collect(),
            ExprKind::Tuple(xs) | ExprKind::Bracket(xs) | ExprKind::ConstTol(xs) => xs.iter().collect(),
        }
    }

    /// Structural equality ignoring spans.
    pub fn same(&self, other: &Expr) -> bool {
        let shallow = match (&self.kind, &other.kind) {
            (ExprKind::Int(a), ExprKind::Int(b)) => a == b,
            (ExprKind::Float(a), ExprKind::Float(b)) => a.to_bits() == b.to_bits(),
            (ExprKind::Bool(a), ExprKind::Bool(b)) => a == b,
            (ExprKind::Char(a), ExprKind::Char(b)) => a == b,
            (ExprKind::Inf(a), ExprKind::Inf(b)) => a == b,
            (ExprKind::Name(a), ExprKind::Name(b)) => a == b,
            (ExprKind::Star, ExprKind::Star) => true,
            (ExprKind::Neg(_), ExprKind::Neg(_)) => true,
            (ExprKind::Binary(a, ..), ExprKind::Binary(b, ..)) => a == b,
            (ExprKind::Call { name: a, prime: p, .. }, ExprKind::Call { name: b, prime: q, .. }) => a == b && p == q,
            (ExprKind::Chain { names: a, .. }, ExprKind::Chain { names: b, .. }) => a == b,
            (ExprKind::Index { slot: a, index: i, .. }, ExprKind::Index { slot: b, index: j, .. }) => {
                a == b && i.len() == j.len()
            }
            (ExprKind::Shape(_), ExprKind::Shape(_))
            | (ExprKind::Dim(_), ExprKind::Dim(_))
            | (ExprKind::Cap(_), ExprKind::Cap(_))
            | (ExprKind::Tuple(_), ExprKind::Tuple(_))
            | (ExprKind::Bracket(_), ExprKind::Bracket(_))
            | (ExprKind::ConstTol(_), ExprKind::ConstTol(_)) => true,
            _ => false,
        };
        let (xs, ys) = (self.children(), other.children());
        shallow && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| a.same(b))
    }

    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }
}

impl Stmt {
    pub fn same(&self, other: &Stmt) -> bool {
        let exprs_same = |a: &[Expr], b: &[Expr]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same(y));
        self.comments == other.comments
            && match (&self.kind, &other.kind) {
                (
                    StmtKind::Space { name: a, space: s, bounds: x },
                    StmtKind::Space { name: b, space: t, bounds: y },
                ) => {
                    a == b
                        && s == t
                        && match (x, y) {
                            (None, None) => true,
                            (Some((l1, h1)), Some((l2, h2))) => l1.same(l2) && h1.same(h2),
                            _ => false,
                        }
                }
                (StmtKind::List { name: a, items: x }, StmtKind::List { name: b, items: y }) => a == b && x == y,
                (
                    StmtKind::Tol { name: a, items: x, shape: s },
                    StmtKind::Tol { name: b, items: y, shape: t },
                ) => {
                    a == b
                        && x == y
                        && match (s, t) {
                            (None, None) => true,
                            (Some(s), Some(t)) => exprs_same(s, t),
                            _ => false,
                        }
                }
                (StmtKind::TolShape { name: a, shape: s }, StmtKind::TolShape { name: b, shape: t }) => {
                    a == b && exprs_same(s, t)
                }
                (
                    StmtKind::Def { name: a, params: p, body: x, output: o },
                    StmtKind::Def { name: b, params: q, body: y, output: u },
                ) => a == b && p == q && o == u && x.same(y),
                _ => false,
            }
    }
}

impl Program {
    /// Structural equality ignoring spans.
    pub fn same(&self, other: &Program) -> bool {
        self.trailing == other.trailing
            && self.stmts.len() == other.stmts.len()
            && self.stmts.iter().zip(&other.stmts).all(|(a, b)| a.same(b))
    }
}
