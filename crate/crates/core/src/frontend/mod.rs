//! The ToLang surface language: lexer, parser, canonical printer and name resolution.

pub mod ast;
pub mod format;
pub mod json;
pub mod lexer;
pub mod parser;
pub mod resolve;

pub use ast::{BinOp, Expr, ExprKind, Program, Stmt, StmtKind, TypeItem};
pub use format::{format_expr, format_program};
pub use lexer::{tokenize, TokKind, Token};
pub use parser::{parse, parse_expr};
pub use resolve::{resolve, Resolved};

/// Built-in operators and their argument counts.
pub const BUILTINS: &[(&str, usize, usize)] = &[
    ("shape", 1, 1),
    ("dim", 1, 1),
    ("capacity", 1, 1),
    ("vol", 1, 1),
    ("space", 1, 1),
    ("convert", 2, 2),
    ("part", 2, 3),
    ("part'", 2, 2),
    ("swap", 3, 3),
    ("reshape", 2, 2),
    ("tile", 1, 1),
    ("map", 2, 3),
    ("reduce", 2, 4),
    ("reducei", 3, 4),
    ("join", 2, usize::MAX),
    ("join'", 2, usize::MAX),
    ("embed", 1, 1),
];

pub fn builtin_arity(name: &str) -> Option<(usize, usize)> {
    BUILTINS.iter().find(|(n, ..)| *n == name).map(|&(_, lo, hi)| (lo, hi))
}
