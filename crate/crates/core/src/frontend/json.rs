use serde_json::{json, Value as Json};

use super::ast::*;
use crate::error::Span;

pub const AST_SCHEMA_VERSION: u32 = 1;

fn span(s: &Span) -> Json {
    json!({"line": s.line, "col": s.col, "len": s.len})
}

fn items(xs: &[TypeItem]) -> Json {
    Json::Array(
        xs.iter()
            .map(|i| match i {
                TypeItem::Name(n) => json!(n),
                TypeItem::Group(ns) => json!(ns),
            })
            .collect(),
    )
}

fn exprs(xs: &[Expr]) -> Json {
    Json::Array(xs.iter().map(expr_json).collect())
}

pub fn program_json(p: &Program) -> Json {
    json!({
        "version": AST_SCHEMA_VERSION,
        "kind": "Program",
        "children": p.stmts.iter().map(stmt_json).collect::<Vec<_>>(),
    })
}

pub fn stmt_json(s: &Stmt) -> Json {
    let mut v = match &s.kind {
        StmtKind::Space { name, space, bounds } => json!({
            "kind": "SpaceDecl",
            "name": name,
            "space": space,
            "children": match bounds {
                Some((lo, hi)) => vec![expr_json(lo), expr_json(hi)],
                None => vec![],
            },
        }),
        StmtKind::List { name, items: xs } => json!({"kind": "ListDecl", "name": name, "items": items(xs), "children": []}),
        StmtKind::Tol { name, items: xs, shape } => json!({
            "kind": "TolDecl",
            "name": name,
            "items": items(xs),
            "children": shape.as_deref().map(exprs).unwrap_or(json!([])),
        }),
        StmtKind::TolShape { name, shape } => json!({"kind": "TolShapeDecl", "name": name, "children": exprs(shape)}),
        StmtKind::Def { name, params, body, output } => json!({
            "kind": if *output { "OutputBind" } else { "FnDef" },
            "name": name,
            "params": params,
            "children": [expr_json(body)],
        }),
    };
    v["span"] = span(&s.span);
    if !s.comments.is_empty() {
        v["comments"] = json!(s.comments);
    }
    v
}

pub fn expr_json(e: &Expr) -> Json {
    let (kind, mut extra) = match &e.kind {
        ExprKind::Int(i) => ("Int", json!({"value": i})),
        ExprKind::Float(f) => ("Float", json!({"value": format!("{f:?}")})),
        ExprKind::Bool(b) => ("Bool", json!({"value": b})),
        ExprKind::Char(c) => ("Char", json!({"value": c.to_string()})),
        ExprKind::Inf(neg) => ("InfinityLit", json!({"sign": if *neg { "-" } else { "+" }})),
        ExprKind::Name(n) => ("Name", json!({"name": n})),
        ExprKind::Star => ("Star", json!({})),
        ExprKind::Neg(_) => ("Neg", json!({})),
        ExprKind::Binary(op, ..) => ("Binary", json!({"op": op.symbol()})),
        ExprKind::Call { name, prime, .. } => ("Call", json!({"name": name, "prime": prime})),
        ExprKind::Chain { names, .. } => ("CompositeChain", json!({"names": names})),
        ExprKind::Index { slot, index, .. } => ("Index", json!({"slot": slot, "arity": index.len()})),
        ExprKind::Shape(_) => ("NormBars", json!({"form": "shape"})),
        ExprKind::Dim(_) => ("NormBars", json!({"form": "dim"})),
        ExprKind::Cap(_) => ("NormBars", json!({"form": "capacity"})),
        ExprKind::Tuple(_) => ("Tuple", json!({})),
        ExprKind::Bracket(_) => ("Bracket", json!({})),
        ExprKind::ConstTol(_) => ("ConstTol", json!({})),
    };
    extra["kind"] = json!(kind);
    extra["span"] = span(&e.span);
    extra["children"] = Json::Array(e.children().into_iter().map(expr_json).collect());
    extra
}
