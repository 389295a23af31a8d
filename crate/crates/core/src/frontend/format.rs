use std::fmt::Write;

use super::ast::*;

/// Canonical text of a program; parsing it yields the same tree.
pub fn format_program(p: &Program) -> String {
    let mut out = String::new();
    for s in &p.stmts {
        for c in &s.comments {
            let _ = writeln!(out, "#{c}");
        }
        out.push_str(&format_stmt(s));
        out.push('\n');
    }
    for c in &p.trailing {
        let _ = writeln!(out, "#{c}");
    }
    out
}

pub fn format_stmt(s: &Stmt) -> String {
    match &s.kind {
        StmtKind::Space { name, space, bounds } => match bounds {
            Some((lo, hi)) => format!("space {name}: {space} [{},{}]", format_expr(lo), format_expr(hi)),
            None => format!("space {name}: {space}"),
        },
        StmtKind::List { name, items } => format!("list {name}: {}", items_text(items)),
        StmtKind::Tol { name, items, shape } => match shape {
            Some(sh) => format!("tol {name}: {} [{}]", items_text(items), list(sh)),
            None => format!("tol {name}: {}", items_text(items)),
        },
        StmtKind::TolShape { name, shape } => format!("tol {name}=[{}]", list(shape)),
        StmtKind::Def { name, params, body, output } => {
            let head = match params {
                Some(ps) => format!("{name}({})", ps.join(",")),
                None => name.clone(),
            };
            format!("{head}{}{}", if *output { ":=" } else { "=" }, format_expr(body))
        }
    }
}

fn items_text(items: &[TypeItem]) -> String {
    items
        .iter()
        .map(|i| match i {
            TypeItem::Name(n) => n.clone(),
            TypeItem::Group(ns) => format!("[{}]", ns.join(",")),
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn list(xs: &[Expr]) -> String {
    xs.iter().map(format_expr).collect::<Vec<_>>().join(",")
}

pub fn format_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

/// Binding strength of the expression's outermost construct.
fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(op, ..) => op.precedence(),
        ExprKind::Neg(_) => PREC_UNARY,
        ExprKind::Int(i) if *i < 0 => PREC_UNARY,
        ExprKind::Float(f) if f.is_sign_negative() => PREC_UNARY,
        ExprKind::Inf(_) => PREC_UNARY,
        _ => PREC_POSTFIX,
    }
}

fn write_wrapped(out: &mut String, e: &Expr, wrap: bool) {
    if wrap {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Int(i) => {
            let _ = write!(out, "{i}");
        }
        ExprKind::Float(f) => {
            let _ = write!(out, "{f:?}");
        }
        ExprKind::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::Char(c) => {
            let _ = write!(out, "'{c}'");
        }
        ExprKind::Inf(neg) => out.push_str(if *neg { "-Inf" } else { "+Inf" }),
        ExprKind::Name(n) => out.push_str(n),
        ExprKind::Star => out.push('*'),
        ExprKind::Neg(x) => {
            out.push('-');
            // a literal operand would fold into a negative literal
            let literal = matches!(x.kind, ExprKind::Int(_) | ExprKind::Float(_) | ExprKind::Inf(_));
            write_wrapped(out, x, prec(x) < PREC_POW || literal);
        }
        ExprKind::Binary(op, a, b) => {
            let p = op.precedence();
            let (wrap_l, wrap_r) = if op.right_assoc() {
                (prec(a) <= p, prec(b) < p)
            } else {
                (prec(a) < p, prec(b) <= p)
            };
            // signed literals and negations read badly after an operator
            let signed = |x: &Expr| prec(x) == PREC_UNARY;
            write_wrapped(out, a, wrap_l || (signed(a) && p > PREC_UNARY));
            out.push_str(op.symbol());
            // `a**` would read as a power
            let star_after_star = matches!(op, BinOp::Mul) && matches!(b.kind, ExprKind::Star);
            write_wrapped(out, b, wrap_r || signed(b) || star_after_star);
        }
        ExprKind::Call { name, prime, args } => {
            out.push_str(name);
            if *prime {
                out.push('\'');
            }
            let _ = write!(out, "({})", list(args));
        }
        ExprKind::Chain { names, args } => {
            let _ = write!(out, "{}({})", names.join("."), list(args));
        }
        ExprKind::Index { target, index, slot } => {
            write_wrapped(out, target, prec(target) < PREC_POSTFIX);
            let _ = write!(out, "[{}]", list(index));
            if *slot {
                out.push('\'');
            }
        }
        ExprKind::Shape(x) => {
            let _ = write!(out, "|{}|", bar_inner(x));
        }
        ExprKind::Dim(x) => {
            let _ = write!(out, "||{}||", format_expr(x));
        }
        ExprKind::Cap(x) => {
            let _ = write!(out, "|{}|'", bar_inner(x));
        }
        ExprKind::Tuple(xs) => {
            let _ = write!(out, "({})", list(xs));
        }
        ExprKind::Bracket(xs) => {
            let _ = write!(out, "[{}]", list(xs));
        }
        ExprKind::ConstTol(xs) => {
            let _ = write!(out, "tol[{}]", list(xs));
        }
    }
}

/// Keeps `| |x||` from reading as `||x||`.
fn bar_inner(x: &Expr) -> String {
    let s = format_expr(x);
    if s.starts_with('|') {
        format!(" {s}")
    } else {
        s
    }
}
