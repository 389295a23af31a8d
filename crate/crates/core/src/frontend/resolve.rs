use std::collections::{BTreeSet, HashMap, HashSet};

use super::ast::*;
use super::builtin_arity;
use crate::elementary;
use crate::error::{Error, Result};

/// What name resolution learned about a program.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Resolved {
    /// Names that must be supplied as inputs.
    pub free_inputs: Vec<String>,
    /// Inputs declared with `tol v: S [shape]`, which have no default.
    pub required_inputs: Vec<String>,
}

#[derive(Clone, Copy, PartialEq)]
enum Global {
    Value,
    Def(usize),
}

struct Ctx<'a> {
    globals: &'a HashMap<String, Global>,
    all_params: &'a HashSet<String>,
    free: BTreeSet<String>,
}

pub fn resolve(p: &Program) -> Result<Resolved> {
    let mut globals = HashMap::new();
    let mut all_params = HashSet::new();
    let mut required = Vec::new();
    for s in &p.stmts {
        match &s.kind {
            StmtKind::Def { name, params: Some(ps), .. } => {
                all_params.extend(ps.iter().cloned());
                globals.insert(name.clone(), Global::Def(ps.len()));
            }
            StmtKind::Def { name, params: None, .. } | StmtKind::TolShape { name, .. } => {
                globals.entry(name.clone()).or_insert(Global::Value);
            }
            StmtKind::Tol { name, shape, .. } => {
                if shape.is_some() {
                    required.push(name.clone());
                }
                globals.entry(name.clone()).or_insert(Global::Value);
            }
            StmtKind::Space { .. } | StmtKind::List { .. } => {}
        }
    }
    // iterator names behave like parameters for free-variable purposes
    for s in &p.stmts {
        if let StmtKind::Def { body, .. } = &s.kind {
            body.walk(&mut |e| {
                if let ExprKind::Call { name, args, .. } = &e.kind {
                    if name == "map" && args.len() == 3 {
                        all_params.extend(iter_names(&args[2]).unwrap_or_default());
                    }
                }
            });
        }
    }
    let mut ctx = Ctx { globals: &globals, all_params: &all_params, free: BTreeSet::new() };
    for s in &p.stmts {
        match &s.kind {
            StmtKind::Def { params, body, .. } => {
                let scope: Vec<String> = params.clone().unwrap_or_default();
                ctx.expr(body, &scope, false)?;
            }
            StmtKind::TolShape { shape, .. } => {
                for e in shape {
                    ctx.expr(e, &[], false)?;
                }
            }
            StmtKind::Tol { shape: Some(shape), .. } => {
                for e in shape {
                    ctx.expr(e, &[], false)?;
                }
            }
            StmtKind::Space { bounds: Some((lo, hi)), .. } => {
                ctx.expr(lo, &[], false)?;
                ctx.expr(hi, &[], false)?;
            }
            _ => {}
        }
    }
    Ok(Resolved { free_inputs: ctx.free.into_iter().collect(), required_inputs: required })
}

/// Names bound by a map iterator argument: `i` or `[i, j]`.
pub fn iter_names(e: &Expr) -> Option<Vec<String>> {
    match &e.kind {
        ExprKind::Name(n) => Some(vec![n.clone()]),
        ExprKind::Bracket(xs) => xs
            .iter()
            .map(|x| match &x.kind {
                ExprKind::Name(n) => Some(n.clone()),
                _ => None,
            })
            .collect(),
        _ => None,
    }
}

impl Ctx<'_> {
    fn expr(&mut self, e: &Expr, scope: &[String], star_ok: bool) -> Result<()> {
        match &e.kind {
            ExprKind::Star if !star_ok => Err(Error::StarOutsideIterator(e.span)),
            ExprKind::Name(n) => {
                if !scope.contains(n) && !self.globals.contains_key(n) && !self.all_params.contains(n) {
                    self.free.insert(n.clone());
                }
                Ok(())
            }
            ExprKind::Call { name, prime, args } => self.call(e, name, *prime, args, scope, star_ok),
            ExprKind::Chain { names, args } => {
                for n in names {
                    self.callee(e, n, 1, scope)?;
                }
                self.all(args, scope, star_ok)
            }
            _ => {
                for c in e.children() {
                    self.expr(c, scope, star_ok)?;
                }
                Ok(())
            }
        }
    }

    fn all(&mut self, xs: &[Expr], scope: &[String], star_ok: bool) -> Result<()> {
        for x in xs {
            self.expr(x, scope, star_ok)?;
        }
        Ok(())
    }

    /// Checks that `name` can be called with `n` arguments.
    fn callee(&self, e: &Expr, name: &str, n: usize, scope: &[String]) -> Result<()> {
        if scope.contains(&name.to_string()) || self.all_params.contains(name) {
            return Ok(());
        }
        match self.globals.get(name) {
            Some(Global::Def(k)) if n > *k => {
                Err(Error::Arity(format!("`{name}` takes at most {k} arguments, got {n} at {}", e.span)))
            }
            Some(_) => Ok(()),
            None => {
                if let Some((lo, hi)) = builtin_arity(name) {
                    if n < lo || n > hi {
                        return Err(Error::Arity(format!("`{name}` takes {lo}..={hi} arguments, got {n} at {}", e.span)));
                    }
                    return Ok(());
                }
                match elementary::lookup(name) {
                    Ok(f) => {
                        let (lo, hi) = f.arity();
                        if n < lo || n > hi {
                            return Err(Error::Arity(format!(
                                "`{name}` takes {lo}..={hi} arguments, got {n} at {}",
                                e.span
                            )));
                        }
                        Ok(())
                    }
                    Err(_) => Err(Error::UnboundName { name: name.to_string(), span: e.span }),
                }
            }
        }
    }

    /// A bare function name given to map (`unary`) or reduce.
    fn function_arg(&self, f: &Expr, arities: &[usize], elementary_arity: usize, op: &str) -> Result<bool> {
        let ExprKind::Name(name) = &f.kind else { return Ok(false) };
        if let Some(Global::Def(k)) = self.globals.get(name) {
            if arities.contains(k) {
                return Ok(true);
            }
            return Err(Error::Arity(format!("`{name}` with {k} parameters cannot be the function of {op} at {}", f.span)));
        }
        if let Ok(ef) = elementary::lookup(name) {
            let (lo, hi) = ef.arity();
            if lo <= elementary_arity && elementary_arity <= hi {
                return Ok(true);
            }
            return Err(Error::Arity(format!("`{name}` takes {lo}..={hi} arguments and cannot be the function of {op} at {}", f.span)));
        }
        Ok(false)
    }

    fn call(&mut self, e: &Expr, name: &str, prime: bool, args: &[Expr], scope: &[String], star_ok: bool) -> Result<()> {
        let shadowed = scope.contains(&name.to_string()) || self.globals.contains_key(name);
        if prime {
            if name != "part" && name != "join" {
                return Err(Error::UnboundName { name: format!("{name}'"), span: e.span });
            }
            let (lo, hi) = builtin_arity(&format!("{name}'")).unwrap_or((2, 2));
            if args.len() < lo || args.len() > hi {
                return Err(Error::Arity(format!("`{name}'` takes {lo}..={hi} arguments, got {} at {}", args.len(), e.span)));
            }
            return self.all(args, scope, star_ok);
        }
        self.callee(e, name, args.len(), scope)?;
        if shadowed {
            return self.all(args, scope, star_ok);
        }
        match name {
            "map" => {
                self.expr(&args[0], scope, star_ok)?;
                let mut inner: Vec<String> = scope.to_vec();
                if let Some(it) = args.get(2) {
                    let names = iter_names(it)
                        .ok_or_else(|| Error::Arity(format!("map iterator must be a name or [names] at {}", it.span)))?;
                    inner.extend(names);
                }
                if !self.function_arg(&args[1], &[1, 2], 1, "map")? {
                    self.expr(&args[1], &inner, true)?;
                }
                Ok(())
            }
            "reduce" | "reducei" => {
                self.expr(&args[0], scope, star_ok)?;
                if !self.function_arg(&args[1], &[2, 3], 2, name)? {
                    return Err(Error::Arity(format!("{name} needs the name of a binary function at {}", args[1].span)));
                }
                if let Some(init) = args.get(2) {
                    self.expr(init, scope, star_ok)?;
                }
                if let Some(it) = args.get(3) {
                    iter_names(it)
                        .ok_or_else(|| Error::Arity(format!("{name} iterator must be a name or [names] at {}", it.span)))?;
                }
                Ok(())
            }
            "convert" => {
                self.expr(&args[0], scope, star_ok)?;
                match &args[1].kind {
                    ExprKind::Bracket(xs) if xs.iter().all(|x| matches!(x.kind, ExprKind::Name(_))) => Ok(()),
                    _ => self.expr(&args[1], scope, star_ok),
                }
            }
            _ => self.all(args, scope, star_ok),
        }
    }
}
