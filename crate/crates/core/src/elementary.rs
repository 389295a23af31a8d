//! Basic elementary functions, their evaluation rules and the function-expression
//! trees built from them.
//!
//! Every basic function costs exactly one elementary operation (EOP). `sqrt`, `exp`
//! and `abs` are registered as named extensions with the same unit cost.

use std::cell::Cell as StdCell;
use std::collections::HashMap;
use std::fmt;

use crate::cell::Cell;
use crate::error::{Error, Result};
use crate::scalar::{Numeric, Real};
use crate::space::SpaceId;

macro_rules! elementary {
    ($($variant:ident => $name:literal, $min:literal..=$max:literal, $space:ident;)*) => {
        /// A basic elementary function.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Elementary { $($variant),* }

        impl Elementary {
            pub const ALL: &'static [Elementary] = &[$(Elementary::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(Elementary::$variant => $name),* }
            }

            /// Accepted argument counts (inclusive).
            pub fn arity(self) -> (usize, usize) {
                match self { $(Elementary::$variant => ($min, $max)),* }
            }

            /// Domain space of the arguments.
            pub fn domain(self) -> SpaceId {
                match self { $(Elementary::$variant => SpaceId::$space),* }
            }
        }
    };
}

elementary! {
    Add => "add", 2..=2, C;
    Sub => "sub", 2..=2, C;
    Mul => "mul", 2..=2, C;
    Div => "div", 2..=2, C;
    Mod => "mod", 2..=2, Z;
    Pow => "pow", 2..=2, R;
    Log => "log", 1..=2, R;
    And => "and", 2..=2, B;
    Or => "or", 2..=2, B;
    Xor => "xor", 2..=2, B;
    Not => "not", 1..=1, B;
    Lt => "lt", 2..=2, R;
    Gt => "gt", 2..=2, R;
    Eq => "eq", 2..=2, R;
    Le => "le", 2..=2, R;
    Ge => "ge", 2..=2, R;
    Ineq => "ineq", 2..=2, R;
    Max => "max", 2..=2, R;
    Min => "min", 2..=2, R;
    Sgn => "sgn", 1..=1, R;
    Sin => "sin", 1..=1, R;
    Cos => "cos", 1..=1, R;
    Tan => "tan", 1..=1, R;
    Asin => "asin", 1..=1, R;
    Acos => "acos", 1..=1, R;
    Atan => "atan", 1..=1, R;
    Sinh => "sinh", 1..=1, R;
    Cosh => "cosh", 1..=1, R;
    Tanh => "tanh", 1..=1, R;
    Asinh => "asinh", 1..=1, R;
    Acosh => "acosh", 1..=1, R;
    Atanh => "atanh", 1..=1, R;
    Rand => "rand", 1..=1, R;
    Sqrt => "sqrt", 1..=1, R;
    Exp => "exp", 1..=1, R;
    Abs => "abs", 1..=1, R;
}

impl Elementary {
    /// Every basic function costs one EOP.
    pub const fn eops_cost(self) -> u64 {
        1
    }

    pub fn is_comparison(self) -> bool {
        use Elementary::*;
        matches!(self, Lt | Gt | Eq | Le | Ge | Ineq)
    }
}

impl fmt::Display for Elementary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Looks a basic elementary function up by name.
pub fn lookup(name: &str) -> Result<Elementary> {
    Elementary::ALL
        .iter()
        .copied()
        .find(|e| e.name() == name)
        .ok_or_else(|| Error::UnknownFunction(name.to_string()))
}

/// Invocation counters kept independently of the evaluator's cost report.
pub mod instrument {
    use super::StdCell;

    thread_local! {
        static COUNTED: StdCell<u64> = const { StdCell::new(0) };
        static STRUCTURAL: StdCell<u64> = const { StdCell::new(0) };
        static DEPTH: StdCell<u32> = const { StdCell::new(0) };
    }

    pub fn reset() {
        COUNTED.with(|c| c.set(0));
        STRUCTURAL.with(|c| c.set(0));
    }

    /// `(counted, structural)` invocations since the last reset on this thread.
    pub fn snapshot() -> (u64, u64) {
        (COUNTED.with(StdCell::get), STRUCTURAL.with(StdCell::get))
    }

    pub(crate) fn record() {
        if DEPTH.with(StdCell::get) > 0 {
            STRUCTURAL.with(|c| c.set(c.get() + 1));
        } else {
            COUNTED.with(|c| c.set(c.get() + 1));
        }
    }

    pub fn in_structural() -> bool {
        DEPTH.with(StdCell::get) > 0
    }

    /// While alive, invocations are recorded as address arithmetic.
    pub struct StructuralGuard(());

    impl StructuralGuard {
        pub fn enter() -> Self {
            DEPTH.with(|d| d.set(d.get() + 1));
            StructuralGuard(())
        }
    }

    impl Drop for StructuralGuard {
        fn drop(&mut self) {
            DEPTH.with(|d| d.set(d.get() - 1));
        }
    }
}

fn domain(f: Elementary, msg: impl fmt::Display) -> Error {
    Error::Domain(format!("{f}: {msg}"))
}

fn real<F: Real>(f: Elementary, x: &Numeric<F>) -> Result<F> {
    x.as_real().ok_or_else(|| domain(f, format!("{x} is not a real number")))
}

fn int<F: Real>(f: Elementary, x: &Numeric<F>) -> Result<i64> {
    x.as_i64().ok_or_else(|| domain(f, format!("{x} is not an integer")))
}

fn boolean<F: Real>(f: Elementary, x: &Numeric<F>) -> Result<bool> {
    x.as_bool().ok_or_else(|| domain(f, format!("{x} is not a boolean")))
}

fn both_int<F: Real>(a: &Numeric<F>, b: &Numeric<F>) -> Option<(i64, i64)> {
    Some((a.as_i64()?, b.as_i64()?))
}

impl Elementary {
    /// Evaluates this function on concrete numerics.
    ///
    /// Raises `DomainError` instead of producing NaN, and rejects infinities
    /// that do not stem from an infinite argument.
    pub fn apply<F: Real>(self, args: &[Numeric<F>]) -> Result<Numeric<F>> {
        let (lo, hi) = self.arity();
        if args.len() < lo || args.len() > hi {
            return Err(Error::Arity(format!(
                "{self} takes {lo}..={hi} arguments, got {}",
                args.len()
            )));
        }
        if let Some(c) = args.iter().find(|a| matches!(a, Numeric::Char(_))) {
            if !self.is_comparison() {
                return Err(domain(self, format!("character {c} is not a number")));
            }
        }
        instrument::record();
        let out = self.eval(args)?;
        if let Numeric::Float(x) = out {
            if x.is_nan() {
                return Err(domain(self, format!("undefined for {}", show(args))));
            }
            if x.is_infinite() && !args.iter().any(Numeric::is_infinite) {
                return Err(domain(self, format!("overflow for {}", show(args))));
            }
        }
        Ok(out)
    }

    fn eval<F: Real>(self, args: &[Numeric<F>]) -> Result<Numeric<F>> {
        use Elementary::*;
        let f = self;
        let arith = |int_op: fn(i64, i64) -> Option<i64>, float_op: fn(F, F) -> F| {
            let (a, b) = (&args[0], &args[1]);
            if let Some((x, y)) = both_int(a, b) {
                int_op(x, y)
                    .map(Numeric::Int)
                    .ok_or_else(|| domain(f, format!("integer overflow for {a}, {b}")))
            } else {
                Ok(Numeric::Float(float_op(real(f, a)?, real(f, b)?)))
            }
        };
        let unary = |op: fn(F) -> F| -> Result<Numeric<F>> { Ok(Numeric::Float(op(real(f, &args[0])?))) };
        match self {
            Add => arith(i64::checked_add, |x, y| x + y),
            Sub => arith(i64::checked_sub, |x, y| x - y),
            Mul => arith(i64::checked_mul, |x, y| x * y),
            Div => {
                let (x, y) = (real(f, &args[0])?, real(f, &args[1])?);
                if y == F::zero() {
                    return Err(domain(f, "division by zero"));
                }
                Ok(Numeric::Float(x / y))
            }
            Mod => {
                let (x, y) = (int(f, &args[0])?, int(f, &args[1])?);
                if y == 0 {
                    return Err(domain(f, "modulo by zero"));
                }
                let mut r = x.wrapping_rem(y);
                if r != 0 && ((r < 0) != (y < 0)) {
                    r += y;
                }
                Ok(Numeric::Int(r))
            }
            Pow => {
                if let Some((x, y)) = both_int(&args[0], &args[1]) {
                    if y >= 0 {
                        return u32::try_from(y)
                            .ok()
                            .and_then(|y| x.checked_pow(y))
                            .map(Numeric::Int)
                            .ok_or_else(|| domain(f, format!("integer overflow for {x}^{y}")));
                    }
                }
                let (x, y) = (real(f, &args[0])?, real(f, &args[1])?);
                Ok(Numeric::Float(x.powf(y)))
            }
            Log => {
                let (base, x) = if args.len() == 2 {
                    (Some(real(f, &args[0])?), real(f, &args[1])?)
                } else {
                    (None, real(f, &args[0])?)
                };
                if x <= F::zero() {
                    return Err(domain(f, format!("argument {x} is not positive")));
                }
                match base {
                    None => Ok(Numeric::Float(x.ln())),
                    Some(b) if b > F::zero() && b != F::one() => Ok(Numeric::Float(x.ln() / b.ln())),
                    Some(b) => Err(domain(f, format!("invalid base {b}"))),
                }
            }
            And => Ok(Numeric::Bool(boolean(f, &args[0])? && boolean(f, &args[1])?)),
            Or => Ok(Numeric::Bool(boolean(f, &args[0])? || boolean(f, &args[1])?)),
            Xor => Ok(Numeric::Bool(boolean(f, &args[0])? ^ boolean(f, &args[1])?)),
            Not => Ok(Numeric::Bool(!boolean(f, &args[0])?)),
            Lt | Gt | Eq | Le | Ge | Ineq => {
                let ord = args[0]
                    .cmp_value(&args[1])
                    .ok_or_else(|| domain(f, format!("cannot compare {} and {}", args[0], args[1])))?;
                use std::cmp::Ordering::*;
                Ok(Numeric::Bool(match self {
                    Lt => ord == Less,
                    Gt => ord == Greater,
                    Eq => ord == Equal,
                    Le => ord != Greater,
                    Ge => ord != Less,
                    _ => ord != Equal,
                }))
            }
            Max | Min => {
                let (a, b) = (&args[0], &args[1]);
                let ord = a
                    .cmp_value(b)
                    .ok_or_else(|| domain(f, format!("cannot compare {a} and {b}")))?;
                let pick_a = match self {
                    Max => ord != std::cmp::Ordering::Less,
                    _ => ord != std::cmp::Ordering::Greater,
                };
                let winner = if pick_a { a } else { b };
                if let Some((_, _)) = both_int(a, b) {
                    Ok(Numeric::Int(winner.as_i64().unwrap_or_default()))
                } else {
                    Ok(Numeric::Float(real(f, winner)?))
                }
            }
            Sgn => match args[0] {
                Numeric::Float(x) => Ok(Numeric::Float(if x > F::zero() {
                    F::one()
                } else if x < F::zero() {
                    -F::one()
                } else {
                    F::zero()
                })),
                ref x => Ok(Numeric::Int(int(f, x)?.signum())),
            },
            Abs => match args[0] {
                Numeric::Float(x) => Ok(Numeric::Float(x.abs())),
                ref x => int(f, x)?
                    .checked_abs()
                    .map(Numeric::Int)
                    .ok_or_else(|| domain(f, "integer overflow")),
            },
            Sin => unary(F::sin),
            Cos => unary(F::cos),
            Tan => unary(F::tan),
            Asin => unary(F::asin),
            Acos => unary(F::acos),
            Atan => unary(F::atan),
            Sinh => unary(F::sinh),
            Cosh => unary(F::cosh),
            Tanh => unary(F::tanh),
            Asinh => unary(F::asinh),
            Acosh => unary(F::acosh),
            Atanh => unary(F::atanh),
            Sqrt => unary(F::sqrt),
            Exp => unary(F::exp),
            Rand => Err(domain(f, "rand needs a seeded evaluation context")),
        }
    }
}

fn show<F: Real>(args: &[Numeric<F>]) -> String {
    args.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Maps a uniform draw `u` in `[0, 1)` to the value of `rand(x)`: an integer in
/// `[1, x]` for integer `x`, a float in `[0, x)` otherwise.
pub fn rand_from_unit<F: Real>(x: &Numeric<F>, u: f64) -> Result<Numeric<F>> {
    instrument::record();
    if let Some(n) = x.as_i64() {
        if n <= 0 {
            return Err(domain(Elementary::Rand, format!("bound {n} is not positive")));
        }
        let k = ((u * n as f64).floor() as i64).clamp(0, n - 1);
        return Ok(Numeric::Int(k + 1));
    }
    let bound = real(Elementary::Rand, x)?;
    if !(bound > F::zero()) || bound.is_infinite() {
        return Err(domain(Elementary::Rand, format!("bound {bound} is not a positive finite number")));
    }
    Ok(Numeric::Float(bound * F::from_f64(u).unwrap_or_else(F::zero)))
}

/// Applies a basic function to concrete numerics: the lambda atomic computation.
pub fn atomic_lambda(f: Elementary, args: &[Numeric], consts: &[Numeric]) -> Result<Numeric> {
    let all: Vec<Numeric> = args.iter().chain(consts).copied().collect();
    f.apply(&all)
}

/// A finite composition of basic functions over placeholders and constants.
#[derive(Clone, Debug, PartialEq)]
pub enum FnExpr {
    Apply(Elementary, Vec<FnExpr>),
    /// The element placeholder `*`.
    Star,
    /// A named placeholder: an iterator coordinate name or an environment binding.
    Var(String),
    Const(Numeric),
}

impl FnExpr {
    pub fn apply(f: Elementary, args: Vec<FnExpr>) -> Self {
        FnExpr::Apply(f, args)
    }

    pub fn var(name: &str) -> Self {
        FnExpr::Var(name.to_string())
    }

    pub fn int(v: i64) -> Self {
        FnExpr::Const(Numeric::Int(v))
    }

    pub fn float(v: f64) -> Self {
        FnExpr::Const(Numeric::Float(v))
    }

    /// Number of basic function nodes.
    pub fn eops(&self) -> u64 {
        match self {
            FnExpr::Apply(f, args) => f.eops_cost() + args.iter().map(FnExpr::eops).sum::<u64>(),
            _ => 0,
        }
    }

    /// Substitutes `inner` for every `*` placeholder.
    pub fn compose(&self, inner: &FnExpr) -> FnExpr {
        match self {
            FnExpr::Star => inner.clone(),
            FnExpr::Apply(f, args) => FnExpr::Apply(*f, args.iter().map(|a| a.compose(inner)).collect()),
            other => other.clone(),
        }
    }

    pub fn uses_star(&self) -> bool {
        match self {
            FnExpr::Star => true,
            FnExpr::Apply(_, args) => args.iter().any(FnExpr::uses_star),
            _ => false,
        }
    }

    /// Evaluates with `*` bound to `element`, iterator names bound to the
    /// components of `coord`, and remaining names looked up in `env`.
    pub fn eval<C: Cell>(
        &self,
        element: Option<&C>,
        iter: &[String],
        coord: &[usize],
        env: &HashMap<String, C>,
    ) -> Result<C> {
        match self {
            FnExpr::Star => element.cloned().ok_or_else(|| Error::UnboundPlaceholder("*".into())),
            FnExpr::Const(n) => Ok(C::constant(*n)),
            FnExpr::Var(name) => {
                if let Some(pos) = iter.iter().position(|n| n == name) {
                    let c = coord
                        .get(pos)
                        .ok_or_else(|| Error::UnboundPlaceholder(name.clone()))?;
                    return Ok(C::constant(Numeric::Int(*c as i64)));
                }
                env.get(name).cloned().ok_or_else(|| Error::UnboundPlaceholder(name.clone()))
            }
            FnExpr::Apply(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| a.eval(element, iter, coord, env))
                    .collect::<Result<Vec<_>>>()?;
                C::apply(*f, &vals)
            }
        }
    }
}

impl fmt::Display for FnExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnExpr::Star => f.write_str("*"),
            FnExpr::Var(n) => f.write_str(n),
            FnExpr::Const(c) => write!(f, "{c}"),
            FnExpr::Apply(func, args) => {
                write!(f, "{func}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Evaluates `f` on a single element and coordinate with an environment of numerics.
pub fn eval_fnexpr(
    f: &FnExpr,
    element: &Numeric,
    iter: &[String],
    coord: &[usize],
    env: &HashMap<String, Numeric>,
) -> Result<Numeric> {
    f.eval(Some(element), iter, coord, env)
}

pub fn eops_of_fnexpr(f: &FnExpr) -> u64 {
    f.eops()
}
