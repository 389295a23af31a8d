//! Numerics: the tagged scalars stored in list slots.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point backend for [`Numeric`]. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Default + Send + Sync + 'static
{
    /// Bit pattern widened to 64 bits, used for hashing and bit-exact comparisons.
    fn to_bits_u64(self) -> u64;
}

impl Real for f64 {
    fn to_bits_u64(self) -> u64 {
        self.to_bits()
    }
}

impl Real for f32 {
    fn to_bits_u64(self) -> u64 {
        u64::from(self.to_bits())
    }
}

/// A single numeric value: boolean, 64-bit integer, float or character code.
#[derive(Clone, Copy, Debug)]
pub enum Numeric<F: Real = f64> {
    Bool(bool),
    Int(i64),
    Float(F),
    Char(char),
}

impl<F: Real> Numeric<F> {
    pub fn float(x: f64) -> Self {
        Numeric::Float(F::from_f64(x).unwrap_or_else(F::nan))
    }

    pub fn is_float(&self) -> bool {
        matches!(self, Numeric::Float(_))
    }

    pub fn is_integral(&self) -> bool {
        matches!(self, Numeric::Bool(_) | Numeric::Int(_))
    }

    /// Integer view of booleans and integers.
    pub fn as_i64(&self) -> Option<i64> {
        match *self {
            Numeric::Bool(b) => Some(i64::from(b)),
            Numeric::Int(i) => Some(i),
            _ => None,
        }
    }

    /// Integer view that also accepts integral floats (used for coordinates and extents).
    pub fn as_exact_i64(&self) -> Option<i64> {
        match *self {
            Numeric::Float(x) => {
                let v = x.to_f64()?;
                if v.is_finite() && v.fract() == 0.0 && v.abs() < 9.007_199_254_740_992e15 {
                    Some(v as i64)
                } else {
                    None
                }
            }
            _ => self.as_i64(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Numeric::Bool(b) => Some(if b { 1.0 } else { 0.0 }),
            Numeric::Int(i) => Some(i as f64),
            Numeric::Float(x) => x.to_f64(),
            Numeric::Char(_) => None,
        }
    }

    pub fn as_real(&self) -> Option<F> {
        match *self {
            Numeric::Float(x) => Some(x),
            _ => self.as_f64().and_then(F::from_f64),
        }
    }

    /// Boolean view of `{0, 1}` numerics.
    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            Numeric::Bool(b) => Some(b),
            Numeric::Int(0) => Some(false),
            Numeric::Int(1) => Some(true),
            Numeric::Float(x) if x == F::zero() => Some(false),
            Numeric::Float(x) if x == F::one() => Some(true),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Numeric::Float(x) if x.is_infinite())
    }

    /// Converts between float backends.
    pub fn cast<G: Real>(self) -> Numeric<G> {
        match self {
            Numeric::Bool(b) => Numeric::Bool(b),
            Numeric::Int(i) => Numeric::Int(i),
            Numeric::Float(x) => Numeric::Float(G::from(x).unwrap_or_else(G::nan)),
            Numeric::Char(c) => Numeric::Char(c),
        }
    }

    /// Numeric comparison across integer and float representations.
    pub fn cmp_value(&self, other: &Self) -> Option<Ordering> {
        match (self.as_i64(), other.as_i64()) {
            (Some(a), Some(b)) => Some(a.cmp(&b)),
            _ => match (self, other) {
                (Numeric::Char(a), Numeric::Char(b)) => Some(a.cmp(b)),
                _ => self.as_f64()?.partial_cmp(&other.as_f64()?),
            },
        }
    }

    /// Value equality: `1` equals `1.0`, booleans equal their integer codes.
    pub fn value_eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Some(Ordering::Equal)
    }
}

/// Structural equality: same variant and bit-identical payload.
impl<F: Real> PartialEq for Numeric<F> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Numeric::Bool(a), Numeric::Bool(b)) => a == b,
            (Numeric::Int(a), Numeric::Int(b)) => a == b,
            (Numeric::Float(a), Numeric::Float(b)) => a.to_bits_u64() == b.to_bits_u64(),
            (Numeric::Char(a), Numeric::Char(b)) => a == b,
            _ => false,
        }
    }
}

impl<F: Real> Eq for Numeric<F> {}

impl<F: Real> Hash for Numeric<F> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match *self {
            Numeric::Bool(b) => (0u8, b).hash(state),
            Numeric::Int(i) => (1u8, i).hash(state),
            Numeric::Float(x) => (2u8, x.to_bits_u64()).hash(state),
            Numeric::Char(c) => (3u8, c).hash(state),
        }
    }
}

impl<F: Real> fmt::Display for Numeric<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Numeric::Bool(b) => write!(f, "{}", if b { "true" } else { "false" }),
            Numeric::Int(i) => write!(f, "{i}"),
            Numeric::Float(x) => {
                if x.is_infinite() {
                    write!(f, "{}Inf", if x > F::zero() { "+" } else { "-" })
                } else {
                    // Debug gives the shortest round-trip form
                    let s = format!("{x:?}");
                    if s.contains(['.', 'e', 'N']) {
                        f.write_str(&s)
                    } else {
                        write!(f, "{s}.0")
                    }
                }
            }
            Numeric::Char(c) => write!(f, "'{c}'"),
        }
    }
}

impl<F: Real> From<i64> for Numeric<F> {
    fn from(v: i64) -> Self {
        Numeric::Int(v)
    }
}

impl<F: Real> From<bool> for Numeric<F> {
    fn from(v: bool) -> Self {
        Numeric::Bool(v)
    }
}

impl From<f64> for Numeric<f64> {
    fn from(v: f64) -> Self {
        Numeric::Float(v)
    }
}

impl From<f32> for Numeric<f32> {
    fn from(v: f32) -> Self {
        Numeric::Float(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_equality_crosses_representations() {
        let a: Numeric = Numeric::Int(3);
        assert!(a.value_eq(&Numeric::Float(3.0)));
        assert!(Numeric::<f64>::Bool(true).value_eq(&Numeric::Int(1)));
        assert_ne!(a, Numeric::Float(3.0));
    }

    #[test]
    fn exact_integer_view() {
        assert_eq!(Numeric::<f64>::Float(4.0).as_exact_i64(), Some(4));
        assert_eq!(Numeric::<f64>::Float(4.5).as_exact_i64(), None);
        assert_eq!(Numeric::<f32>::Float(2.0).as_exact_i64(), Some(2));
    }

    #[test]
    fn display_keeps_float_marker() {
        assert_eq!(Numeric::<f64>::Float(2.0).to_string(), "2.0");
        assert_eq!(Numeric::<f64>::Float(f64::NEG_INFINITY).to_string(), "-Inf");
        assert_eq!(Numeric::<f64>::Float(0.1).to_string(), "0.1");
    }
}
