//! Type spaces and type lists.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{Numeric, Real};

/// Predefined type spaces. `Char` is an extension housing character literals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceId {
    B,
    N,
    NStar,
    Z,
    ZStar,
    ZPlus,
    ZMinus,
    Q,
    QStar,
    QPlus,
    QMinus,
    R,
    RStar,
    RPlus,
    RMinus,
    I,
    C,
    Char,
}

impl SpaceId {
    pub const ALL: [SpaceId; 18] = [
        SpaceId::B,
        SpaceId::N,
        SpaceId::NStar,
        SpaceId::Z,
        SpaceId::ZStar,
        SpaceId::ZPlus,
        SpaceId::ZMinus,
        SpaceId::Q,
        SpaceId::QStar,
        SpaceId::QPlus,
        SpaceId::QMinus,
        SpaceId::R,
        SpaceId::RStar,
        SpaceId::RPlus,
        SpaceId::RMinus,
        SpaceId::I,
        SpaceId::C,
        SpaceId::Char,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpaceId::B => "B",
            SpaceId::N => "N",
            SpaceId::NStar => "N*",
            SpaceId::Z => "Z",
            SpaceId::ZStar => "Z*",
            SpaceId::ZPlus => "Z+",
            SpaceId::ZMinus => "Z-",
            SpaceId::Q => "Q",
            SpaceId::QStar => "Q*",
            SpaceId::QPlus => "Q+",
            SpaceId::QMinus => "Q-",
            SpaceId::R => "R",
            SpaceId::RStar => "R*",
            SpaceId::RPlus => "R+",
            SpaceId::RMinus => "R-",
            SpaceId::I => "I",
            SpaceId::C => "C",
            SpaceId::Char => "CHAR",
        }
    }

    /// Spaces whose numerics are stored as integers.
    pub fn is_integral(self) -> bool {
        use SpaceId::*;
        matches!(self, B | N | NStar | Z | ZStar | ZPlus | ZMinus)
    }

    /// Spaces that cannot be evaluated at runtime (complex, imaginary).
    pub fn is_complex(self) -> bool {
        matches!(self, SpaceId::I | SpaceId::C)
    }

    fn sign_ok(self, v: f64) -> bool {
        use SpaceId::*;
        match self {
            NStar | ZPlus | QPlus | RPlus => v > 0.0,
            ZMinus | QMinus | RMinus => v < 0.0,
            ZStar | QStar | RStar => v != 0.0,
            N => v >= 0.0,
            _ => true,
        }
    }

    /// Decidable membership test.
    pub fn contains<F: Real>(self, x: &Numeric<F>) -> bool {
        use SpaceId::*;
        if let Numeric::Char(_) = x {
            return self == Char;
        }
        let Some(v) = x.as_f64() else { return false };
        match self {
            Char | I | C => false,
            B => v == 0.0 || v == 1.0,
            N | NStar | Z | ZStar | ZPlus | ZMinus => {
                x.as_exact_i64().is_some() && self.sign_ok(v)
            }
            Q | QStar | QPlus | QMinus => v.is_finite() && self.sign_ok(v),
            R | RStar | RPlus | RMinus => !v.is_nan() && self.sign_ok(v),
        }
    }

    /// Default (narrowest standard) space of a single numeric.
    pub fn default_of<F: Real>(x: &Numeric<F>) -> SpaceId {
        match *x {
            Numeric::Bool(_) => SpaceId::B,
            Numeric::Int(i) if i > 0 => SpaceId::N,
            Numeric::Int(_) => SpaceId::Z,
            Numeric::Float(_) => SpaceId::R,
            Numeric::Char(_) => SpaceId::Char,
        }
    }

    fn rank(self) -> Option<u8> {
        use SpaceId::*;
        match self {
            B => Some(0),
            N | NStar | ZPlus => Some(1),
            Z | ZStar | ZMinus => Some(2),
            Q | QStar | QPlus | QMinus => Some(3),
            R | RStar | RPlus | RMinus => Some(4),
            I | C => Some(5),
            Char => None,
        }
    }

    /// Least standard space containing both (None when mixing characters and numbers).
    pub fn join(self, other: SpaceId) -> Option<SpaceId> {
        if self == other {
            return Some(self);
        }
        let r = self.rank()?.max(other.rank()?);
        Some(match r {
            0 => SpaceId::B,
            1 => SpaceId::N,
            2 => SpaceId::Z,
            3 => SpaceId::Q,
            4 => SpaceId::R,
            _ => SpaceId::C,
        })
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpaceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SpaceId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Conversion(format!("unknown type space `{s}`")))
    }
}

/// A type space, optionally restricted to `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypeSpace {
    pub id: SpaceId,
    pub bounds: Option<(f64, f64)>,
}

impl TypeSpace {
    pub fn new(id: SpaceId) -> Self {
        TypeSpace { id, bounds: None }
    }

    pub fn bounded(id: SpaceId, lower: f64, upper: f64) -> Result<Self> {
        if !(lower <= upper) {
            return Err(Error::Conversion(format!(
                "bounds [{lower}, {upper}] of space {id} are not ordered"
            )));
        }
        Ok(TypeSpace { id, bounds: Some((lower, upper)) })
    }

    pub fn contains<F: Real>(&self, x: &Numeric<F>) -> bool {
        if !self.id.contains(x) {
            return false;
        }
        match (self.bounds, x.as_f64()) {
            (Some((lo, hi)), Some(v)) => lo <= v && v <= hi,
            _ => true,
        }
    }

    /// Casts a numeric into this space, failing when the value is not a member.
    pub fn convert<F: Real>(&self, x: &Numeric<F>) -> Result<Numeric<F>> {
        let fail = || Error::Conversion(format!("{x} is not a member of {self}"));
        if self.id.is_complex() {
            return Err(Error::Domain(format!("space {} is not supported at runtime", self.id)));
        }
        let out = match self.id {
            SpaceId::Char => match x {
                Numeric::Char(_) => *x,
                _ => return Err(fail()),
            },
            SpaceId::B => Numeric::Bool(x.as_bool().ok_or_else(fail)?),
            id if id.is_integral() => Numeric::Int(x.as_exact_i64().ok_or_else(fail)?),
            _ => Numeric::Float(x.as_real().ok_or_else(fail)?),
        };
        if self.contains(&out) {
            Ok(out)
        } else {
            Err(fail())
        }
    }
}

impl From<SpaceId> for TypeSpace {
    fn from(id: SpaceId) -> Self {
        TypeSpace::new(id)
    }
}

impl fmt::Display for TypeSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bounds {
            Some((lo, hi)) => write!(f, "{} [{lo}, {hi}]", self.id),
            None => write!(f, "{}", self.id),
        }
    }
}

/// Ordered type spaces of the slots of a list; its length is the capacity.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeList(Vec<TypeSpace>);

impl TypeList {
    pub fn new(spaces: Vec<TypeSpace>) -> Result<Self> {
        if spaces.is_empty() {
            return Err(Error::TypeListMismatch("a type list needs capacity >= 1".into()));
        }
        Ok(TypeList(spaces))
    }

    pub fn of(ids: &[SpaceId]) -> Self {
        assert!(!ids.is_empty(), "empty type list");
        TypeList(ids.iter().copied().map(TypeSpace::new).collect())
    }

    pub fn single(id: SpaceId) -> Self {
        TypeList(vec![TypeSpace::new(id)])
    }

    pub fn capacity(&self) -> usize {
        self.0.len()
    }

    pub fn spaces(&self) -> &[TypeSpace] {
        &self.0
    }

    pub fn ids(&self) -> Vec<SpaceId> {
        self.0.iter().map(|s| s.id).collect()
    }

    pub fn get(&self, slot: usize) -> Option<&TypeSpace> {
        self.0.get(slot)
    }

    pub fn concat(&self, other: &TypeList) -> TypeList {
        TypeList(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn repeat(&self, n: usize) -> TypeList {
        TypeList(self.0.iter().copied().cycle().take(self.0.len() * n).collect())
    }

    /// Slot-wise least common space; bounds are dropped where the spaces differ.
    pub fn join(&self, other: &TypeList) -> Result<TypeList> {
        if self.capacity() != other.capacity() {
            return Err(Error::TypeListMismatch(format!(
                "capacities {} and {} differ",
                self.capacity(),
                other.capacity()
            )));
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| {
                if a == b {
                    return Ok(*a);
                }
                a.id.join(b.id).map(TypeSpace::new).ok_or_else(|| {
                    Error::TypeListMismatch(format!("cannot join spaces {a} and {b}"))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(TypeList)
    }
}

impl fmt::Display for TypeList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}
