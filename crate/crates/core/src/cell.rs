//! The per-slot element abstraction shared by concrete and symbolic evaluation.

use std::fmt;
use std::hash::Hash;

use crate::elementary::{rand_from_unit, Elementary};
use crate::error::{Error, Result};
use crate::scalar::{Numeric, Real};
use crate::space::{SpaceId, TypeSpace};
use crate::value::ToL;

/// What a ToL slot holds. Implemented by concrete numerics and by the symbolic
/// cells used for lowering.
pub trait Cell: Clone + fmt::Debug + fmt::Display + PartialEq + Eq + Hash + Send + Sync + 'static {
    fn constant(n: Numeric) -> Self;

    /// The value of this cell when it is known without inputs.
    fn to_constant(&self) -> Option<Numeric>;

    fn apply(f: Elementary, args: &[Self]) -> Result<Self>;

    fn rand(bound: &Self, unit: f64) -> Result<Self>;

    fn default_space(&self) -> SpaceId;

    fn convert(&self, space: &TypeSpace) -> Result<Self>;

    /// `then` when `a` and `b` differ in value, `otherwise` when they are equal.
    fn select_if_ne(a: &Self, b: &Self, then: Self, otherwise: Self) -> Result<Self>;

    /// `options[selector - 1]`.
    fn mux(selector: &Self, options: &[Self]) -> Result<Self>;

    fn shape_cells(t: &ToL<Self>) -> Vec<Self> {
        t.shape().iter().map(|&d| Self::constant(Numeric::Int(d as i64))).collect()
    }

    fn dim_cell(t: &ToL<Self>) -> Self {
        Self::constant(Numeric::Int(t.dim() as i64))
    }

    fn capacity_cell(t: &ToL<Self>) -> Self {
        Self::constant(Numeric::Int(t.capacity() as i64))
    }
}

impl<F: Real> Cell for Numeric<F> {
    fn constant(n: Numeric) -> Self {
        n.cast()
    }

    fn to_constant(&self) -> Option<Numeric> {
        Some(self.cast())
    }

    fn apply(f: Elementary, args: &[Self]) -> Result<Self> {
        f.apply(args)
    }

    fn rand(bound: &Self, unit: f64) -> Result<Self> {
        rand_from_unit(bound, unit)
    }

    fn default_space(&self) -> SpaceId {
        SpaceId::default_of(self)
    }

    fn convert(&self, space: &TypeSpace) -> Result<Self> {
        space.convert(self)
    }

    fn select_if_ne(a: &Self, b: &Self, then: Self, otherwise: Self) -> Result<Self> {
        Ok(if a.value_eq(b) { otherwise } else { then })
    }

    fn mux(selector: &Self, options: &[Self]) -> Result<Self> {
        let k = selector
            .as_exact_i64()
            .ok_or_else(|| Error::Index(format!("{selector} is not an integer index")))?;
        usize::try_from(k)
            .ok()
            .filter(|&k| k >= 1)
            .and_then(|k| options.get(k - 1))
            .cloned()
            .ok_or_else(|| Error::Index(format!("index {k} outside 1..={}", options.len())))
    }
}
