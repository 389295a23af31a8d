//! Tensors of lists and the five atomic computations on them.

use std::fmt;
use std::hash::{Hash, Hasher};

use crate::cell::Cell;
use crate::error::{Error, Result};
use crate::scalar::{Numeric, Real};
use crate::space::{SpaceId, TypeList};

/// Coordinates are 1-based.
pub type Coord = Vec<usize>;

/// An n-dimensional array of fixed-capacity lists, stored row-major with the
/// slots of each list contiguous.
#[derive(Clone, Debug)]
pub struct ToL<C = Numeric> {
    type_list: TypeList,
    shape: Vec<usize>,
    data: Vec<C>,
}

pub fn count_of(shape: &[usize]) -> usize {
    shape.iter().product()
}

fn show_shape(shape: &[usize]) -> String {
    format!("{shape:?}")
}

/// Slot-wise least common default space of `data`.
pub fn infer_type_list<C: Cell>(capacity: usize, data: &[C]) -> TypeList {
    let mut ids: Vec<Option<SpaceId>> = vec![None; capacity];
    for (i, c) in data.iter().enumerate() {
        let slot = &mut ids[i % capacity];
        let s = c.default_space();
        *slot = Some(match *slot {
            None => s,
            Some(prev) => prev.join(s).unwrap_or(SpaceId::R),
        });
    }
    TypeList::of(&ids.into_iter().map(|s| s.unwrap_or(SpaceId::Z)).collect::<Vec<_>>())
}

impl<C: Cell> ToL<C> {
    pub fn new(type_list: TypeList, shape: Vec<usize>, data: Vec<C>) -> Result<Self> {
        let expected = count_of(&shape) * type_list.capacity();
        if data.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "shape {} with capacity {} needs {expected} numerics, got {}",
                show_shape(&shape),
                type_list.capacity(),
                data.len()
            )));
        }
        Ok(ToL { type_list, shape, data })
    }

    /// Builds a value whose type list is inferred from its contents.
    pub fn from_cells(shape: Vec<usize>, capacity: usize, data: Vec<C>) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::TypeListMismatch("a list needs capacity >= 1".into()));
        }
        let tl = infer_type_list(capacity, &data);
        ToL::new(tl, shape, data)
    }

    pub fn scalar(c: C) -> Self {
        let tl = TypeList::single(c.default_space());
        ToL { type_list: tl, shape: vec![], data: vec![c] }
    }

    /// A bare list (dimension 0).
    pub fn list(cells: Vec<C>) -> Result<Self> {
        let k = cells.len();
        ToL::from_cells(vec![], k, cells)
    }

    pub fn vector(cells: Vec<C>) -> Self {
        let n = cells.len();
        ToL::from_cells(vec![n], 1, cells).expect("capacity 1")
    }

    /// Zero-filled integer value of the given shape.
    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = count_of(&shape);
        ToL { type_list: TypeList::single(SpaceId::Z), shape, data: vec![C::constant(Numeric::Int(0)); n] }
    }

    pub fn type_list(&self) -> &TypeList {
        &self.type_list
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[C] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn capacity(&self) -> usize {
        self.type_list.capacity()
    }

    /// Number of lists.
    pub fn count(&self) -> usize {
        count_of(&self.shape)
    }

    /// Total number of numerics: product of the dims times the capacity.
    pub fn volume(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// The single cell of a volume-1 value.
    pub fn single_cell(&self) -> Option<&C> {
        (self.data.len() == 1).then(|| &self.data[0])
    }

    pub fn list_at(&self, index: usize) -> &[C] {
        let k = self.capacity();
        &self.data[index * k..(index + 1) * k]
    }

    pub fn lists(&self) -> impl Iterator<Item = &[C]> {
        self.data.chunks(self.capacity())
    }

    pub fn with_type_list(mut self, tl: TypeList) -> Result<Self> {
        if tl.capacity() != self.capacity() {
            return Err(Error::TypeListMismatch(format!(
                "capacity {} does not match type list {tl}",
                self.capacity()
            )));
        }
        self.type_list = tl;
        Ok(self)
    }

    /// Same data under a new shape of equal count.
    pub fn with_shape(self, shape: Vec<usize>) -> Result<Self> {
        if count_of(&shape) != self.count() {
            return Err(Error::VolumeMismatch(format!(
                "cannot view shape {} as {}",
                show_shape(&self.shape),
                show_shape(&shape)
            )));
        }
        Ok(ToL { shape, ..self })
    }

    /// Row-major list index of a full coordinate.
    pub fn offset(&self, coord: &[usize]) -> Result<usize> {
        if coord.len() != self.dim() {
            return Err(Error::Index(format!(
                "coordinate {coord:?} has {} entries, value has dimension {}",
                coord.len(),
                self.dim()
            )));
        }
        let mut idx = 0;
        for (&c, &d) in coord.iter().zip(&self.shape) {
            if c < 1 || c > d {
                return Err(Error::Index(format!(
                    "coordinate {coord:?} outside shape {}",
                    show_shape(&self.shape)
                )));
            }
            idx = idx * d + (c - 1);
        }
        Ok(idx)
    }

    pub fn coords(&self) -> Coords {
        Coords::new(&self.shape)
    }

    /// The cell at a coordinate and 1-based slot.
    pub fn get(&self, coord: &[usize], slot: usize) -> Result<&C> {
        let i = self.offset(coord)?;
        if slot < 1 || slot > self.capacity() {
            return Err(Error::Index(format!("slot {slot} outside 1..={}", self.capacity())));
        }
        Ok(&self.list_at(i)[slot - 1])
    }

    /// The shape vector `‖t‖`.
    pub fn norm(&self) -> Result<ToL<C>> {
        if self.dim() == 0 {
            return Err(Error::DegenerateShape("the norm of a dimension-0 value is undefined".into()));
        }
        let cells = C::shape_cells(self);
        Ok(ToL { type_list: TypeList::single(SpaceId::N), shape: vec![cells.len()], data: cells })
    }

    /// The capacity `‖t‖'`.
    pub fn norm_capacity(&self) -> C {
        C::capacity_cell(self)
    }

    /// The list at a full coordinate, as a dimension-0 value.
    pub fn member(&self, coord: &[usize]) -> Result<ToL<C>> {
        let i = self.offset(coord)?;
        Ok(ToL { type_list: self.type_list.clone(), shape: vec![], data: self.list_at(i).to_vec() })
    }

    /// Projection onto slot `j` of every list.
    pub fn member_slot(&self, j: usize) -> Result<ToL<C>> {
        let k = self.capacity();
        if j < 1 || j > k {
            return Err(Error::Index(format!("slot {j} outside 1..={k}")));
        }
        let tl = TypeList::new(vec![self.type_list.spaces()[j - 1]])?;
        let data = self.data.iter().skip(j - 1).step_by(k).cloned().collect();
        Ok(ToL { type_list: tl, shape: self.shape.clone(), data })
    }

    /// Concatenation along the last dimension.
    pub fn join_last(&self, other: &ToL<C>) -> Result<ToL<C>> {
        let (n, m) = (self.dim(), other.dim());
        if n == 0 || n != m || self.shape[..n - 1] != other.shape[..n - 1] {
            return Err(Error::ShapeMismatch(format!(
                "cannot join shapes {} and {} along the last dimension",
                show_shape(&self.shape),
                show_shape(&other.shape)
            )));
        }
        let tl = self.type_list.join(&other.type_list)?;
        let k = self.capacity();
        let (a, b) = (self.shape[n - 1] * k, other.shape[n - 1] * k);
        let rows = count_of(&self.shape[..n - 1]);
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for r in 0..rows {
            data.extend_from_slice(&self.data[r * a..(r + 1) * a]);
            data.extend_from_slice(&other.data[r * b..(r + 1) * b]);
        }
        let mut shape = self.shape.clone();
        shape[n - 1] += other.shape[n - 1];
        Ok(ToL { type_list: tl, shape, data })
    }

    /// Per-coordinate list concatenation.
    pub fn join_list(&self, other: &ToL<C>) -> Result<ToL<C>> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "cannot join lists of shapes {} and {}",
                show_shape(&self.shape),
                show_shape(&other.shape)
            )));
        }
        let tl = self.type_list.concat(&other.type_list);
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for (x, y) in self.lists().zip(other.lists()) {
            data.extend_from_slice(x);
            data.extend_from_slice(y);
        }
        Ok(ToL { type_list: tl, shape: self.shape.clone(), data })
    }

    /// Appends a trailing dimension of extent 1.
    pub fn embed(&self) -> ToL<C> {
        let mut shape = self.shape.clone();
        shape.push(1);
        ToL { type_list: self.type_list.clone(), shape, data: self.data.clone() }
    }

    /// Applies `f` to every cell, keeping shape and capacity.
    pub fn map_cells(&self, mut f: impl FnMut(&C) -> Result<C>) -> Result<ToL<C>> {
        let data = self.data.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        ToL::from_cells(self.shape.clone(), self.capacity(), data)
    }
}

pub fn atomic_norm<C: Cell>(t: &ToL<C>) -> Result<ToL<C>> {
    t.norm()
}

pub fn atomic_capacity<C: Cell>(t: &ToL<C>) -> C {
    t.norm_capacity()
}

pub fn atomic_member<C: Cell>(t: &ToL<C>, c: &[usize]) -> Result<ToL<C>> {
    t.member(c)
}

pub fn atomic_member_slot<C: Cell>(t: &ToL<C>, j: usize) -> Result<ToL<C>> {
    t.member_slot(j)
}

pub fn atomic_join_last<C: Cell>(a: &ToL<C>, b: &ToL<C>) -> Result<ToL<C>> {
    a.join_last(b)
}

pub fn atomic_join_list<C: Cell>(a: &ToL<C>, b: &ToL<C>) -> Result<ToL<C>> {
    a.join_list(b)
}

pub fn atomic_embed<C: Cell>(t: &ToL<C>) -> ToL<C> {
    t.embed()
}

/// Content equality: shape, capacity and cells. Declared spaces are ignored.
impl<C: Cell> PartialEq for ToL<C> {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.capacity() == other.capacity() && self.data == other.data
    }
}

impl<C: Cell> Eq for ToL<C> {}

impl<C: Cell> Hash for ToL<C> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.shape.hash(state);
        self.capacity().hash(state);
        self.data.hash(state);
    }
}

impl<F: Real> ToL<Numeric<F>> {
    /// Checks the structural invariants and slot membership of every numeric.
    pub fn validate(&self) -> Result<()> {
        if self.data.len() != self.count() * self.capacity() {
            return Err(Error::ShapeMismatch("data length does not match shape".into()));
        }
        for (i, x) in self.data.iter().enumerate() {
            let space = &self.type_list.spaces()[i % self.capacity()];
            if !space.contains(x) {
                return Err(Error::Conversion(format!("{x} is not a member of {space}")));
            }
        }
        Ok(())
    }

    /// Value equality with absolute tolerance on floats; integers compare exactly.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.shape == other.shape
            && self.capacity() == other.capacity()
            && self.data.iter().zip(&other.data).all(|(a, b)| numeric_close(a, b, tol))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|x| x.as_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn cast<G: Real>(&self) -> ToL<Numeric<G>> {
        ToL {
            type_list: self.type_list.clone(),
            shape: self.shape.clone(),
            data: self.data.iter().map(|x| x.cast()).collect(),
        }
    }
}

pub fn numeric_close<F: Real>(a: &Numeric<F>, b: &Numeric<F>, tol: f64) -> bool {
    if a.is_integral() && b.is_integral() {
        return a.value_eq(b);
    }
    match (a.as_f64(), b.as_f64()) {
        (Some(x), Some(y)) if x.is_infinite() || y.is_infinite() => x == y,
        (Some(x), Some(y)) => (x - y).abs() <= tol,
        _ => a == b,
    }
}

impl ToL<Numeric> {
    pub fn from_i64(shape: Vec<usize>, data: &[i64]) -> Result<Self> {
        ToL::from_cells(shape, 1, data.iter().map(|&x| Numeric::Int(x)).collect())
    }

    pub fn from_f64(shape: Vec<usize>, data: &[f64]) -> Result<Self> {
        ToL::from_cells(shape, 1, data.iter().map(|&x| Numeric::Float(x)).collect())
    }
}

/// Row-major enumeration of 1-based coordinates.
pub struct Coords {
    shape: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Coords {
    pub fn new(shape: &[usize]) -> Self {
        let next = if shape.iter().any(|&d| d == 0) { None } else { Some(vec![1; shape.len()]) };
        Coords { shape: shape.to_vec(), next }
    }
}

impl Iterator for Coords {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut n = cur.clone();
        let mut i = n.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if n[i] < self.shape[i] {
                n[i] += 1;
                self.next = Some(n);
                break;
            }
            n[i] = 1;
        }
        Some(cur)
    }
}

impl<C: Cell> fmt::Display for ToL<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<C: Cell>(f: &mut fmt::Formatter<'_>, cells: &[C]) -> fmt::Result {
            if cells.len() == 1 {
                return write!(f, "{}", cells[0]);
            }
            f.write_str("(")?;
            for (i, c) in cells.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")
        }
        fn rec<C: Cell>(f: &mut fmt::Formatter<'_>, t: &ToL<C>, axis: usize, base: usize) -> fmt::Result {
            if axis == t.dim() {
                return list(f, t.list_at(base));
            }
            f.write_str("[")?;
            let d = t.shape[axis];
            let stride = count_of(&t.shape[axis + 1..]);
            for i in 0..d {
                if i > 0 {
                    f.write_str(",")?;
                }
                rec(f, t, axis + 1, base + i * stride)?;
            }
            f.write_str("]")
        }
        if self.count() == 0 {
            return write!(f, "tol{}", show_shape(&self.shape));
        }
        rec(f, self, 0, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type V = ToL<Numeric>;

    fn ints(shape: &[usize], xs: &[i64]) -> V {
        V::from_i64(shape.to_vec(), xs).unwrap()
    }

    fn pairs() -> V {
        // [(1,1.),(2,2.),(3,3.)]
        let data = (1..=3).flat_map(|i| [Numeric::Int(i), Numeric::Float(i as f64)]).collect();
        V::from_cells(vec![3], 2, data).unwrap()
    }

    #[test]
    fn norm_and_capacity_of_pair_vector() {
        let t = pairs();
        assert_eq!(t.norm().unwrap(), ints(&[1], &[3]));
        assert_eq!(t.norm_capacity(), Numeric::Int(2));
        assert_eq!(t.type_list().ids(), vec![SpaceId::N, SpaceId::R]);
    }

    #[test]
    fn norm_of_norm_is_dimension() {
        let m = ints(&[2, 2], &[1, 2, 3, 4]);
        assert_eq!(m.norm().unwrap(), ints(&[2], &[2, 2]));
        assert_eq!(m.norm().unwrap().norm().unwrap(), ints(&[1], &[2]));
        assert_eq!(m.norm_capacity(), Numeric::Int(1));
        assert_eq!(V::scalar(Numeric::Float(3.14)).norm_capacity(), Numeric::Int(1));
        assert!(matches!(V::scalar(Numeric::Int(1)).norm(), Err(Error::DegenerateShape(_))));
    }

    #[test]
    fn member_and_slot() {
        let m = ints(&[2, 2], &[1, 2, 3, 4]);
        assert_eq!(m.member(&[2, 2]).unwrap(), V::scalar(Numeric::Int(4)));
        assert!(matches!(m.member(&[1, 1, 1]), Err(Error::Index(_))));
        assert!(matches!(m.member(&[3, 1]), Err(Error::Index(_))));
        let t = V::from_cells(vec![2], 2, vec![Numeric::Int(1), Numeric::Float(1.0), Numeric::Int(2), Numeric::Float(2.0)]).unwrap();
        assert_eq!(t.member_slot(2).unwrap(), V::from_f64(vec![2], &[1.0, 2.0]).unwrap());
        assert_eq!(m.member_slot(1).unwrap(), m);
        let l = V::list(vec![Numeric::Int(0), Numeric::Float(3.0), Numeric::Int(1)]).unwrap();
        assert!(matches!(l.member_slot(4), Err(Error::Index(_))));
    }

    #[test]
    fn joins() {
        let a = ints(&[3], &[1, 2, 3]);
        let b = ints(&[2], &[1, 2]);
        assert_eq!(a.join_last(&b).unwrap(), ints(&[5], &[1, 2, 3, 1, 2]));
        let c = ints(&[2, 1], &[1, 2]);
        let d = ints(&[2, 1], &[3, 4]);
        assert_eq!(c.join_last(&d).unwrap(), ints(&[2, 2], &[1, 3, 2, 4]));
        assert!(matches!(ints(&[2], &[1, 2]).join_last(&d), Err(Error::ShapeMismatch(_))));

        let l = V::list(vec![Numeric::Int(3), Numeric::Float(0.14)]).unwrap();
        let s = V::scalar(Numeric::Float(3.2));
        let j = l.join_list(&s).unwrap();
        assert_eq!(j, V::list(vec![Numeric::Int(3), Numeric::Float(0.14), Numeric::Float(3.2)]).unwrap());
        let x = ints(&[2], &[1, 2]);
        let y = V::from_f64(vec![2], &[3.0, 4.0]).unwrap();
        assert_eq!(x.join_list(&y).unwrap().to_string(), "[(1,3.0),(2,4.0)]");
        assert!(matches!(x.join_list(&ints(&[1], &[3])), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn embed_appends_unit_dimension() {
        let v = ints(&[3], &[1, 2, 3]);
        assert_eq!(v.embed().to_string(), "[[1],[2],[3]]");
        assert_eq!(ints(&[1], &[5]).embed().embed().to_string(), "[[[5]]]");
        assert_eq!(ints(&[2, 2], &[1, 2, 3, 4]).embed().shape(), &[2, 2, 1]);
    }

    #[test]
    fn coords_are_row_major() {
        let all: Vec<_> = Coords::new(&[2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![1, 1]);
        assert_eq!(all[1], vec![1, 2]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(Coords::new(&[]).count(), 1);
        assert_eq!(Coords::new(&[2, 0]).count(), 0);
    }

    #[test]
    fn validator_rejects_out_of_space_values() {
        let t = ints(&[2], &[-1, 2]).with_type_list(TypeList::single(SpaceId::N)).unwrap();
        assert!(t.validate().is_err());
        assert!(ints(&[2], &[-1, 2]).validate().is_ok());
    }
}
