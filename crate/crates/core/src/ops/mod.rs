//! The primitive operators at the value level.

pub mod lower;

use std::collections::HashMap;

use crate::cell::Cell;
use crate::elementary::{Elementary, FnExpr};
use crate::error::{Error, Result};
use crate::scalar::Numeric;
use crate::space::TypeList;
use crate::value::{count_of, infer_type_list, ToL};

pub fn op_shape<C: Cell>(t: &ToL<C>) -> Result<ToL<C>> {
    t.norm()
}

pub fn op_dim<C: Cell>(t: &ToL<C>) -> Result<C> {
    if t.dim() == 0 {
        return Err(Error::DegenerateShape("a dimension-0 value has no shape".into()));
    }
    Ok(C::dim_cell(t))
}

pub fn op_capacity<C: Cell>(t: &ToL<C>) -> C {
    t.norm_capacity()
}

pub fn op_vol<C: Cell>(t: &ToL<C>) -> C {
    C::constant(Numeric::Int(t.volume() as i64))
}

/// The default type list of the contents.
pub fn op_space<C: Cell>(t: &ToL<C>) -> TypeList {
    if t.is_empty() {
        return t.type_list().clone();
    }
    infer_type_list(t.capacity(), t.data())
}

pub fn op_convert<C: Cell>(t: &ToL<C>, tl: &TypeList) -> Result<ToL<C>> {
    if tl.capacity() != t.capacity() {
        return Err(Error::TypeListMismatch(format!(
            "cannot convert capacity {} to type list {tl}",
            t.capacity()
        )));
    }
    let k = t.capacity();
    let data = t
        .data()
        .iter()
        .enumerate()
        .map(|(i, c)| c.convert(&tl.spaces()[i % k]))
        .collect::<Result<Vec<_>>>()?;
    ToL::new(tl.clone(), t.shape().to_vec(), data)
}

fn check_prefix<C: Cell>(t: &ToL<C>, a: &[usize]) -> Result<()> {
    if a.len() > t.dim() {
        return Err(Error::Index(format!(
            "coordinate {a:?} is longer than the dimension {} of the value",
            t.dim()
        )));
    }
    for (i, (&x, &d)) in a.iter().zip(t.shape()).enumerate() {
        if x < 1 || x > d {
            return Err(Error::Index(format!("coordinate {a:?} entry {} outside 1..={d}", i + 1)));
        }
    }
    Ok(())
}

/// `t[a]`: a full coordinate gives the list member, a shorter one the sub-ToL
/// spanned by the remaining dimensions.
pub fn op_part<C: Cell>(t: &ToL<C>, a: &[usize]) -> Result<ToL<C>> {
    check_prefix(t, a)?;
    if a.len() == t.dim() {
        return t.member(a);
    }
    op_part_block(t, a, a).and_then(|b| {
        let shape = t.shape()[a.len()..].to_vec();
        b.with_shape(shape)
    })
}

/// Inclusive hyper-rectangle `[a..b]`; unlisted trailing dimensions are kept whole.
pub fn op_part_block<C: Cell>(t: &ToL<C>, a: &[usize], b: &[usize]) -> Result<ToL<C>> {
    if a.len() != b.len() {
        return Err(Error::Index(format!("corners {a:?} and {b:?} differ in length")));
    }
    check_prefix(t, a)?;
    check_prefix(t, b)?;
    if a.iter().zip(b).any(|(x, y)| x > y) {
        return Err(Error::Index(format!("corner {a:?} exceeds corner {b:?}")));
    }
    let mut lo: Vec<usize> = a.to_vec();
    let mut hi: Vec<usize> = b.to_vec();
    for &d in &t.shape()[a.len()..] {
        lo.push(1);
        hi.push(d);
    }
    let shape: Vec<usize> = lo.iter().zip(&hi).map(|(x, y)| y + 1 - x).collect();
    let k = t.capacity();
    let mut data = Vec::with_capacity(count_of(&shape) * k);
    for rel in crate::value::Coords::new(&shape) {
        let abs: Vec<usize> = rel.iter().zip(&lo).map(|(r, l)| r + l - 1).collect();
        data.extend_from_slice(t.list_at(t.offset(&abs)?));
    }
    ToL::new(t.type_list().clone(), shape, data)
}

pub fn op_part_slot<C: Cell>(t: &ToL<C>, j: usize) -> Result<ToL<C>> {
    t.member_slot(j)
}

/// Rearranges the coordinates of one dimension. `d` counts from the innermost
/// dimension: `d = 1` is the last axis.
pub fn op_swap<C: Cell>(t: &ToL<C>, d: usize, perm: &[usize]) -> Result<ToL<C>> {
    let n = t.dim();
    if d < 1 || d > n {
        return Err(Error::Index(format!("swap dimension {d} outside 1..={n}")));
    }
    let axis = n - d;
    let len = t.shape()[axis];
    let mut seen = vec![false; len];
    if perm.len() != len || perm.iter().any(|&x| x < 1 || x > len || std::mem::replace(&mut seen[x - 1], true)) {
        return Err(Error::NotAPermutation(format!("{perm:?} is not a permutation of 1..={len}")));
    }
    let k = t.capacity();
    let mut data = Vec::with_capacity(t.volume());
    for mut c in t.coords() {
        c[axis] = perm[c[axis] - 1];
        data.extend_from_slice(t.list_at(t.offset(&c)?));
    }
    debug_assert_eq!(data.len(), t.count() * k);
    ToL::new(t.type_list().clone(), t.shape().to_vec(), data)
}

/// Resolves a target shape with at most one `-1` entry.
pub fn infer_shape(count: usize, target: &[i64]) -> Result<Vec<usize>> {
    let infer: Vec<usize> = target.iter().enumerate().filter(|(_, &x)| x == -1).map(|(i, _)| i).collect();
    if infer.len() > 1 {
        return Err(Error::MultipleInfer);
    }
    if let Some(&bad) = target.iter().find(|&&x| x < -1) {
        return Err(Error::VolumeMismatch(format!("negative extent {bad} in {target:?}")));
    }
    let known: usize = target.iter().filter(|&&x| x >= 0).map(|&x| x as usize).product();
    let mut shape: Vec<usize> = target.iter().map(|&x| x.max(0) as usize).collect();
    if let Some(&i) = infer.first() {
        if known == 0 || count % known != 0 {
            return Err(Error::VolumeMismatch(format!("cannot infer {target:?} for {count} lists")));
        }
        shape[i] = count / known;
    } else if known != count {
        return Err(Error::VolumeMismatch(format!("{target:?} does not hold {count} lists")));
    }
    Ok(shape)
}

pub fn op_reshape<C: Cell>(t: &ToL<C>, target: &[i64]) -> Result<ToL<C>> {
    let shape = infer_shape(t.count(), target)?;
    t.clone().with_shape(shape)
}

/// Folds the last dimension into the lists.
pub fn op_tile<C: Cell>(t: &ToL<C>) -> Result<ToL<C>> {
    let n = t.dim();
    if n == 0 || t.shape()[n - 1] == 0 {
        return Err(Error::DegenerateShape("tile needs a non-empty last dimension".into()));
    }
    let last = t.shape()[n - 1];
    let tl = t.type_list().repeat(last);
    ToL::new(tl, t.shape()[..n - 1].to_vec(), t.data().to_vec())
}

/// Maps `f` over every list. Results must agree in shape and capacity; the
/// output shape is the mapped shape followed by the result shape.
pub fn op_map<C: Cell>(
    t: &ToL<C>,
    mut f: impl FnMut(ToL<C>, &[usize]) -> Result<ToL<C>>,
) -> Result<ToL<C>> {
    let mut out: Vec<C> = Vec::new();
    let mut inner: Option<(Vec<usize>, usize)> = None;
    let mut tl: Option<TypeList> = None;
    for (i, c) in t.coords().enumerate() {
        let elem = ToL::new(t.type_list().clone(), vec![], t.list_at(i).to_vec())?;
        let r = f(elem, &c)?;
        match &inner {
            None => inner = Some((r.shape().to_vec(), r.capacity())),
            Some((s, k)) if s.as_slice() == r.shape() && *k == r.capacity() => {}
            Some((s, k)) => {
                return Err(Error::ShapeMismatch(format!(
                    "map results disagree: {s:?} with capacity {k} vs {:?} with capacity {} at {c:?}",
                    r.shape(),
                    r.capacity()
                )))
            }
        }
        tl = Some(match tl {
            None => r.type_list().clone(),
            Some(prev) => prev.join(r.type_list()).unwrap_or_else(|_| r.type_list().clone()),
        });
        out.extend(r.into_data());
    }
    match inner {
        None => Ok(ToL::zeros(t.shape().to_vec())),
        Some((s, _)) => {
            let mut shape = t.shape().to_vec();
            shape.extend(s);
            ToL::new(tl.expect("at least one element"), shape, out)
        }
    }
}

/// Left fold in row-major order; `f(element, accumulator, coordinate)`.
/// Without `init` the first element seeds the accumulator.
pub fn op_reduce<C: Cell>(
    t: &ToL<C>,
    init: Option<ToL<C>>,
    mut f: impl FnMut(ToL<C>, ToL<C>, &[usize]) -> Result<ToL<C>>,
) -> Result<ToL<C>> {
    let mut acc = init;
    for (i, c) in t.coords().enumerate() {
        let elem = ToL::new(t.type_list().clone(), vec![], t.list_at(i).to_vec())?;
        acc = Some(match acc {
            None => elem,
            Some(a) => f(elem, a, &c)?,
        });
    }
    acc.ok_or_else(|| Error::ShapeMismatch("reduce of an empty value needs an initial value".into()))
}

/// Fold that also tracks the 1-based position of the last strict improvement.
/// Returns `(best, index)`; the index is 0 when no element improved on `init`.
pub fn op_reduce_indexed<C: Cell>(
    t: &ToL<C>,
    init: ToL<C>,
    mut f: impl FnMut(ToL<C>, ToL<C>) -> Result<ToL<C>>,
) -> Result<(ToL<C>, C)> {
    if t.capacity() != 1 {
        return Err(Error::TypeListMismatch("an indexed reduce needs capacity 1".into()));
    }
    let mut best = init;
    let mut idx = C::constant(Numeric::Int(0));
    for (i, _) in t.coords().enumerate() {
        let elem = ToL::new(t.type_list().clone(), vec![], t.list_at(i).to_vec())?;
        let next = f(elem, best.clone())?;
        let (Some(n), Some(b)) = (next.single_cell(), best.single_cell()) else {
            return Err(Error::ShapeMismatch("an indexed reduce needs a numeric accumulator".into()));
        };
        idx = C::select_if_ne(n, b, C::constant(Numeric::Int(i as i64 + 1)), idx)?;
        best = next;
    }
    Ok((best, idx))
}

/// Elementwise application with volume-1 arguments broadcast.
pub fn broadcast_apply<C: Cell>(f: Elementary, args: &[&ToL<C>]) -> Result<ToL<C>> {
    let big = args.iter().filter(|a| a.volume() != 1).collect::<Vec<_>>();
    let template: &ToL<C> = match big.first() {
        Some(t) => t,
        None => args.iter().max_by_key(|a| a.dim()).copied().ok_or_else(|| Error::Arity(format!("{f} without arguments")))?,
    };
    for b in &big {
        if b.shape() != template.shape() || b.capacity() != template.capacity() {
            return Err(Error::ShapeMismatch(format!(
                "{f} arguments of shapes {:?} and {:?} (capacities {} and {})",
                template.shape(),
                b.shape(),
                template.capacity(),
                b.capacity()
            )));
        }
    }
    let n = template.volume();
    let mut data = Vec::with_capacity(n);
    let mut buf = Vec::with_capacity(args.len());
    for i in 0..n {
        buf.clear();
        for a in args {
            buf.push(if a.volume() == 1 { a.data()[0].clone() } else { a.data()[i].clone() });
        }
        data.push(C::apply(f, &buf)?);
    }
    ToL::from_cells(template.shape().to_vec(), template.capacity(), data)
}

/// `map` with a function expression applied to every numeric slot.
pub fn map_fnexpr<C: Cell>(
    t: &ToL<C>,
    f: &FnExpr,
    iter: &[String],
    env: &HashMap<String, C>,
) -> Result<ToL<C>> {
    let k = t.capacity();
    let mut data = Vec::with_capacity(t.volume());
    for (i, c) in t.coords().enumerate() {
        for slot in 0..k {
            let x = &t.data()[i * k + slot];
            data.push(f.eval(Some(x), iter, &c, env).map_err(|e| e.in_context(|| format!("at {c:?}")))?);
        }
    }
    ToL::from_cells(t.shape().to_vec(), k, data)
}

/// `reduce` with a basic binary function; the accumulator is the second argument.
pub fn reduce_fn<C: Cell>(t: &ToL<C>, f: Elementary, init: Option<ToL<C>>) -> Result<ToL<C>> {
    op_reduce(t, init, |e, acc, _| broadcast_apply(f, &[&e, &acc]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceId;

    type V = ToL<Numeric>;

    fn ints(shape: &[usize], xs: &[i64]) -> V {
        V::from_i64(shape.to_vec(), xs).unwrap()
    }

    #[test]
    fn swap_permutes_the_innermost_dimension() {
        let t = ints(&[2, 2], &[1, 2, 3, 4]);
        assert_eq!(op_swap(&t, 1, &[2, 1]).unwrap(), ints(&[2, 2], &[2, 1, 4, 3]));
        assert_eq!(op_swap(&t, 2, &[2, 1]).unwrap(), ints(&[2, 2], &[3, 4, 1, 2]));
        assert_eq!(op_swap(&t, 1, &[1, 2]).unwrap(), t);
        assert!(matches!(op_swap(&t, 1, &[1, 1]), Err(Error::NotAPermutation(_))));
        assert!(matches!(op_swap(&t, 3, &[1, 2]), Err(Error::Index(_))));
    }

    #[test]
    fn reshape_and_infer() {
        let t = ints(&[3, 2], &[1, 2, 3, 4, 5, 6]);
        assert_eq!(op_reshape(&t, &[2, 3]).unwrap().to_string(), "[[1,2,3],[4,5,6]]");
        assert_eq!(op_reshape(&t, &[-1]).unwrap(), ints(&[6], &[1, 2, 3, 4, 5, 6]));
        assert!(matches!(op_reshape(&t, &[-1, -1]), Err(Error::MultipleInfer)));
        assert!(matches!(op_reshape(&t, &[4]), Err(Error::VolumeMismatch(_))));
    }

    #[test]
    fn part_forms() {
        let t = ints(&[3, 3], &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        assert_eq!(op_part(&t, &[2, 2]).unwrap(), V::scalar(Numeric::Int(5)));
        assert_eq!(op_part(&t, &[2]).unwrap(), ints(&[3], &[4, 5, 6]));
        assert_eq!(op_part_block(&t, &[1, 1], &[2, 2]).unwrap(), ints(&[2, 2], &[1, 2, 4, 5]));
        assert_eq!(op_part_block(&t, &[1, 1], &[3, 3]).unwrap(), t);
        assert_eq!(op_part_block(&t, &[2], &[3]).unwrap(), ints(&[2, 3], &[4, 5, 6, 7, 8, 9]));
        assert!(op_part(&t, &[4, 1]).is_err());
    }

    #[test]
    fn tile_folds_last_dimension() {
        let data = [(1, 'a'), (2, 'b'), (3, 'c'), (4, 'd')]
            .iter()
            .flat_map(|&(i, c)| [Numeric::Int(i), Numeric::Char(c)])
            .collect();
        let t = V::from_cells(vec![2, 2], 2, data).unwrap();
        let r = op_tile(&t).unwrap();
        assert_eq!(r.to_string(), "[(1,'a',2,'b'),(3,'c',4,'d')]");
        assert_eq!(r.capacity(), 4);
        assert_eq!(op_tile(&ints(&[1], &[5])).unwrap(), V::scalar(Numeric::Int(5)));
    }

    #[test]
    fn map_and_reduce() {
        let v = V::from_f64(vec![3], &[1.0, 2.0, 3.0]).unwrap();
        let r = map_fnexpr(&v, &FnExpr::apply(Elementary::Sqrt, vec![FnExpr::Star]), &[], &HashMap::new()).unwrap();
        assert_eq!(r.data()[1], Numeric::Float(2f64.sqrt()));
        let s = reduce_fn(&ints(&[5], &[1, 2, 3, 4, 5]), Elementary::Add, Some(V::scalar(Numeric::Int(0)))).unwrap();
        assert_eq!(s, V::scalar(Numeric::Int(15)));
        let m = reduce_fn(&ints(&[3], &[1, 5, 3]), Elementary::Max, Some(V::scalar(Numeric::Float(f64::NEG_INFINITY)))).unwrap();
        assert_eq!(m.data()[0].as_f64(), Some(5.0));
        let d = reduce_fn(&ints(&[3], &[1, 2, 3]), Elementary::Sub, Some(V::scalar(Numeric::Int(0)))).unwrap();
        // sub(3, sub(2, sub(1, 0)))
        assert_eq!(d, V::scalar(Numeric::Int(2)));
    }

    #[test]
    fn coordinate_map() {
        let z = V::zeros(vec![2, 2]);
        let f = FnExpr::apply(Elementary::Add, vec![FnExpr::var("i"), FnExpr::var("j")]);
        let r = map_fnexpr(&z, &f, &["i".into(), "j".into()], &HashMap::new()).unwrap();
        assert_eq!(r, ints(&[2, 2], &[2, 3, 3, 4]));
    }

    #[test]
    fn indexed_reduce_keeps_first_best() {
        let v = ints(&[4], &[3, 7, 7, 1]);
        let (best, idx) = op_reduce_indexed(&v, V::scalar(Numeric::Float(f64::NEG_INFINITY)), |e, a| {
            broadcast_apply(Elementary::Max, &[&e, &a])
        })
        .unwrap();
        assert_eq!(best.data()[0].as_f64(), Some(7.0));
        assert_eq!(idx, Numeric::Int(2));
    }

    #[test]
    fn space_and_convert() {
        let l = V::list(vec![Numeric::Int(0), Numeric::Float(3.0), Numeric::Int(1)]).unwrap();
        assert_eq!(op_space(&l).ids(), vec![SpaceId::Z, SpaceId::R, SpaceId::N]);
        let b = V::from_cells(vec![2], 1, vec![Numeric::Bool(true), Numeric::Bool(false)]).unwrap();
        assert_eq!(op_space(&b).ids(), vec![SpaceId::B]);
        let m = ints(&[2, 2], &[1, 2, 3, 4]);
        let r = op_convert(&m, &TypeList::single(SpaceId::R)).unwrap();
        assert_eq!(r, V::from_f64(vec![2, 2], &[1.0, 2.0, 3.0, 4.0]).unwrap());
        assert!(matches!(op_convert(&ints(&[1], &[-1]), &TypeList::single(SpaceId::N)), Err(Error::Conversion(_))));
    }
}
