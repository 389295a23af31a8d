//! JSON tensor files: a type list, a shape and nested data.

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::error::{Error, Result};
use crate::scalar::Numeric;
use crate::space::{SpaceId, TypeList, TypeSpace};
use crate::Value;

pub const TENSOR_FILE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceEntry {
    Name(String),
    Bounded { space: String, bounds: [f64; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorFile {
    #[serde(default = "default_version")]
    pub version: u32,
    pub type_list: Vec<SpaceEntry>,
    pub shape: Vec<usize>,
    pub data: Json,
}

fn default_version() -> u32 {
    TENSOR_FILE_VERSION
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Io(format!("tensor file: {}", msg.into()))
}

fn entry(ts: &TypeSpace) -> SpaceEntry {
    match ts.bounds {
        None => SpaceEntry::Name(ts.id.name().to_string()),
        Some((lo, hi)) => SpaceEntry::Bounded { space: ts.id.name().to_string(), bounds: [lo, hi] },
    }
}

fn space(e: &SpaceEntry) -> Result<TypeSpace> {
    let id = |s: &str| s.parse::<SpaceId>().map_err(|_| bad(format!("unknown space `{s}`")));
    match e {
        SpaceEntry::Name(n) => Ok(TypeSpace::new(id(n)?)),
        SpaceEntry::Bounded { space, bounds } => TypeSpace::bounded(id(space)?, bounds[0], bounds[1]),
    }
}

fn leaf(x: &Numeric<f64>) -> Json {
    match *x {
        Numeric::Bool(b) => Json::Bool(b),
        Numeric::Int(i) => Json::from(i),
        Numeric::Char(c) => Json::String(c.to_string()),
        Numeric::Float(f) if f.is_nan() => Json::String("NaN".into()),
        Numeric::Float(f) if f.is_infinite() => Json::String(if f > 0.0 { "+Inf" } else { "-Inf" }.into()),
        Numeric::Float(f) => Json::from(f),
    }
}

fn read_leaf(j: &Json, ts: &TypeSpace) -> Result<Numeric<f64>> {
    let raw = match j {
        Json::Bool(b) => Numeric::Bool(*b),
        Json::Number(n) => match n.as_i64() {
            Some(i) if !ts.id.is_integral() && ts.id != SpaceId::B => Numeric::Float(i as f64),
            Some(i) => Numeric::Int(i),
            None => Numeric::Float(n.as_f64().ok_or_else(|| bad(format!("number {n} out of range")))?),
        },
        Json::String(s) => match s.as_str() {
            "+Inf" | "Inf" => Numeric::Float(f64::INFINITY),
            "-Inf" => Numeric::Float(f64::NEG_INFINITY),
            "NaN" => Numeric::Float(f64::NAN),
            _ => {
                let mut cs = s.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => Numeric::Char(c),
                    _ => return Err(bad(format!("string leaf `{s}` is neither a character nor an infinity"))),
                }
            }
        },
        other => return Err(bad(format!("unexpected leaf {other}"))),
    };
    ts.convert(&raw).map_err(|e| bad(e.to_string()))
}

impl TensorFile {
    pub fn from_value(v: &Value) -> Self {
        let k = v.capacity();
        let list = |i: usize| {
            let cells = v.list_at(i);
            if k == 1 {
                leaf(&cells[0])
            } else {
                Json::Array(cells.iter().map(leaf).collect())
            }
        };
        fn nest(shape: &[usize], start: usize, stride: usize, list: &dyn Fn(usize) -> Json) -> Json {
            match shape.split_first() {
                None => list(start),
                Some((&d, rest)) => {
                    let inner = stride / d.max(1);
                    Json::Array((0..d).map(|i| nest(rest, start + i * inner, inner, list)).collect())
                }
            }
        }
        let count = v.shape().iter().product::<usize>();
        TensorFile {
            version: TENSOR_FILE_VERSION,
            type_list: v.type_list().spaces().iter().map(entry).collect(),
            shape: v.shape().to_vec(),
            data: nest(v.shape(), 0, count, &list),
        }
    }

    pub fn to_value(&self) -> Result<Value> {
        if self.version != TENSOR_FILE_VERSION {
            return Err(bad(format!("unsupported version {}", self.version)));
        }
        let spaces = self.type_list.iter().map(space).collect::<Result<Vec<_>>>()?;
        let tl = TypeList::new(spaces.clone()).map_err(|e| bad(e.to_string()))?;
        let k = spaces.len();
        let mut cells = Vec::with_capacity(self.shape.iter().product::<usize>() * k);
        fn walk(
            j: &Json,
            shape: &[usize],
            spaces: &[TypeSpace],
            out: &mut Vec<Numeric<f64>>,
            depth: usize,
        ) -> Result<()> {
            match shape.split_first() {
                Some((&d, rest)) => {
                    let xs = j.as_array().ok_or_else(|| bad(format!("expected an array at depth {depth}")))?;
                    if xs.len() != d {
                        return Err(bad(format!("axis {} has {} entries, shape says {d}", depth + 1, xs.len())));
                    }
                    xs.iter().try_for_each(|x| walk(x, rest, spaces, out, depth + 1))
                }
                None if spaces.len() == 1 => {
                    out.push(read_leaf(j, &spaces[0])?);
                    Ok(())
                }
                None => {
                    let xs = j.as_array().ok_or_else(|| bad("expected a list of the type list's capacity"))?;
                    if xs.len() != spaces.len() {
                        return Err(bad(format!("list of length {} for capacity {}", xs.len(), spaces.len())));
                    }
                    xs.iter().zip(spaces).try_for_each(|(x, s)| read_leaf(x, s).map(|c| out.push(c)))
                }
            }
        }
        walk(&self.data, &self.shape, &spaces, &mut cells, 0)?;
        debug_assert_eq!(cells.len() % k.max(1), 0);
        Value::new(tl, self.shape.clone(), cells)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| bad(e.to_string()))
    }

    /// Compact single-line JSON followed by a newline.
    pub fn render(&self) -> String {
        serde_json::to_string(self).expect("tensor file serializes") + "\n"
    }
}

pub fn load_str(text: &str) -> Result<Value> {
    TensorFile::parse(text)?.to_value()
}

pub fn save_string(v: &Value) -> String {
    TensorFile::from_value(v).render()
}

pub fn load(path: &std::path::Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_str(&text)
}

pub fn save(path: &std::path::Path, v: &Value) -> Result<()> {
    std::fs::write(path, save_string(v)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(v: &Value) {
        let text = save_string(v);
        let back = load_str(&text).unwrap();
        assert_eq!(&back, v, "{text}");
        assert_eq!(save_string(&back), text);
    }

    #[test]
    fn integers_and_floats() {
        round_trip(&Value::from_i64(vec![2, 2], &[19, 22, 43, 50]).unwrap());
        round_trip(&Value::from_f64(vec![3], &[0.1, 1.0 / 3.0, 1e-300]).unwrap());
        round_trip(&Value::from_f64(vec![2], &[f64::INFINITY, f64::NEG_INFINITY]).unwrap());
        round_trip(&Value::scalar(Numeric::Float(2.5)));
    }

    #[test]
    fn layout() {
        let v = Value::from_i64(vec![2, 2], &[19, 22, 43, 50]).unwrap();
        assert_eq!(save_string(&v), "{\"version\":1,\"type_list\":[\"N\"],\"shape\":[2,2],\"data\":[[19,22],[43,50]]}\n");
        let f = Value::from_f64(vec![1], &[f64::INFINITY]).unwrap();
        assert!(save_string(&f).contains("[\"+Inf\"]"));
    }

    #[test]
    fn mixed_lists() {
        let tl = TypeList::of(&[SpaceId::B, SpaceId::Z, SpaceId::R, SpaceId::Char]);
        let cells = vec![
            Numeric::Bool(true),
            Numeric::Int(-3),
            Numeric::Float(0.5),
            Numeric::Char('x'),
            Numeric::Bool(false),
            Numeric::Int(7),
            Numeric::Float(-1e10),
            Numeric::Char('é'),
        ];
        let v = Value::new(tl, vec![2], cells).unwrap();
        round_trip(&v);
        assert!(save_string(&v).contains("[[true,-3,0.5,\"x\"],[false,7,-10000000000.0,\"é\"]]"));
    }

    #[test]
    fn bounded_spaces() {
        let tl = TypeList::new(vec![TypeSpace::bounded(SpaceId::R, 0.0, 1.0).unwrap()]).unwrap();
        let v = Value::new(tl, vec![2], vec![Numeric::Float(0.25), Numeric::Float(1.0)]).unwrap();
        round_trip(&v);
        let out = "{\"type_list\":[{\"space\":\"R\",\"bounds\":[0.0,1.0]}],\"shape\":[1],\"data\":[2.0]}";
        assert!(load_str(out).is_err());
    }

    #[test]
    fn integral_floats_load_into_real_spaces() {
        let v = load_str("{\"type_list\":[\"R\"],\"shape\":[2],\"data\":[1,2.5]}").unwrap();
        assert_eq!(v.data(), &[Numeric::Float(1.0), Numeric::Float(2.5)]);
    }

    #[test]
    fn malformed() {
        for text in [
            "{\"type_list\":[\"Z\"],\"shape\":[2],\"data\":[1]}",
            "{\"type_list\":[\"Z\"],\"shape\":[1],\"data\":[1.5]}",
            "{\"type_list\":[\"Q9\"],\"shape\":[1],\"data\":[1]}",
            "{\"type_list\":[\"Z\",\"Z\"],\"shape\":[1],\"data\":[1]}",
            "{\"type_list\":[],\"shape\":[1],\"data\":[1]}",
            "{\"version\":2,\"type_list\":[\"Z\"],\"shape\":[1],\"data\":[1]}",
            "not json",
        ] {
            let e = load_str(text).unwrap_err();
            assert_eq!(e.exit_code(), 4, "{text}");
        }
    }
}
