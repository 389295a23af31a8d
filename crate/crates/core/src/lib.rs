//! Tensors of lists: values, elementary functions, operators, a small
//! language and an interpreter that counts elementary operations.

pub mod cell;
pub mod elementary;
pub mod error;
pub mod eval;
pub mod frontend;
pub mod ops;
pub mod scalar;
pub mod space;
pub mod stdlib;
pub mod tensor_file;
pub mod value;

pub use cell::Cell;
pub use elementary::{Elementary, FnExpr};
pub use error::{Error, Result, Span};
pub use eval::{run, run_source, EopsReport, RunOptions, RunOutput};
pub use ops::lower::{AtomicExpr, Sym};
pub use scalar::{Numeric, Real};
pub use space::{SpaceId, TypeList, TypeSpace};
pub use value::ToL;

pub type Value = ToL<Numeric<f64>>;
pub type Value32 = ToL<Numeric<f32>>;
pub type SymValue = ToL<Sym>;
