use std::fmt;

use thiserror::Error;

/// Source position of a token or AST node (1-based line and column).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lex error at {span}: {msg}")]
    Lex { span: Span, msg: String },
    #[error("parse error at {span}: {msg}")]
    Parse { span: Span, msg: String },
    #[error("unbound name `{name}` at {span}")]
    UnboundName { name: String, span: Span },
    #[error("arity error: {0}")]
    Arity(String),
    #[error("`*` used outside a map/reduce function at {0}")]
    StarOutsideIterator(Span),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("unbound placeholder `{0}`")]
    UnboundPlaceholder(String),
    #[error("missing input `{0}`")]
    MissingInput(String),
    #[error("index error: {0}")]
    Index(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("type list mismatch: {0}")]
    TypeListMismatch(String),
    #[error("degenerate shape: {0}")]
    DegenerateShape(String),
    #[error("conversion error: {0}")]
    Conversion(String),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("volume mismatch: {0}")]
    VolumeMismatch(String),
    #[error("reshape target has more than one -1 entry")]
    MultipleInfer,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported lowering: {0}")]
    UnsupportedLowering(String),
    #[error("definition `{0}` refers to itself")]
    Cycle(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Exit code of the command-line tool for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Lex { .. } | Error::Parse { .. } => 1,
            Error::Domain(_) => 3,
            Error::Io(_) => 4,
            _ => 2,
        }
    }

    /// Stable machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Lex { .. } => "LexError",
            Error::Parse { .. } => "ParseError",
            Error::UnboundName { .. } => "UnboundNameError",
            Error::Arity(_) => "ArityError",
            Error::StarOutsideIterator(_) => "StarOutsideIteratorError",
            Error::UnknownFunction(_) => "UnknownFunctionError",
            Error::UnboundPlaceholder(_) => "UnboundPlaceholderError",
            Error::MissingInput(_) => "MissingInputError",
            Error::Index(_) => "IndexError",
            Error::ShapeMismatch(_) => "ShapeMismatchError",
            Error::TypeListMismatch(_) => "TypeListMismatchError",
            Error::DegenerateShape(_) => "DegenerateShapeError",
            Error::Conversion(_) => "ConversionError",
            Error::NotAPermutation(_) => "NotAPermutationError",
            Error::VolumeMismatch(_) => "VolumeMismatchError",
            Error::MultipleInfer => "MultipleInferError",
            Error::Domain(_) => "DomainError",
            Error::UnsupportedLowering(_) => "UnsupportedLoweringError",
            Error::Cycle(_) => "CycleError",
            Error::UnknownOperator(_) => "UnknownOperatorError",
            Error::Io(_) => "IoError",
        }
    }

    /// Attaches evaluation context (binding, coordinate) to domain errors.
    pub fn in_context(self, ctx: impl FnOnce() -> String) -> Self {
        match self {
            Error::Domain(msg) => Error::Domain(format!("{msg} ({})", ctx())),
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
