use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("type error: {msg} in {subterm}")]
    Type { msg: String, subterm: String },
    #[error("{subterm} is not a term of {lang}")]
    Membership { lang: String, subterm: String },
    #[error("product types are not allowed here: {0}")]
    ProductType(String),
    #[error("fuel must be positive")]
    ZeroFuel,
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("{0}")]
    Usage(String),
    #[error("node {0} is not in the tree")]
    NotInTree(String),
    #[error("depth cap {cap} exceeded: {what}")]
    DepthCap { cap: usize, what: String },
    #[error("analysis inapplicable: {0}")]
    Inapplicable(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
