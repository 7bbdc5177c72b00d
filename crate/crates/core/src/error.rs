use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("unknown node {0}")]
    UnknownNode(usize),

    #[error("edge ({0}, {1}) carries an unknown dotted weight")]
    UnknownWeight(usize, usize),

    #[error("signature could not be certified: an eigenvalue of magnitude {0:e} sits inside the ambiguity band")]
    Uncertified(f64),

    #[error("{0} is not elliptic")]
    NotElliptic(String),

    #[error("near-zero denominator: {0}")]
    NearZeroDenominator(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("gluing precondition violated: {0}")]
    Gluing(String),

    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),

    #[error("face diagram not guaranteed: {0}")]
    NotGuaranteed(String),

    #[error("no fully determined seed of signature (d,1,0) among the facets")]
    NoSeed,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("resource limit reached: {0}")]
    ResourceLimit(String),

    #[error("{0}")]
    Io(String),

    #[error("{file}: {message}")]
    Catalog { file: String, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    /// Errors caused by floating-point limits rather than bad input.
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::Uncertified(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
