use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix [{a}, {b}, {c}, {d}] does not have determinant 1")]
    NotUnimodular {
        a: String,
        b: String,
        c: String,
        d: String,
    },

    #[error("generator index {0} out of range 0..=8")]
    GeneratorOutOfRange(usize),

    #[error("interval map index {0} out of range 0..=4")]
    IntervalMapOutOfRange(usize),

    #[error("cannot parse {0:?} as a rational")]
    Parse(String),

    #[error("{what}: value {value} outside the admissible domain")]
    Domain { what: &'static str, value: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{0} is not a dyadic rational")]
    NotDyadic(String),

    #[error("binary exponent {0} exceeds the supported limit")]
    ExponentOverflow(u64),

    #[error("coupling precondition violated: C({x}) != {w}")]
    Coupling { x: String, w: String },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: impl ToString) -> Self {
        Error::Domain {
            what,
            value: value.to_string(),
        }
    }

    /// True for errors caused by size limits rather than malformed input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_) | Error::ExponentOverflow(_))
    }
}
