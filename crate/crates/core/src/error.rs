use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("point {point} out of range for order {order}")]
    OutOfRange { point: usize, order: usize },
    #[error("triple {0:?} repeats a point")]
    DegenerateTriple([usize; 3]),
    #[error("pair {{{0}, {1}}} lies in more than one triple")]
    DuplicatePair(usize, usize),
    #[error("pair {{{0}, {1}}} is not covered by any triple")]
    NotSteiner(usize, usize),
    #[error("operation requires a Steiner system")]
    RequiresSteiner,
    #[error("order {0} is not 1 or 3 mod 6")]
    BadOrder(usize),
    #[error("the two points of a pair must differ (got {0} twice)")]
    SamePoint(usize),
    #[error("system must have order greater than 3 (got {0})")]
    TrivialOrder(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{what} exceeds the size cap ({value} > {cap})")]
    TooLarge {
        what: &'static str,
        value: u128,
        cap: u128,
    },
    #[error("search exhausted its budget: {0}")]
    SearchExhausted(String),
    #[error("completion budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("target order {0} is not admissible here")]
    InadmissibleOrder(usize),
    #[error("source blocks share the pair {{{0}, {1}}}")]
    FrozenConflict(usize, usize),
    #[error("no triangle configuration in the system")]
    NoTriangle,
    #[error("could not align a triangle of the replacement system")]
    NoTriangleAlignment,
    #[error("difference set for b{0} is empty")]
    EmptyDifferenceSet(usize),
    #[error("the given set does not spread")]
    NotSpreading,
    #[error("system is not tagged as PG(d,2) with d <= 5")]
    NotProjectiveTag,
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn too_large(what: &'static str, value: impl Into<u128>, cap: impl Into<u128>) -> Self {
        Error::TooLarge {
            what,
            value: value.into(),
            cap: cap.into(),
        }
    }
}
