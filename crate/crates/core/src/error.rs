use thiserror::Error;

/// Location of the first entry that breaks the conjugate symmetry of a game matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryViolation {
    /// Row/column of the offending entry.
    pub entry: (usize, usize),
    /// Row/column of the entry it must be the conjugate of.
    pub partner: (usize, usize),
    /// |M[partner] - conj(M[entry])|.
    pub magnitude: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("conjugate symmetry violated at {:?} vs {:?} (deviation {:.3e})", .0.entry, .0.partner, .0.magnitude)]
    Symmetry(SymmetryViolation),

    #[error("excess has a non-zero imaginary part {0:e}")]
    NonReal(f64),

    #[error("invalid permutation: {0}")]
    Permutation(String),

    #[error("enumeration needs {required} states but the budget is {budget}")]
    Budget { required: u128, budget: u128 },

    #[error("{count} optimal strategies exceed the cap of {cap}")]
    OptimizerCap { count: u128, cap: u128 },

    #[error("strategy is not optimal: it attains {attained} while the optimum is {optimum}")]
    NotOptimal { attained: String, optimum: String },

    #[error("outcome counts differ: {0} vs {1}")]
    OutcomeMismatch(usize, usize),

    #[error("second tensor factor must be real for the product to stay a valid game (entry {0:?} is complex)")]
    ComplexFactor((usize, usize)),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("observable {index} is not a unitary with spectrum in the {q}-th roots of unity")]
    Observable { index: usize, q: usize },

    #[error("not a {kind} matrix: {detail}")]
    Kind { kind: &'static str, detail: String },

    #[error("not a correlation matrix: entry {0:?} outside the core is non-zero")]
    NotCorrelation((usize, usize)),

    #[error("integer overflow in exact kernel: {0}")]
    Overflow(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("unknown catalogue entry {order}/{index}")]
    UnknownEntry { order: usize, index: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for refusals caused by an enumeration budget or optimizer cap.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. } | Error::OptimizerCap { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
