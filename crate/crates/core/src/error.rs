use thiserror::Error;

/// Which of the parameter inequalities rejected a scale parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauInequality {
    /// tau <= 1 - alpha
    OneMinusAlpha,
    /// tau < 1/2
    Half,
    /// tau^(2 alpha) < 1/2
    Convergence,
    /// 1 - tau^(2(1 - alpha)) >= tau ln(1/tau)
    Exponentiation,
    /// tau^(2 alpha - 1) <= 1/8
    LowerBoundFactor,
}

impl std::fmt::Display for TauInequality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TauInequality::OneMinusAlpha => "tau <= 1 - alpha",
            TauInequality::Half => "tau < 1/2",
            TauInequality::Convergence => "tau^(2 alpha) < 1/2",
            TauInequality::Exponentiation => "1 - tau^(2(1 - alpha)) >= tau ln(1/tau)",
            TauInequality::LowerBoundFactor => "tau^(2 alpha - 1) <= 1/8",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("distance matrix is not square (row {row} has {len} entries, expected {expected})")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("distance ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize },
    #[error("distance ({i}, {j}) is negative")]
    NegativeDistance { i: usize, j: usize },
    #[error("distance matrix is not symmetric at ({i}, {j})")]
    AsymmetricMatrix { i: usize, j: usize },
    #[error("diagonal entry {i} is not zero")]
    NonZeroDiagonal { i: usize },
    #[error("distinct points {i} and {j} are at distance zero")]
    ZeroOffDiagonal { i: usize, j: usize },
    #[error("triangle inequality fails: d({i}, {k}) > d({i}, {j}) + d({j}, {k})")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("label count {labels} does not match point count {points}")]
    LabelCount { labels: usize, points: usize },
    #[error("operation needs at least {needed} points, space has {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("covering scale factor must be >= 1, got {0}")]
    BadLambda(f64),
    #[error("scale parameter tau = {0} outside (0, 1/2)")]
    BadTau(f64),
    #[error("alpha = {0} outside (2/3, 1)")]
    AlphaOutOfRange(f64),
    #[error("tau = {tau} too large: violates {inequality}")]
    TauTooLarge { tau: f64, inequality: TauInequality },
    #[error("component dimension m = {m} must exceed 8 log2(c0) = {bound}")]
    DimensionTooSmall { m: usize, bound: f64 },
    #[error("doubling constant must be >= 1")]
    BadDoublingConstant,
    #[error("all candidate vectors eliminated")]
    Exhausted,
    #[error(
        "candidate packing exhausted: {available} lattice points, {needed} needed{}; decrease tau or increase m",
        site_suffix(.site)
    )]
    PackingExhausted {
        available: usize,
        needed: usize,
        /// `(k, xi, j)` of the selection that ran out, when known.
        site: Option<(i32, usize, usize)>,
    },
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error("missing earlier assignment at scale {k}, net index {j} ({direction})")]
    OrderViolation { k: i32, j: usize, direction: crate::Direction },
    #[error("scale {0} is not on the ladder")]
    UnknownScale(i32),
    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("instance size {0} outside supported range")]
    SizeOutOfRange(usize),
    #[error("bad generator {0:?}")]
    BadGenerator(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("embedding file does not match instance: {0}")]
    InvalidEmbedding(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status for this failure.
    ///
    /// 2 = parameter rejection, 3 = metric rejection, 4 = packing exhausted,
    /// 1 = anything else. Status 5 (verification failure) is not an error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BadTau(_)
            | Error::AlphaOutOfRange(_)
            | Error::TauTooLarge { .. }
            | Error::DimensionTooSmall { .. }
            | Error::BadDoublingConstant
            | Error::BadLambda(_) => 2,
            Error::NotSquare { .. }
            | Error::NonFinite { .. }
            | Error::NegativeDistance { .. }
            | Error::AsymmetricMatrix { .. }
            | Error::NonZeroDiagonal { .. }
            | Error::ZeroOffDiagonal { .. }
            | Error::TriangleViolation { .. }
            | Error::DuplicateLabel(_)
            | Error::LabelCount { .. } => 3,
            Error::PackingExhausted { .. } | Error::Exhausted => 4,
            _ => 1,
        }
    }
}

fn site_suffix(site: &Option<(i32, usize, usize)>) -> String {
    match site {
        Some((k, xi, j)) => format!(" at scale {k}, color {xi}, net index {j}"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
