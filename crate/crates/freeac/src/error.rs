//! Error type shared by the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Alphabet size outside 1..=9 (words are encoded as digit strings).
    #[error("alphabet size d = {0} not supported, need 1 <= d <= 9")]
    BadAlphabet(usize),

    #[error("letter {letter} outside alphabet 1..={d}")]
    BadLetter { letter: usize, d: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// `|n| > 20`: the multinomial `|n|!/n!` would overflow exact integer arithmetic.
    #[error("multinomial overflow guard: |n| = {0} > 20")]
    MultinomialOverflow(usize),

    /// Constant term of a series is singular (or past the 1e12 condition guard),
    /// so the series has no inverse up to the truncation degree.
    #[error("singular constant term: condition estimate {cond:.3e} exceeds guard")]
    SingularConstantTerm { cond: f64 },

    /// Non-unitality violated: `I - B(0)` must be boundedly invertible, which we
    /// enforce as `||B_0|| < 1 - 1e-8`.
    #[error("non-unital violation: ||B(0)|| = {norm:.6} not < 1 - 1e-8")]
    NonUnital { norm: f64 },

    #[error("not a Herglotz function: Re H(0) has min eigenvalue {min_eig:.3e}")]
    NotHerglotz { min_eig: f64 },

    #[error("moment functional is not CP at truncation level: Gram min eigenvalue {min_eig:.3e}")]
    NotCpAtLevel { min_eig: f64 },

    #[error("matrix is not Hermitian: asymmetry {defect:.3e}")]
    NotHermitian { defect: f64 },

    #[error("not a contraction: complement min eigenvalue {min_eig:.3e}")]
    NotContractive { min_eig: f64 },

    #[error("missing moment for word \"{0}\"")]
    MissingMoment(String),

    #[error("matrix is not unitary: defect {defect:.3e}")]
    NotUnitary { defect: f64 },

    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    #[error("resolvent did not converge / linear solve failed: {0}")]
    ResolventDiverged(String),

    #[error("free lift check failed: {0}")]
    LiftCheckFailed(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("json: {0}")]
    Json(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
