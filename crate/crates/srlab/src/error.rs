use thiserror::Error;

/// Errors raised by format construction, rounding, and the experiment runners.
#[derive(Debug, Error)]
pub enum Error {
    /// Input is NaN, infinite, or subnormal in the target format.
    #[error("value {0} is subnormal, zero-adjacent, or a special value in this format")]
    SubnormalOrSpecial(f64),

    /// Value falls outside the normal range of the format.
    #[error("value {value} is outside the normal range [{min:e}, {max:e}]")]
    Range { value: f64, min: f64, max: f64 },

    /// A finite value that is not on the format's grid where one was required.
    #[error("value {0} is not representable in this format")]
    NotRepresentable(f64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("polynomial has no coefficients")]
    EmptyPolynomial,

    /// Chebyshev generation in the squared variable needs an even degree.
    #[error("degree {0} is odd; only even degrees have a representation in z = x^2")]
    OddDegree(u32),

    /// A coefficient cannot be stored exactly in the requested format.
    #[error("coefficient {0} is not exactly representable in the target format")]
    CoefficientOverflow(String),

    #[error("polynomial evaluates to zero at the given point; condition number is undefined")]
    ZeroDenominator,

    #[error("evaluation point is zero; increment constants are undefined there")]
    ZeroX,

    #[error("lambda must lie strictly inside (0, 1), got {0}")]
    InvalidLambda(f64),

    #[error("sample set is empty")]
    EmptySampleSet,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 1 config, 2 suite failure, 3 range.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidLambda(_) | Error::OddDegree(_) => 1,
            Error::Range { .. } | Error::SubnormalOrSpecial(_) => 3,
            _ => 2,
        }
    }
}
