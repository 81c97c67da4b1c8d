use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A theorem or membership hypothesis does not hold for the given
    /// parameters. `guard` is the failed inequality in text form.
    #[error("hypothesis of {theorem} violated: {guard}")]
    Hypothesis { theorem: String, guard: String },

    #[error(
        "quadrature did not converge: estimate {err_est:e} above tolerance {tol:e} ({context})"
    )]
    NotConverged {
        err_est: f64,
        tol: f64,
        context: String,
    },

    #[error("integrand returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },

    #[error("tridiagonal eigensolver exceeded {iterations} iterations at index {index}")]
    EigenNoConvergence { index: usize, iterations: usize },

    #[error("rate fit needs at least {required} admissible points, found {found}")]
    TooFewPoints { found: usize, required: usize },

    #[error("coefficient at n = {n} is exactly zero and cannot enter a log fit")]
    ZeroCoefficient { n: usize },

    #[error("rate fit unavailable: {0}")]
    FitUnavailable(String),

    #[error("invalid function spec: {0}")]
    InvalidSpec(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn hypothesis(theorem: impl Into<String>, guard: impl Into<String>) -> Self {
        Error::Hypothesis {
            theorem: theorem.into(),
            guard: guard.into(),
        }
    }
}
