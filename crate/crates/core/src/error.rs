use thiserror::Error;

use crate::quadrature::QuadError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The caller combined arguments that do not fit together.
    #[error("usage error: {0}")]
    Usage(String),

    /// A quadrature inside `what` failed.
    #[error("quadrature failed while computing {what}: {source}")]
    Quadrature {
        what: String,
        #[source]
        source: QuadError,
    },

    /// Conditioning on a point where the marginal vanishes.
    #[error("degenerate slice: marginal density is zero at {at}")]
    DegenerateSlice { at: f64 },

    /// A root-finding bracket does not enclose a sign change.
    #[error("bracket [{lo}, {hi}] does not enclose a crossing (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { op, detail: detail.into() }
    }
}

/// Attach a description of the integrand to a quadrature failure.
pub(crate) trait QuadContext<T> {
    fn context(self, what: impl Into<String>) -> Result<T>;
}

impl<T> QuadContext<T> for std::result::Result<T, QuadError> {
    fn context(self, what: impl Into<String>) -> Result<T> {
        self.map_err(|source| Error::Quadrature { what: what.into(), source })
    }
}
