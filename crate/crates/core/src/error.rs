use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("(K, J) = ({k}, {j}) is outside the required regime: {reason}")]
    Regime { k: f64, j: f64, reason: String },

    #[error("N = {n} exceeds the spectrum budget of {max}")]
    Resource { n: usize, max: usize },

    #[error("interval [{lo}, {hi}] contains no support point")]
    EmptyRestriction { lo: f64, hi: f64 },

    #[error("maximizer m = {m} is degenerate (phi'' = {d2})")]
    Degenerate { m: f64, d2: f64 },

    #[error("root of the consistency equation at (K, J) = ({k}, {j}) lies closer to 1 than the domain clip")]
    SaturatedRoot { k: f64, j: f64 },

    #[error("root ordering violated: expected 0 < m3 < m1, got m3 = {m3}, m1 = {m1}")]
    RootOrdering { m3: f64, m1: f64 },

    #[error("power-law fit: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            domain,
        }
    }

    pub(crate) fn regime(k: f64, j: f64, reason: impl Into<String>) -> Self {
        Error::Regime {
            k,
            j,
            reason: reason.into(),
        }
    }
}
