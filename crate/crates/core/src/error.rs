use thiserror::Error;

use crate::metric::TriangleViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("metric axioms violated ({} violation(s), first: {:?})", .0.len(), .0.first())]
    InvalidMetric(Vec<TriangleViolation>),

    #[error("voter {voter} coincides with {count} candidates; Plackett-Luce ranking is undefined")]
    DegenerateTie { voter: usize, count: usize },

    #[error("pairwise function is not in the admissible class: {0}")]
    NotInClass(String),

    #[error("{name} = {value} is outside its domain {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible construction: {0}")]
    Infeasible(String),

    #[error("enumeration too large: {profiles} profiles exceeds the limit of {limit}")]
    TooLarge { profiles: f64, limit: f64 },

    #[error("degenerate instance: the optimal social cost is zero")]
    DegenerateInstance,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, domain: &'static str) -> Result<()> {
    if value.is_nan() || value < lo || value > hi {
        Err(Error::OutOfDomain { name, value, domain })
    } else {
        Ok(())
    }
}
