use crate::closed_form::Rule;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("lower parameter {index} reaches zero at term {term} before the series terminates")]
    ZeroLowerParameter { index: usize, term: u64 },
    #[error("no upper parameter is a non-positive integer; the series does not terminate")]
    NotTerminating,
    #[error("series terminates after {terms} terms, above the cap of {cap}")]
    TooManyTerms { terms: u64, cap: u64 },
    #[error("rule {0} is not supported by this operation")]
    UnsupportedRule(Rule),
    #[error("window too small: order {order} must be at least k + 3 = {required}")]
    WindowTooSmall { order: u64, required: u64 },
    #[error("cannot draw from an empty urn")]
    EmptyUrn,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
