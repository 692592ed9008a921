use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basic q-integer [{0}] is undefined for negative arguments")]
    NegativeBasicQInt(i64),
    #[error("q = 0 is not allowed (coefficients carry negative q-powers)")]
    ZeroQ,
    #[error("half-integer q-exponent cannot be evaluated exactly")]
    HalfExponentNotExact,
    #[error("inexact division: {0}")]
    DivisionNotExact(String),
    #[error("pole: {var} = 0 with negative exponent")]
    Pole { var: char },
    #[error("star series does not terminate for Laurent arguments; pass an explicit order")]
    NonTerminatingSeries,
    #[error("negative exponents are not allowed here: {0}")]
    NegativeExponent(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("series did not converge after {terms} terms (last term {last_term:e})")]
    NonConvergent { terms: usize, last_term: f64 },
    #[error("zero denominator: {0}")]
    ZeroDenominator(String),
    #[error("Hamiltonian must be a polynomial of degree <= 2 with constant coefficients: {0}")]
    Hamiltonian(String),
    #[error("CFL violation: dt = {dt} exceeds stable step {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("quadrature window too small: integrand magnitude {magnitude:e} at the window edge")]
    WindowTooSmall { magnitude: f64 },
}
