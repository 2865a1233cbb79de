use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A gamma or digamma argument landed on a nonpositive integer.
    #[error("pole at nonpositive integer argument {0}")]
    Pole(f64),
    #[error("result exceeds the floating-point range")]
    Overflow,
    #[error("argument is not finite: {0}")]
    NonFinite(f64),
    /// A family parameter violates its domain constraint; the message names it.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("endpoint {endpoint} is not valid for the {family} family")]
    InvalidEndpoint {
        family: &'static str,
        endpoint: &'static str,
    },
    #[error("degenerate input: {0}")]
    Degenerate(String),
}
