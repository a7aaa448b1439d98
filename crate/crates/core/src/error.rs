use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid level {0}: N must be a positive integer")]
    InvalidLevel(u64),
    #[error("{d} is not a Hall divisor of {n}")]
    NotHallDivisor { n: u64, d: u64 },
    #[error("Atkin-Lehner index must be a nontrivial Hall divisor (got {0})")]
    TrivialInvolution(u64),
    #[error("pair quotient needs two distinct nontrivial indices (got {0} and {1})")]
    DegeneratePair(u64, u64),
    #[error("invalid discriminant {0}: must be negative and congruent to 0 or 1 mod 4")]
    InvalidDiscriminant(i64),
    #[error("Hurwitz class number undefined for negative argument {0}")]
    NegativeHurwitz(i64),
    #[error("gcd({m}, {n}) > 1: Hecke traces are only computed for m coprime to the level")]
    NotCoprime { m: u64, n: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {p} divides the level {n}")]
    PrimeDividesLevel { p: u64, n: u64 },
    #[error("{0} is a prime power or 1; only composite non-prime-power levels are classified")]
    PrimePowerLevel(u64),
    #[error("curve {0}: the Fricke quotient is only classified from known-gonality facts")]
    FrickeExcluded(String),
    #[error("internal arithmetic inconsistency: {0}")]
    Inconsistent(String),
    #[error("contradiction on {curve}: {detail}")]
    Contradiction { curve: String, detail: String },
    #[error("{0}")]
    Parse(String),
}
