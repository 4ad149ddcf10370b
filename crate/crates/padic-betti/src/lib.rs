//! Exact computation of p-adic limits of Betti numbers, torsion, and related
//! invariants along towers of finite quotients.
//!
//! Everything here is exact: big integers, rationals, residues mod p^N.
//! No floating point is used anywhere. Limits are finite-evidence objects:
//! a reported residue is always accompanied by the precision actually
//! witnessed by the computed levels, never extrapolated.

pub mod atiyah;
pub mod cli;
pub mod complexes;
pub mod cyclic;
pub mod engine;
pub mod fab;
pub mod groups;
pub mod linalg;
pub mod oracles;
pub mod padic;
pub mod words;

use num_bigint::BigInt;

/// Library-wide error type. Preconditions that fail loudly land here.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p-adic valuation of zero is undefined")]
    ZeroValuation,
    #[error("sequence is empty")]
    EmptySequence,
    #[error("window must be at least 2, got {0}")]
    WindowTooSmall(usize),
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("matrix log domain: matrix is not congruent to the identity mod {0}")]
    LogDomain(u64),
    #[error("matrix exp domain: matrix is not congruent to zero mod {0}")]
    ExpDomain(u64),
    #[error("increase precision: value vanishes to working precision (cap {0} digits reached)")]
    PrecisionExhausted(u32),
    #[error("coefficient field has characteristic {0} equal to the tower prime")]
    FieldCharEqualsP(u64),
    #[error("generator images do not generate the quotient (density check failed at level {level}: reached {reached} of {order})")]
    DensityCheckFailed { level: usize, reached: usize, order: usize },
    #[error("group of order {0} is not a {1}-group")]
    NotPGroup(usize, u64),
    #[error("quotient tower is empty")]
    EmptyTower,
    #[error("tower projection at level {0} is not compatible ({1})")]
    BadProjection(usize, String),
    #[error("matrix shapes do not compose: {0}")]
    ShapeMismatch(String),
    #[error("boundary composition is nonzero at level {level} (degree {degree})")]
    NonzeroComposition { level: usize, degree: usize },
    #[error("degree {degree} out of range for a complex of dimension {dim} (complex not flagged complete)")]
    DegreeOutOfRange { degree: usize, dim: usize },
    #[error("generator count mismatch: complex has {complex}, tower images have {tower}")]
    GeneratorMismatch { complex: usize, tower: usize },
    #[error("betti sequence decreased from {prev} to {next} at level {level} along a pro-p tower in characteristic away from p")]
    MonotonicityViolated { level: usize, prev: BigInt, next: BigInt },
    #[error("matrix A fails condition (A{which}): {detail}")]
    FabCondition { which: u8, detail: String },
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
