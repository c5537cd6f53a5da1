//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("points coincide; a line needs two distinct points")]
    CoincidentPoints,
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("map is not invertible")]
    NotInvertible,
    #[error("input vectors are linearly dependent")]
    DependentInput,
    #[error("input points are collinear")]
    CollinearInput,
    #[error("input point {0} duplicates an earlier point")]
    DuplicateInput(usize),
    #[error("at least {needed} points required, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("bad dimensions: cannot extend from R^{from} to R^{to}")]
    BadDimensions { from: usize, to: usize },
    #[error("the declared center lies in the cloud")]
    CenterInCloud,
    #[error("cloud {index} has center {found}, expected {expected}")]
    CenterMismatch { index: usize, expected: String, found: String },
    #[error("not a cloud around its declared center: {0}")]
    NotACloud(String),
    #[error("squared radius must be nonnegative")]
    NegativeRadius,
    #[error("homogeneous coordinates are all zero")]
    ZeroVector,
    #[error("projective point lies at infinity (outside the affine chart)")]
    AtInfinity,
    #[error("point lies outside the window (-{epsilon}, {epsilon})")]
    OutOfWindow { epsilon: String },
    #[error("window certification failed: {0}")]
    CertificationFailed(String),
    #[error("axis {axis} out of range 0..{arity}")]
    BadAxis { axis: usize, arity: usize },
    #[error("exhaustive check needs {needed} tuples, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("cannot sample {0} exactly")]
    UnsupportedSampling(String),
}
