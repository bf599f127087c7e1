//! Cell structures and mod-p homology of suspended quaternionic projective spaces and
//! the fibres that appear around them.

mod cells;
pub mod classify;
mod homology;

pub use cells::{
    fibre_cell_dims, skeleton_of_pinch_fibre, whitehead_reduce, ArithmeticCells, Attaching, Cell, CellComplex, ClassStatus,
    PinchSkeleton,
};
pub use classify::{classify, normalize_attaching, normalize_componentwise, Classification, CofibreFamily, CofibreType, Invariants};
pub use homology::{describe_summand, james_homology, recognize, smash_square_split, suspended, GradedModP, SymmetricSquare};

use thiserror::Error;

use crate::factdb::FactError;

#[derive(Debug, Error)]
pub enum CwError {
    #[error("need 2 <= n <= m, got n={n}, m={m}")]
    BadDimensions { n: u32, m: u32 },
    #[error("cells out of order: e^{next} after e^{previous}")]
    CellOrder { previous: u32, next: u32 },
    #[error("cannot parse cell complex `{0}`")]
    Parse(String),
    #[error("suspension index must be at least 1, got {0}")]
    BadSuspension(u32),
    #[error("prime {0} is not supported here")]
    UnsupportedPrime(u64),
    #[error("the idempotents (1 ± (12))/2 need an odd prime")]
    EvenPrime,
    #[error("`{0}` and `{1}` are not classes on the same sphere")]
    NotOnSameSphere(String, String),
    #[error("cannot determine the sphere of `{0}`")]
    Untyped(String),
    #[error("unknown class {0}")]
    UnknownClass(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("P1 does not preserve the summand containing {0}")]
    NotInvariant(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("homotopy group needed for the skeleton is not determined: {0}")]
    Undetermined(String),
    #[error(transparent)]
    Fact(#[from] FactError),
}
