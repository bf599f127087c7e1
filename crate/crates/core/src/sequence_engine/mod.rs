//! The long exact sequence of the pinch map ΣᵏℍP² → S^{8+k}, run one degree at a time.

mod check;
mod derive;
mod fibre;
mod trace;

pub use check::{
    apply_map, consistency_checks, presentation_of, snake_ladder_check, SequenceInstance, ShortExactRow, Violation,
    ViolationKind,
};
pub use derive::{
    boundary_cok_ker, derive_direct, derive_pi, derive_with_audit, fibre_pi, Branch, BranchResult, Derivation, KernelData,
    Outcome,
};
pub use fibre::{BoundaryMap, BottomPart, FibreGroup, FibreModel, Image};
pub use trace::{Step, Trace};

use thiserror::Error;

use crate::cw_topology::CwError;
use crate::extensions::ExtensionError;
use crate::factdb::FactError;
use crate::local_algebra::AlgebraError;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("missing fact: {0}")]
    MissingFact(String),
    #[error("fibre skeleton: {0}")]
    Skeleton(String),
    #[error("underdetermined: {0}")]
    Underdetermined(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("partial data: {0}")]
    Partial(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Fact(#[from] FactError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Cw(#[from] CwError),
}

impl EngineError {
    /// A required group or fact is absent, as opposed to present but insufficient.
    pub fn is_missing(&self) -> bool {
        matches!(self, EngineError::MissingFact(_) | EngineError::Fact(FactError::Missing { .. }))
    }
}
