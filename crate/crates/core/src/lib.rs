//! Commutator theory on finite algebras.
//!
//! The crate works with finite algebras given by operation tables and
//! computes congruence lattices, term-condition commutators (by several
//! independent routes), Mal'tsev/Day/Jónsson witnesses, compatible
//! uniformities presented by finite filter bases, and an exact symbolic
//! backend for filters of ideals of the integers.

pub mod algebra;
pub mod catalog;
mod closure;
pub mod commutator;
pub mod congruence;
pub mod error;
pub mod group_topology;
pub mod partition;
pub mod rel;
pub mod terms;
pub mod uniform;
pub mod zfilter;

pub use algebra::{FiniteAlgebra, Homomorphism, Operation, Signature, Term};
pub use commutator::{CentralizationReport, MatrixSubalgebra, Route};
pub use congruence::CongruenceLattice;
pub use error::{Error, Result};
pub use partition::Partition;
pub use rel::{AxiomReport, BitRelation, RelationFilter};
pub use terms::{CloneElement, SearchOutcome, TermWitness, WitnessKind};
pub use uniform::CongruenceFilter;
pub use zfilter::{Cap, ZIdealFilter};

/// Size caps applied to carriers, powers, and clone enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest carrier accepted for an input algebra.
    pub max_carrier: usize,
    /// Largest carrier (or tuple space) of a derived power.
    pub max_power: usize,
    /// Largest number of tables a clone enumeration may produce.
    pub clone_budget: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_carrier: 64,
            max_power: 10_000_000,
            clone_budget: 1_000_000,
        }
    }
}
