//! Consistent-histories analysis on finite labeled Hilbert spaces.
//!
//! The crate evolves pure states through unitary steps compiled from partial
//! rule sets, builds history families over projective sample spaces, and
//! evaluates their decoherence functional. Probabilities are only handed out
//! for families that pass the consistency test, and pairs of families can be
//! tested for compatibility.
//!
//! Module map:
//!
//! * [`hilbert`]: labels, spaces, states, operators and projectors.
//! * [`dynamics`]: partial unitary specifications and their compilation.
//! * [`histories`]: sample spaces, families, decoherence matrices, probabilities.
//! * [`compatibility`]: commutation witnesses and common refinements.
//! * [`scenarios`]: built-in interferometer and spin-half scenarios.
//! * [`document`]: the JSON scenario schema.
//! * [`report`]: analysis of a scenario into a serializable report.

pub mod compatibility;
pub mod document;
pub mod dynamics;
mod error;
pub mod hilbert;
pub mod histories;
pub mod report;
pub mod scenarios;

pub use compatibility::{
    check_compatibility, common_refinement, conjunction_check, spin_half_conjunction_check,
    CompatibilityVerdict, ConjunctionReport,
};
pub use dynamics::{
    beamsplitter_spec, compile_step, detector_spec, PartialUnitarySpec, SplitterConvention,
    UnitaryStep,
};
pub use error::{Error, Result};
pub use hilbert::{
    apply, commutator_norm, inner_product, projector_from_vectors, superpose, BasisLabel, Factor,
    HilbertSpace, Operator, Projector, StateVector, C64,
};
pub use histories::{
    branch_probabilities, chain_vector, check_consistency, complete_sample_space,
    conditional_probability, decoherence_functional, Branch, ConsistencyVerdict, DecoherenceMatrix,
    Event, HistoryFamily, SampleSpace,
};
pub use scenarios::Scenario;

/// Tolerance for structural checks (unitarity, idempotence, orthogonality,
/// consistency).
pub const DEFAULT_TOL: f64 = 1e-10;

/// Tolerance for roundings of derived integers such as projector rank.
pub const ROUNDING_TOL: f64 = 1e-8;

/// Probabilities at or below this value are treated as zero in reports.
pub const DISPLAY_THRESHOLD: f64 = 1e-12;
