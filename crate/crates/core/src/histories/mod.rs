//! History families, chain vectors, the decoherence functional and the
//! probability calculus that applies to consistent families.
//!
//! Times are numbered from 1: step `t` evolves from `t − 1` to `t` and is
//! followed by the sample space at time `t`. Time 0 carries the initial state.

mod decoherence;
mod family;
mod probability;
mod sample_space;

pub use decoherence::{
    check_consistency, decoherence_functional, ConsistencyVerdict, DecoherenceMatrix,
};
pub use family::{chain_vector, Branch, FamilyBuilder, HistoryFamily};
pub use probability::{
    branch_probabilities, conditional_probability, event_probability, Event, Probabilities,
};
pub use sample_space::{complete_sample_space, SampleSpace, IDENTITY, REST};
