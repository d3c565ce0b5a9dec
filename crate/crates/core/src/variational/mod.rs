//! The `S(x)`/`J(x)` calculus, the Picard engine and the principle solvers.

pub mod caristi;
pub mod certificate;
pub mod ekeland;
pub mod equivalence;
pub mod picard;
pub mod sset;
pub mod takahashi;

pub use caristi::{caristi, check_premise, CaristiMap};
pub use certificate::Certificate;
pub use ekeland::{full_ekeland, weak_ekeland, weak_ekeland_from, weak_ekeland_with, FullEkelandParams, Solution};
pub use equivalence::{
    equivalence_witness, equivalence_witness_on, instance_equivalence, EquivalenceOutcome, RefutingMap,
};
pub use picard::{picard_run, ArgminRule, FirstDescentRule, FirstHalfGapRule, PicardTrace, SelectionRule, Termination};
pub use sset::{in_s_set, j_value, s_set, SSetRecord};
pub use takahashi::{takahashi, TakahashiOutcome};
