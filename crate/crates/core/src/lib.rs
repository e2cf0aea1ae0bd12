//! Partial-order semantics for place/transition nets.
//!
//! The crate covers the token game, Goltz-Reisig processes and their
//! isomorphism, the swapping equivalence on processes, adjacency on firing
//! sequences, the preorders these induce on finite runs, semantic conflicts,
//! and the diamond-closing construction of a largest run for nets without
//! binary conflicts. Every constructive operation returns a certificate that
//! can be replayed independently of the search that produced it.

pub mod compat;
pub mod conflict;
pub mod diamond;
pub mod dot;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod iso;
pub mod multiset;
pub mod net;
pub mod process;
pub mod seqequiv;
pub mod swapping;

pub use error::{Error, Result};
pub use iso::Isomorphism;
pub use multiset::{Combine, Multiset};
pub use net::{Budget, Marking, Net, NetBuilder, PlaceId, Step, TransId, Word};
pub use process::{CondId, EventId, Process};
