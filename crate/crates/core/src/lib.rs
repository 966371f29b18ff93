//! Symbolic engine for transfinite Ehrenfeucht-Fraisse games over a pair of
//! layered structures built from a countable GF(2) vector space.
//!
//! The library is organised around a small tower of modules:
//!
//! * [`ordinal`] — Cantor-normal-form ordinal arithmetic below `w^w`, plus
//!   computable coding bijections between `w` and infinite ordinal segments.
//! * [`partition`] — ordinal-indexed partitions of the naturals into
//!   infinitely many infinite classes, used as colour reservoirs by the
//!   winning strategies.
//! * [`group`] — the GF(2) vector space with basis `x0, x1, ...`, its index
//!   cosets `G0_n` / `G1_n`, and symbolic endomorphisms.
//! * [`structure`] — the two-sorted layered structures, their restrictions,
//!   and the expansion by a level-linking relation.
//! * [`nu`] — finitely-described total functions from an ordinal segment into
//!   the group; these drive the level-wise translation automorphisms.
//! * [`game`] / [`strategy`] — the back-and-forth game state machine, the two
//!   built-in duplicator strategies, and the finite-set-move adapter.
//! * [`oracle`] — independent brute-force verifiers: partial-isomorphism
//!   audits, the expansion-compatibility equivalence, the translation census,
//!   and the rigidity probe.
//! * [`transcript`] — deterministic game transcripts and byte-exact replay.
//! * [`cli`] — the command-line front end.
//!
//! Everything is immutable after construction and free of interior
//! mutability, so values can be shared across threads without synchronisation.

pub mod cli;
pub mod game;
pub mod group;
pub mod nu;
pub mod oracle;
pub mod ordinal;
pub mod partition;
pub mod strategy;
pub mod structure;
pub mod transcript;

pub use game::{AisMove, GameConfig, GameKind, GamePosition};
pub use group::{Coset, GroupElement, GroupHom, HomRule};
pub use nu::{NuDescriptor, Preimage, Segment, SegmentRule};
pub use ordinal::Ordinal;
pub use partition::OmegaPartition;
pub use structure::{AElement, BElement, Element, PDescriptor, Structure};

/// Engine version stamped into transcript headers; replays refuse transcripts
/// produced by a different version.
pub const ENGINE_VERSION: &str = concat!("eftower/", env!("CARGO_PKG_VERSION"));

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("arithmetic overflow in index coding")]
    Overflow,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("outside function domain: {0}")]
    OutOfDomain(String),
    #[error("image would leave the structure: {0}")]
    IllegalImage(String),
    #[error("outside the decidable fragment: {0}")]
    Undecided(String),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("ISO has no legal move: {0}")]
    IsoStuck(String),
    #[error("illegal AIS move: {0}")]
    IllegalAisMove(String),
    #[error("inconsistent resume state: {0}")]
    InconsistentState(String),
    #[error("transcript: {0}")]
    Transcript(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Error {
        Error::Parse { pos, msg: msg.into() }
    }
}
