//! Misère-play equivalence of Nim positions.
//!
//! - [`game`]: hash-consed short games, sums and misère outcomes.
//! - [`nim`]: Nim positions, shortlex order, reduced forms and the misère Nim rule.
//! - [`equivalence`]: recursive tests for impartial equivalence and the partizan order.
//! - [`oracle`]: context search and the classification/verification harness.
//! - [`cli`]: notation parsers and the command-line front end.

pub mod cli;
pub mod equivalence;
pub mod game;
pub mod nim;
pub mod oracle;

pub use equivalence::{CheckMode, EquivCache};
pub use game::{outcome_ge, GameError, GameRef, GameStore, Outcome};
pub use nim::{enumerate_positions, quasi_lex_cmp, xor1, NimPosition, ReducedNimPosition};
pub use oracle::{ClassReport, ContextKind, ContextSet, Oracle, OracleConfig, OracleError};
