//! Word problem solvers for automaton groups and for instance groups with an
//! expanding endomorphism, instrumented with elementary-step accounting.
//!
//! Words act on the left-to-right convention described in [`automaton`].

pub mod activity;
pub mod automaton;
pub mod bench;
pub mod builtin;
pub mod contraction;
pub mod error;
pub mod nilpotent;
pub mod solvers;
pub mod word_engine;

pub use automaton::{Automaton, Letter, Permutation, StateId, Word};
pub use error::{Error, Result};
