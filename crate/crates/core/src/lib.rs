//! Finite automata model of weak concurrent Kleene algebra: term compilation,
//! rooted η-simulation, may testing, probabilistic automata and a Rabin
//! choice-coordination case study.

pub mod alphabet;
pub mod automaton;
pub mod error;
pub mod ops;
pub mod rational;

pub use alphabet::{ActionId, ActionKind, Alphabet, Frame};
pub use automaton::{Automaton, AutomatonBuilder, StateId, Transition};
pub use error::{Error, Result};
pub mod exec;
pub mod simulation;
pub mod term;
pub mod observation;
pub mod lp;
pub mod probability;
pub mod gen;
pub mod crosscheck;
pub mod laws;
pub mod rabin;
pub mod io;
pub mod dot;
