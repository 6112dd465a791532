//! Graded multimodal logic over finite Kripke models, counting message-passing
//! automata, and Weisfeiler-Leman refinement, with translations between
//! disjunctions of formulas and automata.

pub mod automaton;
pub mod format;
pub mod gfp;
pub mod gmml;
pub mod grid;
pub mod kripke;
pub mod stream;
pub mod translate;
pub mod types;
pub mod wl;
