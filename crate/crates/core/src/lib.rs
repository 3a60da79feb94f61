//! Limited-belief reasoning: a sound, tractable approximation of
//! entailment over ground equality clauses, with a split budget per belief
//! level, plus a classical reference oracle and the reductions that show
//! where the budget becomes hard.

pub mod bench;
pub mod circuit;
pub mod cli;
pub mod engine;
pub mod fixtures;
pub mod format;
pub mod gadget;
pub mod gen;
pub mod lang;
pub mod netlist;
pub mod oracle;
pub mod qbf;
pub mod reduce;
pub mod solver;
pub mod suites;
pub mod threshold;
