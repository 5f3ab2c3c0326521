//! Input/output conformance checking and test generation for labelled
//! transition systems.

pub mod automata;
pub mod catalog;
pub mod models;
pub mod conformance;
pub mod testgen;
pub mod runner;
pub mod cli;
