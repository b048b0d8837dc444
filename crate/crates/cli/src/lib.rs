//! Command-line front end: kernel spec files, analysis reports, orbit
//! simulation, the conjugation counterexample and built-in verification.

pub mod analyze;
pub mod demo;
pub mod output;
pub mod simulate;
pub mod spec;
pub mod verify;
