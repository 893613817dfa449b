//! Checks over built algebras. Every check produces a named pass/fail entry
//! with a witness on failure.

pub mod center;
pub mod derivations;
pub mod formsuite;
pub mod generation;
pub mod jacobi;
pub mod report;
pub mod rootdatum;
pub mod spectrum;
pub mod structure;
pub mod suite;
pub mod torus;

pub use report::{Check, VerificationReport};
