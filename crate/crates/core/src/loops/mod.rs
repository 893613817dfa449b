//! The seven locally loop algebras at finite truncation.

mod algebra;
mod element;

pub use algebra::*;
pub use element::*;
