//! Exact construction of locally loop algebras, their twisted forms and
//! affine extensions at finite truncation, with verification of the
//! structural identities they satisfy.

pub mod error;
pub mod exact;
pub mod forms;
pub mod linalg;
pub mod loops;
pub mod matrix;
pub mod simple;
pub mod verify;

pub use error::{Error, Result};
