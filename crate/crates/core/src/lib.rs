//! Exact computations with curved A∞-deformations over truncated local bases: relation checks,
//! Hochschild calculus, homological splittings, classical and deformed minimal models, twisted
//! completions and deformed functors.

pub mod ainf;
pub mod base;
pub mod deformed;
pub mod error;
pub mod functor;
pub mod graded;
pub mod hochschild;
pub mod instances;
pub mod kadeishvili;
pub mod linalg;
pub mod report;
pub mod splitting;
pub mod twisted;

pub use error::{Error, Result};
