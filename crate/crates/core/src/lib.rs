//! Exact order bounds for finite subgroups of GL_n, PGL_n and the space
//! Cremona group over number fields, together with a checked ledger of how
//! those bounds combine.

pub mod bounds;
pub mod cyclotomic;
pub mod diophantine;
pub mod error;
pub mod exactnum;
pub mod ledger;
pub mod totient;

pub use error::{Error, Result};
pub use exactnum::{FactoredInteger, Prime};
