//! Koszul cohomology of canonical curves and polarized K3 surfaces over
//! finite fields.

pub mod error;
pub mod field;
pub mod graded;
pub mod koszul;
pub mod linalg;
pub mod models;
pub mod pencils;
pub mod verify;

pub use error::{Error, Result};
