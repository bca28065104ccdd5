//! Certificates that Laguerre polynomials `L_n^(-n-s-1)` and their
//! unit-endpoint perturbations have no factor of a given degree.

pub mod arith;
pub mod criteria;
pub mod error;
pub mod fixtures;
pub mod newton;
pub mod polys;
pub mod search;
pub mod verify;

pub use error::Error;
