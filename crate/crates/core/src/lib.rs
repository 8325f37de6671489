//! Exact G2 structure theory and local zeta integral checks for the
//! adjoint L-function of GL(3).

pub mod archzeta;
pub mod checks;
pub mod error;
pub mod g2core;
pub mod iwasawa;
pub mod linalg;
pub mod numkernel;
pub mod orbits;
pub mod par;
pub mod quad;
pub mod quasibeta;
pub mod special;
pub mod unramzeta;

pub use error::{Error, Result};
pub use numkernel::{rat, Rational};
