//! Quasigroup operations for which shift-like maps are automorphisms.
//!
//! - [`quasigroup`]: finite quasigroups as Latin squares, the translation
//!   quasigroup `λ(x + y) mod n` for odd `n`, idempotent squares.
//! - [`symbolic`]: periodic points of full shifts and the rotor system
//!   `shift x (+1 mod B)` with its canonical operation.
//! - [`decomposition`]: product shifts, sections, and the right-nested
//!   factorization of a point into section members.
//! - [`interval`]: the `x -> Mx mod 1` map, its digit conjugacy and the
//!   partially defined operation pulled back through it.
//! - [`oracle`]: exhaustive certifiers used to cross-check the above.

pub mod decomposition;
pub mod error;
pub mod interval;
pub mod oracle;
pub mod quasigroup;
pub mod symbolic;

pub use error::{Error, Result};
