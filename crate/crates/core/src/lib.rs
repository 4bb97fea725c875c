//! Exact-arithmetic verification of face-centered quad equations.
//!
//! The crate encodes a catalogue of face-centered quad equations, checks their
//! consistency around a face-centered cube (CAFCC), builds their Lax matrices
//! by two generic procedures, and certifies every identity as an exact
//! rational zero.
//!
//! - [`exactnum`]: exact rationals and rational surd parametrisations.
//! - [`catalogue`]: the equations, their legs and symmetries.
//! - [`cube`]: the 14 centered equations and the six-step CAFCC runner.
//! - [`lax`]: Lax-matrix builders, normalisations and closed-form oracles.
//! - [`verify`]: seeded sampling and the property suites.

pub mod catalogue;
pub mod cube;
pub mod exactnum;
pub mod lax;
pub mod verify;

#[cfg(test)]
mod proptests;

pub use exactnum::{make_surd, s, NumError, Scalar, SurdKind, SurdParam};
