//! Exact computation of spectral invariants of tame polynomials.
//!
//! The crate computes, over arbitrary-precision rationals and with no
//! rounding anywhere: Milnor algebras, the Brieskorn-lattice matrix of
//! t = theta^2 d/dtheta, the V-filtration and spectrum of a meromorphic
//! connection with lattice (given abstractly by matrix data or derived
//! from a polynomial), Newton polyhedra and the Newton spectrum,
//! Birkhoff normal forms and good bases, monodromy characteristic
//! polynomials, and Mellin-transform determinant formulas.

pub mod error;
pub mod exactalg;
pub mod poly;
pub mod groebner;
pub mod newton;
pub mod brieskorn;
pub mod lattice;
pub mod birkhoff;
pub mod mellin;
pub mod corpus;

pub use error::{Error, Result};
