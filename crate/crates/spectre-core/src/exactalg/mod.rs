//! Exact arithmetic substrate: big rationals, dense Q-matrices, univariate
//! polynomials and matrices over Q[theta].

pub mod matrix;
pub mod rational;
pub mod theta;
pub mod unipoly;

pub use matrix::{char_poly, mat_rank, nilpotent_jordan_type, QMatrix};
pub use rational::{parse_rational, rat, rat_int, render_rational, Rational};
pub use theta::{ThetaMatrix, ThetaPoly};
pub use unipoly::{cyclotomic, rational_root_factor, RatFun, UniPoly};
