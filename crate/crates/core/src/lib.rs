//! Numerical-radius seminorms on finite-dimensional normed spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`space`] models real and complex normed spaces (ℓ∞, ℓ1, ℓ2 and
//!   symmetric polytope norms) and enumerates the normalized duality pairs
//!   `(x*, x)` that index numerical-radius-type seminorms.
//! * [`radius`] evaluates `‖T‖_W = sup |x*(Tx)|`, the numerical radius, the
//!   q-numerical radius, active sets and numerical-index estimates.
//! * [`approx`] solves `min_U ‖T − U‖_W` over an affine operator family by
//!   minimax linear programming.
//! * [`certify`] builds Kolmogorov-type optimality certificates, reduces them
//!   with Carathéodory's theorem and computes strong-unicity constants.
//! * [`extend`] computes minimal numerical-radius extensions and projections.
//!
//! Pair evaluation and random sweeps run on rayon when the `parallel`
//! feature (on by default) is enabled; every reduction is order-independent
//! or performed in canonical order so results are bit-stable either way.

pub mod approx;
pub mod certify;
pub mod error;
pub mod extend;
pub mod linalg;
pub mod lp;
pub mod par;
pub mod radius;
pub mod scalar;
pub mod space;

pub use error::{Error, Result};
pub use scalar::C64;
