//! Exact-rational verification engine for characteristic-class identities.
//!
//! The crate provides, bottom up:
//!
//! * [`rat`] — arbitrary-precision rationals, the coefficient field;
//! * [`numbers`] — Bernoulli and Euler number kernels with two
//!   independently computed routes between them;
//! * [`series`] — truncated graded power series in Chern-root variables;
//! * [`symfun`] — power-sum decompositions of symmetric series;
//! * [`classes`] — split K-theory classes with exterior powers, Chern
//!   character, Todd class, and the top-Chern-class identity;
//! * [`weight_one`] — the degree-by-degree argument that even/odd wedge
//!   vanishing forces the Chern character of a weight-one bundle into
//!   degree zero;
//! * [`grr`] — the boundary-configuration ledger: delta invariants, the
//!   kill/substitute rewriting system, pushforward vanishing, and the
//!   correction-term audit;
//! * [`cone`] — integer lattice cones, the involution action, smoothness
//!   via Smith normal form, and the even-level fixed-point check.

pub mod classes;
pub mod cone;
pub mod grr;
pub mod linalg;
pub mod numbers;
pub mod rat;
pub mod series;
pub mod symfun;
pub mod weight_one;

pub use rat::Rat;
