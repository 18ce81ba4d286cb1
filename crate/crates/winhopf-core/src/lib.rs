//! Numerical operator calculus for Wiener-Hopf plus Hankel operators
//! `W(a) + H(b)` on the half-line, for exponential-rational symbol pairs
//! satisfying the matching condition `a(t) a(-t) = b(t) b(-t)`.
//!
//! The crate provides:
//! - exact symbol algebra (reflection, products, inverses, the indices
//!   `nu`, `n` and the signature `sigma`),
//! - Wiener-Hopf factorization with half-plane certificates,
//! - two independent finite-dimensional operator backends (Nystrom grid on
//!   `[0, T]` and a Laguerre-Galerkin truncation),
//! - the explicit one-sided / two-sided / generalized inverses of
//!   `W(a) + H(b)`, kernel bases, and an invertibility classifier,
//! - a verification harness with independent oracles for everything above.

pub mod acceptance;
pub mod classify;
pub mod error;
pub mod factor;
pub mod harness;
pub mod inverse;
pub mod io;
pub mod kernel;
pub mod operator;
pub mod poly;
pub mod symbol;

pub use error::{Error, Result};
pub use factor::Factorization;
pub use kernel::ExpPolyKernel;
pub use operator::{Backend, DiscreteOperator, Disc, Grid, LaguerreBasis};
pub use poly::ComplexPoly;
pub use symbol::{MatchingPair, Rational, Symbol};
