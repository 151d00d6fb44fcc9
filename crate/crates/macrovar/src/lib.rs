//! Vector autoregression toolkit for small annual macro panels, plus a
//! deterministic equation set for a textbook dynamic general-equilibrium
//! economy.
//!
//! The crate is organized around three layers:
//!
//! * [`numerics`] holds the dense linear algebra the rest builds on:
//!   Householder-QR least squares, Cholesky factorization, and spectral
//!   radius via Hessenberg reduction with double-shift QR.
//! * [`timeseries`] turns raw per-country annual observations into
//!   estimation-ready samples: transform chains (log, difference,
//!   standardize), missing-value bookkeeping, and complete-case
//!   extraction.
//! * [`var`] estimates VAR(p) systems equation by equation, inverts them
//!   to moving-average form, produces orthogonalized impulse responses
//!   with residual-bootstrap confidence bands, forecast-error variance
//!   decompositions, and information-criterion lag selection.
//! * [`dsge`] evaluates the household utility, production, budget, and
//!   policy-rate equations of a small closed-form economy and simulates
//!   deterministic paths from them.
//!
//! All randomness is seeded explicitly and all parallel reductions are
//! ordered, so equal inputs give bitwise-equal outputs across runs and
//! thread counts.

pub mod dsge;
pub mod numerics;
pub mod timeseries;
pub mod var;

pub use numerics::{Matrix, NumericsError};
