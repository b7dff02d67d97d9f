//! Exact arithmetic for the polynomial tower `p_0 = x^2 - 2`,
//! `p_n = p_{n-1}^2 - 2`.
//!
//! * [`polyseq`] generates `p_n` (squaring) and `q_n` (composition), checks
//!   the Laurent identity `x^(2^(n+1)) p_n(x + 1/x) = x^(2^(n+2)) + 1` and
//!   certifies roots numerically.
//! * [`coeffs`] computes coefficient rows by back-substitution, by the level
//!   recursion (optionally truncated) and by closed forms.
//! * [`invariants`] computes the `n`-independent rationals `a_{j,k}` with
//!   `c_{n,2k} = Σ_j a_{j,k} 4^(jn)`, by recursion and by an exact
//!   divided-difference Vandermonde solve.
//! * [`trees`] enumerates labeled ordered trees and recovers `a_{k,k}` as a
//!   weighted Catalan number.
//! * [`verify`] runs every route against every other.

pub mod cache;
pub mod coeffs;
pub mod error;
pub mod format;
pub mod guard;
pub mod invariants;
pub mod numeric;
pub mod polyseq;
pub mod real;
pub mod trees;
pub mod verify;

pub use error::{Error, Result};
pub use guard::Limits;
