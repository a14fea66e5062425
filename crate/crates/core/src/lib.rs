//! Exact arithmetic behind period-index certificates for Brauer classes on
//! hyper-Kähler varieties of K3^[n]-type.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: the K3^[n] lattice, pairings, divisibility, primitivity and
//!   the orthogonal-pair search.
//! - [`brauer`]: B-field presentations `B / ell`, the index `I_X`, the period
//!   and the non-special test.
//! - [`congruence`]: the quadratic congruence `Q(x) = b w^2 (mod ell)`, smooth
//!   points mod p, Hensel lifting, CRT and residue-symbol obstructions.
//! - [`witness`]: Mukai data, twisted ranks, exponents and the certification
//!   pipeline.
//! - [`oracle`]: brute-force reference implementations used by the tests.
//! - [`report`]: scenario documents, JSON-lines reports and surveys.

pub mod arith;
pub mod brauer;
pub mod congruence;
pub mod decimal;
pub mod error;
pub mod lattice;
pub mod matrix;
pub mod oracle;
pub mod report;
pub mod witness;

pub use error::{Error, Result};
