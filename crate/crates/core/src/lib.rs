//! Asynchronous gossip simulation of Oja's method.
//!
//! Nodes of a communication model each hold one row of an `n × k` iterate.
//! A random scheduler picks one pair of nodes per round; the pair applies a
//! local Oja update, and later averages Gram-matrix entries so every node can
//! orthogonalize its own row. The second output column gives community labels
//! by sign, which a phased majority vote then cleans up.
//!
//! Modules, bottom up: [`linalg`] (dense eigensolver, Cholesky), [`model`]
//! (communication models and the scheduler), [`oja`], [`orth`],
//! [`community`], [`params`] (closed-form spectra and schedules) and
//! [`harness`] (trials, sweeps, CSV).

pub mod community;
pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod model;
pub mod oja;
pub mod orth;
pub mod params;
pub mod rng;

pub use error::{Error, Result};
