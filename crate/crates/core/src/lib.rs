//! Simulation of a displacement–squeeze receiver for binary phase-shift
//! keyed displaced squeezed vacuum states.
//!
//! Quadratures follow `x = (a + a†)/√2`, so the vacuum covariance is `I/2`
//! and a coherent amplitude `α` has mean `√2 (Re α, Im α)`.

pub mod benchmarks;
pub mod channels;
pub mod detection;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod numeric;
pub mod receiver;
pub mod sweep;

pub use error::{Error, Result};
