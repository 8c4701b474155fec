//! Numerical laboratory for finite-dimensional quantum channels.
//!
//! The crate computes channel distances (trace norm, diamond norm through a
//! dedicated interior-point solver), entropic quantities, single-letter
//! capacity proxies, and checks the entropy/capacity continuity bounds on
//! randomized and constructed channel pairs.
//!
//! Logarithms are base 2 throughout; every entropy is in bits.

#![forbid(unsafe_code)]
// `!(a >= b)` is used on purpose so NaN fails checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assisted;
pub mod capopt;
pub mod channels;
pub mod continuity;
pub mod distance;
pub mod entropic;
mod error;
pub mod io;
pub mod linalg;
pub mod random;
pub mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use channels::{ChoiMatrix, IsometricExtension, QuantumChannel};
pub use entropic::Ensemble;
pub use linalg::{ComplexMatrix, DensityMatrix, PureState};
