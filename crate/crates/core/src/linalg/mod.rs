//! Dense complex linear algebra: Kronecker products, partial traces,
//! Hermitian eigendecomposition, purification and the trace norm.
//!
//! Matrices are stored row-major. Eigen- and singular-value computations are
//! delegated to `nalgebra`.

mod decomp;
mod matrix;
mod state;

pub use decomp::{
    eigh, eigvalsh, hermitian_map, partial_trace, partial_trace_matrix, permute_factors, purify,
    singular_values, spectral_norm_hermitian, trace_norm,
};
pub(crate) use decomp::spectral_sum;
pub use matrix::{tensor, ComplexMatrix};
pub use state::{DensityMatrix, PureState};
