use crate::channels::QuantumChannel;
use crate::distance::trace_distance;
use crate::entropic::conditional_entropy_of;
use crate::linalg::DensityMatrix;
use crate::{tol, Error, Result};

/// Interpolating states `ρᵏ = (I_A ⊗ M^{⊗k} ⊗ N^{⊗(n−k)})(φ)`, `k = 0..=n`,
/// on factors `[A, B_1, …, B_n]`.
///
/// Consecutive states differ only in output `B_k`, so their marginals on
/// `A B_{≠k}` agree.
#[derive(Debug, Clone)]
pub struct HybridSequence {
    states: Vec<DensityMatrix>,
}

impl HybridSequence {
    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn n(&self) -> usize {
        self.states.len() - 1
    }

    /// `|S(B_k | A B_{≠k})_{ρ^{k−1}} − S(B_k | A B_{≠k})_{ρᵏ}|` for `k = 1..=n`.
    pub fn step_differences(&self) -> Result<Vec<f64>> {
        (1..=self.n())
            .map(|k| {
                let before = conditional_entropy_of(&self.states[k - 1], &[k])?;
                let after = conditional_entropy_of(&self.states[k], &[k])?;
                Ok((before - after).abs())
            })
            .collect()
    }

    /// `‖ρᵏ − ρ^{k−1}‖₁` for `k = 1..=n`.
    pub fn consecutive_distances(&self) -> Result<Vec<f64>> {
        self.states
            .windows(2)
            .map(|w| trace_distance(&w[0], &w[1]))
            .collect()
    }
}

/// Builds the hybrid sequence for `φ` on `[A, A'_1, …, A'_n]`.
pub fn hybrid_sequence(
    n_ch: &QuantumChannel,
    m_ch: &QuantumChannel,
    phi: &DensityMatrix,
    n: usize,
) -> Result<HybridSequence> {
    if n == 0 {
        return Err(Error::arg("copy count must be at least 1"));
    }
    if (n_ch.d_in(), n_ch.d_out()) != (m_ch.d_in(), m_ch.d_out()) {
        return Err(Error::dim("channels must share input and output dimensions"));
    }
    let dims = phi.dims();
    if dims.len() != n + 1 || dims[1..].iter().any(|&d| d != n_ch.d_in()) {
        return Err(Error::dim(format!(
            "input must have factors [A, {} x {}], got {dims:?}",
            n,
            n_ch.d_in()
        )));
    }
    let out_dim = dims[0].saturating_mul(n_ch.d_out().saturating_pow(n as u32));
    if out_dim > tol::DEFAULT_MAX_DIM {
        return Err(Error::dim(format!("output dimension {out_dim} exceeds budget")));
    }
    let states = (0..=n)
        .map(|k| {
            let mut rho = phi.clone();
            for f in 1..=n {
                let ch = if f <= k { m_ch } else { n_ch };
                rho = ch.apply_on_factor(&rho, f)?;
            }
            Ok(rho)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HybridSequence { states })
}
