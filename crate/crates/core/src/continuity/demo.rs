use rayon::prelude::*;
use serde::Serialize;

use super::corollary_bounds;
use crate::channels::{truncated_classical_pair, truncated_quantum_pair};
use crate::distance::{diamond_distance, SdpStatus};
use crate::entropic::{coherent_information, holevo_information, Ensemble};
use crate::linalg::DensityMatrix;
use crate::{tol, Error, Result};

pub const DEMO_CSV_HEADER: &str = "n,diamond_eps,two_over_log_n,classical_lb,quantum_lb,corollary_bound";

/// One row of the truncated discontinuity table.
///
/// For the classical pair `N` is the sink (capacity 0), so `classical_lb`
/// also lower-bounds the capacity gap; likewise the quantum base is a 50%
/// erasure with zero quantum capacity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoRow {
    pub n: usize,
    pub d_b: usize,
    /// Certified upper bound on `‖N − M_n‖⋄` for the classical pair.
    pub diamond_eps: f64,
    pub diamond_status: SdpStatus,
    pub two_over_log_n: f64,
    /// `I(X;B)` of `M_n` at the uniform basis ensemble.
    pub classical_lb: f64,
    /// `I^coh` of the quantum example at the maximally entangled input.
    pub quantum_lb: f64,
    /// `8ε log d_B + 4H(ε)`; absent when `ε > 1`, where the form is undefined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corollary_bound: Option<f64>,
    pub quantum_eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantum_corollary_bound: Option<f64>,
    /// `classical_lb / diamond_eps`.
    pub gap_ratio: f64,
    /// Both measured gaps are within their bounds (vacuously when absent).
    pub consistent: bool,
}

impl DemoRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            self.diamond_eps,
            self.two_over_log_n,
            self.classical_lb,
            self.quantum_lb,
            self.corollary_bound.map(|b| b.to_string()).unwrap_or_default()
        )
    }
}

/// Distances slightly above 1 from solver rounding are treated as 1.
fn bound_at(eps: f64, d_b: usize) -> Result<Option<f64>> {
    if eps > 1.0 + tol::SDP {
        return Ok(None);
    }
    Ok(Some(corollary_bounds(eps.clamp(0.0, 1.0), d_b)?.classical))
}

fn demo_row(n: usize) -> Result<DemoRow> {
    let (sink, m_n) = truncated_classical_pair(n)?;
    let (base, q_n) = truncated_quantum_pair(n)?;
    let d_b = m_n.d_out();
    let classical = diamond_distance(&sink, &m_n)?;
    let quantum = diamond_distance(&base, &q_n)?;
    if classical.status == SdpStatus::Infeasible || quantum.status == SdpStatus::Infeasible {
        return Err(Error::Numeric(format!("diamond-norm solve broke down at n = {n}")));
    }
    let classical_lb = holevo_information(&m_n, &Ensemble::uniform_basis(n))?;
    let quantum_lb = coherent_information(&q_n, &DensityMatrix::maximally_entangled(n))?;
    let corollary_bound = bound_at(classical.value, d_b)?;
    let quantum_corollary_bound = bound_at(quantum.value, d_b)?;
    let within = |gap: f64, b: Option<f64>| b.is_none_or(|b| gap <= b + tol::ENT);
    Ok(DemoRow {
        n,
        d_b,
        diamond_eps: classical.value,
        diamond_status: classical.status,
        two_over_log_n: 2.0 / (n as f64).log2(),
        classical_lb,
        quantum_lb,
        corollary_bound,
        quantum_eps: quantum.value,
        quantum_corollary_bound,
        gap_ratio: classical_lb / classical.value,
        consistent: within(classical_lb, corollary_bound) && within(quantum_lb, quantum_corollary_bound),
    })
}

/// Rows for each `n ≥ 2` in `n_values`, in the given order.
pub fn discontinuity_demo(n_values: &[usize]) -> Result<Vec<DemoRow>> {
    if let Some(&bad) = n_values.iter().find(|&&n| n < 2) {
        return Err(Error::arg(format!("truncation size {bad} must be at least 2")));
    }
    n_values.par_iter().map(|&n| demo_row(n)).collect()
}
