//! Continuity bounds for entropies and capacity proxies, and the harness
//! that checks them on sampled states and channel pairs.
//!
//! All distances `ε` are full trace norms (`‖ρ − σ‖₁`, `‖N − M‖⋄`), matching
//! the forms `ε log d + H(ε)` and `4ε log d + 2H(ε)`.

mod demo;
mod harness;
mod hybrid;
mod suites;

pub use demo::{discontinuity_demo, DemoRow, DEMO_CSV_HEADER};
pub use harness::{
    random_pair, random_pairs, verify_corollaries, verify_corollaries_at, verify_output_entropy,
    verify_output_entropy_at, ChannelPair, HarnessRun, HarnessSettings, MAX_HARNESS_EPS, MAX_MIX,
};
pub use hybrid::{hybrid_sequence, HybridSequence};
pub use suites::{af_suite, fannes_suite, SuiteSummary};

use serde::Serialize;

use crate::entropic::h2;
use crate::{Error, Result};

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::arg(format!("distance {eps} outside [0, 1]")));
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::dim("dimension must be positive"));
    }
    Ok(())
}

/// `ε log d + H(ε)`.
pub fn fannes_bound(eps: f64, d: usize) -> Result<f64> {
    check_eps(eps)?;
    check_dim(d)?;
    Ok(eps * (d as f64).log2() + h2(eps))
}

/// `4ε log d_A + 2H(ε)` for conditional entropies `S(A|B)`.
pub fn af_bound(eps: f64, d_a: usize) -> Result<f64> {
    check_eps(eps)?;
    check_dim(d_a)?;
    Ok(4.0 * eps * (d_a as f64).log2() + 2.0 * h2(eps))
}

/// `n (4ε log d_B + 2H(ε))`: bound on `|S((I⊗N^{⊗n})φ) − S((I⊗M^{⊗n})φ)|`
/// when `‖N − M‖⋄ ≤ ε`.
pub fn output_entropy_bound(n: usize, eps: f64, d_b: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::arg("copy count must be at least 1"));
    }
    Ok(n as f64 * af_bound(eps, d_b)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryBounds {
    pub classical: f64,
    pub quantum: f64,
    pub private: f64,
}

/// Capacity continuity bounds: `8ε log d_B + 4H(ε)` for the classical and
/// quantum capacities, twice that for the private capacity.
pub fn corollary_bounds(eps: f64, d_b: usize) -> Result<CorollaryBounds> {
    let c = 2.0 * af_bound(eps, d_b)?;
    Ok(CorollaryBounds {
        classical: c,
        quantum: c,
        private: 2.0 * c,
    })
}

/// Per-copy gap bound implied by finite data on a regularized quantity.
///
/// `a[k]`, `b[k]` are the values of `f_{n}` at `n = k + 1` for the two
/// channels (each already maximized over its parameters). The smallest
/// constant `c` with `|a_n − b_n| ≤ n c` on the supplied range is returned
/// together with the per-copy gap at the largest `n`, which never exceeds
/// `c`.
pub fn regularized_gap(a: &[f64], b: &[f64]) -> Result<RegularizedGap> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::arg("need equally long, nonempty value sequences"));
    }
    let c = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(k, (x, y))| (x - y).abs() / (k + 1) as f64)
        .fold(0.0, f64::max);
    let n = a.len();
    Ok(RegularizedGap {
        constant: c,
        per_copy_gap: (a[n - 1] - b[n - 1]).abs() / n as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularizedGap {
    pub constant: f64,
    pub per_copy_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// A proven inequality; a negative margin is a violation.
    Hard,
    /// Compared against lower bounds only; reported, never a violation.
    Informational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialMeta {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<usize>,
    pub trial: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channels: Option<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub quantity: String,
    pub kind: CheckKind,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub violation: bool,
    pub epsilon: f64,
    pub n: usize,
    pub d_b: usize,
    pub meta: TrialMeta,
}

impl BoundReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        quantity: impl Into<String>,
        kind: CheckKind,
        measured: f64,
        bound: f64,
        tolerance: f64,
        epsilon: f64,
        n: usize,
        d_b: usize,
        meta: TrialMeta,
    ) -> Self {
        let margin = bound - measured;
        Self {
            quantity: quantity.into(),
            kind,
            measured,
            bound,
            margin,
            tolerance,
            violation: kind == CheckKind::Hard && !(margin >= -tolerance),
            epsilon,
            n,
            d_b,
            meta,
        }
    }

    pub fn with_channels(mut self, a: &str, b: &str) -> Self {
        self.meta.channels = Some([a.to_string(), b.to_string()]);
        self
    }
}

pub fn count_violations(reports: &[BoundReport]) -> usize {
    reports.iter().filter(|r| r.violation).count()
}
