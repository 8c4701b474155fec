//! Numerical tolerances shared across modules.

/// Hermiticity check, absolute entry-wise.
pub const HERM: f64 = 1e-9;
/// Unit-trace and unit-norm checks.
pub const TRACE: f64 = 1e-9;
/// Smallest eigenvalue accepted as nonnegative.
pub const PSD: f64 = 1e-8;
/// Eigendecomposition reconstruction residual.
pub const EIG: f64 = 1e-8;
/// Trace-preservation residual for Kraus families and Choi matrices.
pub const TP: f64 = 1e-8;
/// Slack for entropy inequalities.
pub const ENT: f64 = 1e-7;
/// Relative primal-dual gap at which a diamond-norm solve counts as optimal.
pub const SDP: f64 = 1e-6;
/// Optimizer shortfall allowed when comparing maximized quantities.
pub const OPT: f64 = 1e-3;
/// Eigenvalue floor inside entropy gradients.
pub const PERTURB: f64 = 1e-10;

/// Largest matrix dimension a Kronecker product may produce.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Run-time overridable tolerance set (the CLI exposes `--tol-*` flags).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
    pub tp: f64,
    pub ent: f64,
    pub sdp: f64,
    pub opt: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: HERM,
            trace: TRACE,
            psd: PSD,
            tp: TP,
            ent: ENT,
            sdp: SDP,
            opt: OPT,
        }
    }
}
