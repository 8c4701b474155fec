//! Trace distance between states and the diamond norm of
//! Hermiticity-preserving maps.

mod sdp;

pub use sdp::{SdpOptions, SdpResult, SdpStatus};

use crate::channels::{ChoiMatrix, QuantumChannel};
use crate::linalg::{eigvalsh, trace_norm, ComplexMatrix, DensityMatrix};
use crate::random::{haar_pure_state, SeedStream};
use crate::{tol, Error, Result, C64};

/// `‖ρ − σ‖₁`, the full trace norm of the difference.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dim("trace distance between states of different dimension"));
    }
    trace_norm(&(rho.matrix() - sigma.matrix()))
}

/// `½‖ρ − σ‖₁`, the operational trace distance in `[0,1]`.
pub fn half_trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(0.5 * trace_distance(rho, sigma)?)
}

/// Linear map given by a Hermitian Choi matrix, typically a difference of
/// channels.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianPreservingMap {
    choi: ChoiMatrix,
}

impl HermitianPreservingMap {
    pub fn new(choi: ChoiMatrix) -> Result<Self> {
        let defect = choi.matrix().hermiticity_defect();
        if defect > tol::HERM * choi.matrix().max_abs().max(1.0) {
            return Err(Error::arg(format!(
                "Choi matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        let matrix = choi.matrix().hermitian_part();
        Ok(Self {
            choi: ChoiMatrix::new(matrix, choi.d_in(), choi.d_out())?,
        })
    }

    pub fn from_channel(ch: &QuantumChannel) -> Self {
        Self {
            choi: ch.to_choi(),
        }
    }

    /// `a − b`.
    pub fn from_channels(a: &QuantumChannel, b: &QuantumChannel) -> Result<Self> {
        if a.d_in() != b.d_in() || a.d_out() != b.d_out() {
            return Err(Error::dim("channels with different dimensions"));
        }
        let m = a.to_choi().matrix() - b.to_choi().matrix();
        Ok(Self {
            choi: ChoiMatrix::new(m, a.d_in(), a.d_out())?,
        })
    }

    pub fn zero(d_in: usize, d_out: usize) -> Self {
        let d = d_in * d_out;
        Self {
            choi: ChoiMatrix::new(ComplexMatrix::zeros(d, d), d_in, d_out)
                .expect("square of matching size"),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            choi: ChoiMatrix::new(self.choi.matrix().scale_real(c), self.d_in(), self.d_out())
                .expect("shape unchanged"),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.d_in() != other.d_in() || self.d_out() != other.d_out() {
            return Err(Error::dim("maps with different dimensions"));
        }
        Ok(Self {
            choi: ChoiMatrix::new(
                self.choi.matrix() + other.choi.matrix(),
                self.d_in(),
                self.d_out(),
            )?,
        })
    }

    pub fn choi(&self) -> &ChoiMatrix {
        &self.choi
    }

    pub fn d_in(&self) -> usize {
        self.choi.d_in()
    }

    pub fn d_out(&self) -> usize {
        self.choi.d_out()
    }

    /// `(I_ref ⊗ Φ)(|ψ⟩⟨ψ|)` for `|ψ⟩ = Σ Ψ_{ir} |i⟩_in |r⟩_ref`, on
    /// `ref ⊗ out`.
    pub fn apply_to_purification(&self, coeffs: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (di, dout) = (self.d_in(), self.d_out());
        if coeffs.rows() != di {
            return Err(Error::dim("coefficient matrix rows must equal d_in"));
        }
        let dr = coeffs.cols();
        // A = Ψᵀ ⊗ I_out
        let a = ComplexMatrix::from_fn(dr * dout, di * dout, |row, col| {
            let (r, o) = (row / dout, row % dout);
            let (i, o2) = (col / dout, col % dout);
            if o == o2 {
                coeffs[(i, r)]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(a.conjugate(self.choi.matrix()))
    }
}

/// `‖Φ‖⋄` with default solver options.
pub fn diamond_norm(map: &HermitianPreservingMap) -> Result<SdpResult> {
    diamond_norm_with(map, &SdpOptions::default())
}

pub fn diamond_norm_with(map: &HermitianPreservingMap, opts: &SdpOptions) -> Result<SdpResult> {
    sdp::solve(map.choi().matrix(), map.d_in(), map.d_out(), opts)
}

/// Diamond distance `‖a − b‖⋄` between two channels.
pub fn diamond_distance(a: &QuantumChannel, b: &QuantumChannel) -> Result<SdpResult> {
    diamond_norm(&HermitianPreservingMap::from_channels(a, b)?)
}

fn hermitian_trace_norm(h: &ComplexMatrix) -> Result<f64> {
    Ok(eigvalsh(&h.hermitian_part())?.iter().map(|v| v.abs()).sum())
}

/// Lower bound on `‖Φ‖⋄` from the maximally entangled input and `trials`
/// Haar-random pure inputs on `in ⊗ ref` with `dim ref = d_in`.
pub fn diamond_lower_probe(map: &HermitianPreservingMap, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::arg("probe needs at least one trial"));
    }
    let di = map.d_in();
    let mut best = hermitian_trace_norm(map.choi().matrix())? / di as f64;
    let streams = SeedStream::new(seed);
    for t in 0..trials {
        let mut rng = streams.rng(&[t as u64]);
        let psi = haar_pure_state(&mut rng, &[di, di]);
        let out = map.apply_to_purification(&psi.coefficient_matrix())?;
        best = best.max(hermitian_trace_norm(&out)?);
    }
    Ok(best)
}
