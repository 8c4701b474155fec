use num_complex::Complex64 as C64;

use super::QuantumChannel;
use crate::linalg::{eigh, partial_trace_matrix, ComplexMatrix};
use crate::{tol, Error, Result};

/// Choi matrix `J = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)` on `in ⊗ out` of a linear map.
///
/// `Φ` is completely positive iff `J ⪰ 0` and trace preserving iff
/// `Tr_out J = I_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
    d_in: usize,
    d_out: usize,
}

impl ChoiMatrix {
    pub fn new(matrix: ComplexMatrix, d_in: usize, d_out: usize) -> Result<Self> {
        let d = d_in * d_out;
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::dim(format!(
                "Choi matrix of a {d_in}->{d_out} map must be {d}x{d}"
            )));
        }
        Ok(Self {
            matrix,
            d_in,
            d_out,
        })
    }

    pub fn from_channel(ch: &QuantumChannel) -> Self {
        let (d_in, d_out) = (ch.d_in(), ch.d_out());
        let mut m = ComplexMatrix::zeros(d_in * d_out, d_in * d_out);
        for k in ch.kraus() {
            // |K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩
            let v: Vec<C64> = (0..d_in * d_out)
                .map(|idx| k[(idx % d_out, idx / d_out)])
                .collect();
            m += &ComplexMatrix::outer(&v, &v);
        }
        Self {
            matrix: m,
            d_in,
            d_out,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// Action of the represented map: `Φ(X) = Tr_in[(Xᵀ ⊗ I) J]`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.d_in || x.cols() != self.d_in {
            return Err(Error::dim("operator does not match the map's input dimension"));
        }
        let (di, dout) = (self.d_in, self.d_out);
        let mut out = ComplexMatrix::zeros(dout, dout);
        for i in 0..di {
            for j in 0..di {
                let c = x[(i, j)];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                for a in 0..dout {
                    for b in 0..dout {
                        out[(a, b)] += c * self.matrix[(i * dout + a, j * dout + b)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Smallest eigenvalue; nonnegative (within tolerance) iff the map is CP.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = eigh(&self.matrix)?;
        Ok(vals.last().copied().unwrap_or(0.0))
    }

    /// `max |Tr_out J − I|`.
    pub fn tp_defect(&self) -> f64 {
        partial_trace_matrix(&self.matrix, &[self.d_in, self.d_out], &[0])
            .map(|r| r.max_abs_diff(&ComplexMatrix::identity(self.d_in)))
            .unwrap_or(f64::INFINITY)
    }

    pub fn is_cp(&self, tol_psd: f64) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -tol_psd)
    }

    pub fn is_tp(&self, tol_tp: f64) -> bool {
        self.tp_defect() <= tol_tp
    }

    /// Canonical Kraus family by eigendecomposition.
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        self.to_channel_with(tol::PSD, tol::TP)
    }

    pub(crate) fn to_channel_with(&self, tol_psd: f64, tol_tp: f64) -> Result<QuantumChannel> {
        let (vals, vecs) = eigh(&self.matrix)?;
        let min_ev = vals.last().copied().unwrap_or(0.0);
        if min_ev < -tol_psd {
            return Err(Error::CpViolation {
                min_eigenvalue: min_ev,
            });
        }
        let deviation = self.tp_defect();
        if deviation > tol_tp {
            return Err(Error::TpViolation { deviation });
        }
        let (di, dout) = (self.d_in, self.d_out);
        let mut kraus: Vec<ComplexMatrix> = vals
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > tol_psd)
            .map(|(k, &l)| {
                let s = l.sqrt();
                ComplexMatrix::from_fn(dout, di, |o, i| vecs[(i * dout + o, k)] * s)
            })
            .collect();
        if kraus.is_empty() {
            kraus.push(ComplexMatrix::zeros(dout, di));
        }
        QuantumChannel::with_tolerance(di, dout, kraus, tol_tp.max(tol::TP))
    }
}

impl QuantumChannel {
    pub fn to_choi(&self) -> ChoiMatrix {
        ChoiMatrix::from_channel(self)
    }

    pub fn from_choi(choi: &ChoiMatrix) -> Result<QuantumChannel> {
        choi.to_channel()
    }
}
