//! Quantum channels in Kraus form, with Choi and Stinespring views,
//! mixtures, tensor powers, complementary channels and the named channel
//! families used by the harnesses.

mod choi;
mod named;

pub use choi::ChoiMatrix;
pub use named::{
    constant_channel, dephasing, depolarizing, embedded_identity, erasure, identity, sink_channel,
    truncated_classical_example, truncated_classical_pair, truncated_quantum_base,
    truncated_quantum_example, truncated_quantum_pair,
};

use num_complex::Complex64 as C64;

use crate::linalg::{ComplexMatrix, DensityMatrix};
use crate::{tol, Error, Result};

/// Completely positive trace-preserving map stored as a Kraus family.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    d_in: usize,
    d_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    /// Validates operator shapes and `Σ K†K = I` within [`tol::TP`].
    pub fn new(d_in: usize, d_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(d_in, d_out, kraus, tol::TP)
    }

    pub fn with_tolerance(
        d_in: usize,
        d_out: usize,
        kraus: Vec<ComplexMatrix>,
        tp_tol: f64,
    ) -> Result<Self> {
        if d_in == 0 || d_out == 0 {
            return Err(Error::dim("channel dimensions must be positive"));
        }
        if kraus.is_empty() {
            return Err(Error::arg("a channel needs at least one Kraus operator"));
        }
        if let Some(k) = kraus.iter().find(|k| k.rows() != d_out || k.cols() != d_in) {
            return Err(Error::dim(format!(
                "Kraus operator is {}x{}, expected {d_out}x{d_in}",
                k.rows(),
                k.cols()
            )));
        }
        let ch = Self { d_in, d_out, kraus };
        let deviation = ch.tp_defect();
        if deviation > tp_tol {
            return Err(Error::TpViolation { deviation });
        }
        Ok(ch)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `max |Σ K†K − I|` entry-wise.
    pub fn tp_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            sum += &k.adjoint().matmul(k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.d_in))
    }

    /// Applies the channel to a state on `d_in`; the output has one factor.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.d_in {
            return Err(Error::dim(format!(
                "channel input dimension {} does not match state dimension {}",
                self.d_in,
                rho.dim()
            )));
        }
        let out = self.apply_operator(rho.matrix());
        Ok(DensityMatrix::from_parts_unchecked(out, vec![self.d_out]))
    }

    /// `Σ K X K†` for an arbitrary `d_in x d_in` operator.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out += &k.conjugate(x);
        }
        out
    }

    /// Heisenberg-picture adjoint `Σ K† G K`.
    pub fn apply_adjoint(&self, g: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            out += &k.adjoint_conjugate(g);
        }
        out
    }

    /// Applies the channel to tensor factor `factor` of `rho`, leaving the
    /// other factors untouched.
    pub fn apply_on_factor(&self, rho: &DensityMatrix, factor: usize) -> Result<DensityMatrix> {
        let dims = rho.dims();
        if factor >= dims.len() {
            return Err(Error::arg(format!(
                "factor {factor} out of range for {} factors",
                dims.len()
            )));
        }
        if dims[factor] != self.d_in {
            return Err(Error::dim(format!(
                "factor {factor} has dimension {}, channel expects {}",
                dims[factor], self.d_in
            )));
        }
        let out = factor_action(rho.matrix(), dims, factor, &self.kraus, self.d_out);
        let mut new_dims = dims.to_vec();
        new_dims[factor] = self.d_out;
        Ok(DensityMatrix::from_parts_unchecked(out, new_dims))
    }

    /// `(I ⊗ ch^{⊗|factors|})(rho)` with the channel acting on every listed factor.
    pub fn apply_extended(&self, rho: &DensityMatrix, factors: &[usize]) -> Result<DensityMatrix> {
        let mut seen = factors.to_vec();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != factors.len() {
            return Err(Error::arg("duplicate factor in apply_extended"));
        }
        let mut out = rho.clone();
        for &f in factors {
            out = self.apply_on_factor(&out, f)?;
        }
        Ok(out)
    }

    /// Stinespring dilation `V = Σ_k K_k ⊗ |k⟩_env` with rows ordered `(out, env)`.
    pub fn stinespring(&self) -> IsometricExtension {
        let d_env = self.kraus.len();
        let v = ComplexMatrix::from_fn(self.d_out * d_env, self.d_in, |row, i| {
            self.kraus[row % d_env][(row / d_env, i)]
        });
        IsometricExtension {
            v,
            d_in: self.d_in,
            d_out: self.d_out,
            d_env,
        }
    }

    /// Complementary channel `ρ ↦ Tr_B VρV†`, with output dimension equal to
    /// the number of Kraus operators.
    pub fn complementary(&self) -> QuantumChannel {
        let d_env = self.kraus.len();
        let kraus = (0..self.d_out)
            .map(|j| ComplexMatrix::from_fn(d_env, self.d_in, |k, i| self.kraus[k][(j, i)]))
            .collect();
        QuantumChannel {
            d_in: self.d_in,
            d_out: d_env,
            kraus,
        }
    }

    /// Minimal Kraus family from the eigendecomposition of the Choi matrix,
    /// discarding eigenvalues below [`tol::PSD`].
    pub fn canonicalize(&self) -> Result<QuantumChannel> {
        ChoiMatrix::from_channel(self).to_channel_with(tol::PSD, f64::INFINITY)
    }

    /// Composition `other ∘ self`.
    pub fn then(&self, other: &QuantumChannel) -> Result<QuantumChannel> {
        if self.d_out != other.d_in {
            return Err(Error::dim("composition dimension mismatch"));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for b in &other.kraus {
            for a in &self.kraus {
                kraus.push(b.matmul(a));
            }
        }
        let ch = QuantumChannel {
            d_in: self.d_in,
            d_out: other.d_out,
            kraus,
        };
        ch.canonical_if_large()
    }

    /// Conjugates the input by a unitary: `ρ ↦ ch(U ρ U†)`.
    pub fn precompose_unitary(&self, u: &ComplexMatrix) -> Result<QuantumChannel> {
        if u.rows() != self.d_in || u.cols() != self.d_in {
            return Err(Error::dim("unitary dimension mismatch"));
        }
        let kraus = self.kraus.iter().map(|k| k.matmul(u)).collect();
        QuantumChannel::new(self.d_in, self.d_out, kraus)
    }

    /// Parallel composition `self ⊗ other`.
    pub fn tensor(&self, other: &QuantumChannel) -> Result<QuantumChannel> {
        let d_in = self.d_in * other.d_in;
        let d_out = self.d_out * other.d_out;
        if d_in > tol::DEFAULT_MAX_DIM || d_out > tol::DEFAULT_MAX_DIM {
            return Err(Error::dim(format!(
                "tensor product channel {d_in}->{d_out} exceeds the dimension limit"
            )));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kron(b));
            }
        }
        Ok(QuantumChannel {
            d_in,
            d_out,
            kraus,
        })
    }

    fn canonical_if_large(self) -> Result<QuantumChannel> {
        if self.kraus.len() > self.d_in * self.d_out {
            self.canonicalize()
        } else {
            Ok(self)
        }
    }
}

/// Kraus action on one tensor factor of an operator.
fn factor_action(
    m: &ComplexMatrix,
    dims: &[usize],
    factor: usize,
    kraus: &[ComplexMatrix],
    d_out: usize,
) -> ComplexMatrix {
    let left: usize = dims[..factor].iter().product();
    let right: usize = dims[factor + 1..].iter().product();
    let d_in = dims[factor];
    let n_in = left * d_in * right;
    let n_out = left * d_out * right;
    let idx_in = |l: usize, i: usize, r: usize| (l * d_in + i) * right + r;
    let idx_out = |l: usize, o: usize, r: usize| (l * d_out + o) * right + r;
    let zero = C64::new(0.0, 0.0);
    let mut out = ComplexMatrix::zeros(n_out, n_out);
    let mut half = vec![zero; n_out * n_in];
    for k in kraus {
        // half = (I ⊗ K ⊗ I) m
        half.iter_mut().for_each(|z| *z = zero);
        for l in 0..left {
            for r in 0..right {
                for o in 0..d_out {
                    let row = idx_out(l, o, r);
                    let dst = &mut half[row * n_in..(row + 1) * n_in];
                    for i in 0..d_in {
                        let a = k[(o, i)];
                        if a == zero {
                            continue;
                        }
                        for (h, x) in dst.iter_mut().zip(m.row(idx_in(l, i, r))) {
                            *h += a * x;
                        }
                    }
                }
            }
        }
        // out += half (I ⊗ K ⊗ I)†
        for row in 0..n_out {
            let src = &half[row * n_in..(row + 1) * n_in];
            for l in 0..left {
                for r in 0..right {
                    for o in 0..d_out {
                        let mut acc = zero;
                        for i in 0..d_in {
                            let b = k[(o, i)];
                            if b != zero {
                                acc += src[idx_in(l, i, r)] * b.conj();
                            }
                        }
                        out[(row, idx_out(l, o, r))] += acc;
                    }
                }
            }
        }
    }
    out
}

/// Convex combination of channels with matching dimensions. Zero-weight
/// components are dropped.
pub fn mix(chs: &[QuantumChannel], probs: &[f64]) -> Result<QuantumChannel> {
    if chs.is_empty() || chs.len() != probs.len() {
        return Err(Error::arg("mix needs one probability per channel"));
    }
    if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::arg(format!("mixing probabilities must be nonnegative: {probs:?}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > tol::TRACE {
        return Err(Error::arg(format!("mixing probabilities sum to {total}")));
    }
    let (d_in, d_out) = (chs[0].d_in, chs[0].d_out);
    if chs.iter().any(|c| c.d_in != d_in || c.d_out != d_out) {
        return Err(Error::dim("mixed channels must share input and output dimensions"));
    }
    let kraus = chs
        .iter()
        .zip(probs)
        .filter(|(_, &p)| p > 0.0)
        .flat_map(|(c, &p)| c.kraus.iter().map(move |k| k.scale_real(p.sqrt())))
        .collect();
    QuantumChannel {
        d_in,
        d_out,
        kraus,
    }
    .canonical_if_large()
}

/// `ch^{⊗n}`.
pub fn tensor_power(ch: &QuantumChannel, n: usize) -> Result<QuantumChannel> {
    if n == 0 {
        return Err(Error::arg("tensor power needs n >= 1"));
    }
    let fits = |d: usize| {
        d.checked_pow(n as u32)
            .is_some_and(|v| v <= tol::DEFAULT_MAX_DIM)
    };
    if !fits(ch.d_in) || !fits(ch.d_out) {
        return Err(Error::dim(format!(
            "{n}-fold tensor power of a {}->{} channel exceeds the dimension limit",
            ch.d_in, ch.d_out
        )));
    }
    let mut out = ch.clone();
    for _ in 1..n {
        out = out.tensor(ch)?;
    }
    Ok(out)
}

/// Isometry `V: d_in -> d_out ⊗ d_env` with `Tr_env VρV† = N(ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometricExtension {
    v: ComplexMatrix,
    d_in: usize,
    d_out: usize,
    d_env: usize,
}

impl IsometricExtension {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn d_env(&self) -> usize {
        self.d_env
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    /// `max |V†V − I|`.
    pub fn isometry_defect(&self) -> f64 {
        self.v
            .adjoint()
            .matmul(&self.v)
            .max_abs_diff(&ComplexMatrix::identity(self.d_in))
    }

    /// Joint output `VρV†` on `out ⊗ env`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.d_in {
            return Err(Error::dim("isometry input dimension mismatch"));
        }
        Ok(DensityMatrix::from_parts_unchecked(
            self.v.conjugate(rho.matrix()),
            vec![self.d_out, self.d_env],
        ))
    }
}
