//! Seeded sampling of states, unitaries and channels.
//!
//! Every randomized routine draws from a [`SeedStream`]: a base seed plus a
//! path of indices (pair, trial, restart, ...) hashed into an independent
//! ChaCha stream, so parallel execution order never changes the numbers.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::QuantumChannel;
use crate::linalg::{eigh, spectral_sum, ComplexMatrix, DensityMatrix, PureState};
use crate::{Error, Result};

pub type StreamRng = ChaCha8Rng;

/// Counter-based derivation of per-task RNG streams from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent generator for the task addressed by `path`.
    pub fn rng(&self, path: &[u64]) -> StreamRng {
        let mut h = splitmix64(self.seed ^ 0x5851_f42d_4c95_7f2d);
        for &p in path {
            h = splitmix64(h ^ splitmix64(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(h);
        rng
    }

    /// Child stream rooted at `path`.
    pub fn child(&self, path: &[u64]) -> SeedStream {
        let mut rng = self.rng(path);
        SeedStream { seed: rng.random() }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random pure state on `⊗ dims`.
pub fn haar_pure_state(rng: &mut impl Rng, dims: &[usize]) -> PureState {
    let d: usize = dims.iter().product();
    loop {
        let v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        if let Ok(psi) = PureState::normalized(v, dims.to_vec()) {
            return psi;
        }
    }
}

/// Random state of the given rank from the induced (Ginibre) measure.
pub fn random_density(rng: &mut impl Rng, d: usize, rank: usize) -> DensityMatrix {
    let g = ginibre(rng, d, rank.clamp(1, d));
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::from_parts_unchecked(m.scale_real(1.0 / tr).hermitian_part(), vec![d])
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    ginibre(rng, d, d).hermitian_part()
}

/// Isometry `V: C^cols -> C^rows` (`V†V = I`) from a Ginibre matrix.
pub fn random_isometry(rng: &mut impl Rng, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if rows < cols {
        return Err(Error::dim(format!("no isometry from C^{cols} into C^{rows}")));
    }
    let g = ginibre(rng, rows, cols);
    let gram = g.adjoint().matmul(&g);
    let (vals, vecs) = eigh(&gram)?;
    let inv_sqrt: Vec<f64> = vals.iter().map(|&l| 1.0 / l.max(1e-300).sqrt()).collect();
    Ok(g.matmul(&spectral_sum(&inv_sqrt, &vecs)))
}

pub fn random_unitary(rng: &mut impl Rng, d: usize) -> Result<ComplexMatrix> {
    random_isometry(rng, d, d)
}

/// Random channel from a random isometry, with `kraus_count` Kraus
/// operators raised to `ceil(d_in / d_out)` if needed.
pub fn random_channel(
    rng: &mut impl Rng,
    d_in: usize,
    d_out: usize,
    kraus_count: usize,
) -> Result<QuantumChannel> {
    if d_in == 0 || d_out == 0 {
        return Err(Error::dim("channel dimensions must be positive"));
    }
    let kraus_count = kraus_count.max(d_in.div_ceil(d_out));
    let v = random_isometry(rng, d_out * kraus_count, d_in)?;
    // V rows are ordered (out, env)
    let kraus = (0..kraus_count)
        .map(|k| ComplexMatrix::from_fn(d_out, d_in, |o, i| v[(o * kraus_count + k, i)]))
        .collect();
    QuantumChannel::new(d_in, d_out, kraus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let s = SeedStream::new(42);
        let a: u64 = s.rng(&[1, 2]).random();
        let b: u64 = s.rng(&[1, 2]).random();
        let c: u64 = s.rng(&[2, 1]).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(SeedStream::new(43).rng(&[1, 2]).random::<u64>(), a);
    }

    #[test]
    fn isometry_is_isometric() {
        let mut rng = SeedStream::new(1).rng(&[]);
        let v = random_isometry(&mut rng, 6, 2).unwrap();
        let gram = v.adjoint().matmul(&v);
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn random_density_has_requested_rank() {
        let mut rng = SeedStream::new(4).rng(&[]);
        let rho = random_density(&mut rng, 4, 2);
        let vals = crate::linalg::eigvalsh(rho.matrix()).unwrap();
        assert!(vals[1] > 1e-6 && vals[2].abs() < 1e-12);
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-14);
    }
}
