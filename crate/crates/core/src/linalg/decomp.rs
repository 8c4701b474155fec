use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64 as C64;

use super::{ComplexMatrix, DensityMatrix, PureState};
use crate::{tol, Error, Result};

const EIGEN_MAX_SWEEPS: usize = 10_000;

/// Hermitian eigendecomposition `h = V diag(λ) V†` with eigenvalues sorted
/// in descending order.
pub fn eigh(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let m = checked_hermitian(h)?;
    let eig = SymmetricEigen::try_new(m.to_nalgebra(), f64::EPSILON, EIGEN_MAX_SWEEPS)
        .ok_or_else(|| Error::Numeric("Hermitian eigensolver did not converge".into()))?;
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Eigenvalues only, descending.
pub fn eigvalsh(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let m = checked_hermitian(h)?;
    let eig = SymmetricEigen::try_new(m.to_nalgebra(), f64::EPSILON, EIGEN_MAX_SWEEPS)
        .ok_or_else(|| Error::Numeric("Hermitian eigensolver did not converge".into()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

fn checked_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(Error::arg(format!(
            "eigh needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let scale = h.max_abs().max(1.0);
    let defect = h.hermiticity_defect();
    if defect > tol::HERM * scale {
        return Err(Error::arg(format!(
            "eigh needs a Hermitian matrix (defect {defect:.3e})"
        )));
    }
    Ok(h.hermitian_part())
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_map(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let (vals, vecs) = eigh(h)?;
    Ok(spectral_sum(&vals.iter().map(|&x| f(x)).collect::<Vec<_>>(), &vecs))
}

/// `V diag(values) V†`.
pub(crate) fn spectral_sum(values: &[f64], vecs: &ComplexMatrix) -> ComplexMatrix {
    let n = vecs.rows();
    let scaled = ComplexMatrix::from_fn(n, values.len(), |i, k| vecs[(i, k)] * values[k]);
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..values.len() {
                acc += scaled[(i, k)] * vecs[(j, k)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Singular values in descending order.
pub fn singular_values(x: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = x.to_nalgebra().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Trace norm `Tr|X|`: the sum of singular values, or of absolute
/// eigenvalues when `X` is Hermitian.
pub fn trace_norm(x: &ComplexMatrix) -> Result<f64> {
    if !x.is_square() {
        return Err(Error::arg("trace norm needs a square matrix"));
    }
    if x.hermiticity_defect() <= tol::HERM * x.max_abs().max(1.0) {
        Ok(eigvalsh(x)?.iter().map(|l| l.abs()).sum())
    } else {
        Ok(singular_values(x).iter().sum())
    }
}

/// Operator norm of a Hermitian matrix (largest absolute eigenvalue).
pub fn spectral_norm_hermitian(h: &ComplexMatrix) -> Result<f64> {
    let vals = eigvalsh(h)?;
    Ok(vals
        .first()
        .copied()
        .unwrap_or(0.0)
        .abs()
        .max(vals.last().copied().unwrap_or(0.0).abs()))
}

/// Partial trace of an operator on `⊗ dims`, keeping the listed factors in
/// ascending index order.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::dim(format!(
            "operator of size {}x{} does not match factor dimensions {dims:?}",
            m.rows(),
            m.cols()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::arg("duplicate factor index in partial trace"));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::arg(format!(
            "factor index {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let layout = FactorSplit::new(dims, &kept);
    let (dk, dt) = (layout.kept_dim, layout.traced_dim);
    let mut out = ComplexMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dt {
                acc += m[(layout.full[a * dt + t], layout.full[b * dt + t])];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Reduced state on the kept factors.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::arg("partial trace must keep at least one factor"));
    }
    let m = partial_trace_matrix(rho.matrix(), rho.dims(), keep)?;
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    let dims = kept.iter().map(|&k| rho.dims()[k]).collect();
    Ok(DensityMatrix::from_parts_unchecked(m, dims))
}

/// Index bookkeeping for splitting `⊗ dims` into kept and traced factors.
struct FactorSplit {
    kept_dim: usize,
    traced_dim: usize,
    /// `full[k * traced_dim + t]` is the flat index with kept part `k` and traced part `t`.
    full: Vec<usize>,
}

impl FactorSplit {
    fn new(dims: &[usize], kept: &[usize]) -> Self {
        let total: usize = dims.iter().product();
        let kept_dim: usize = kept.iter().map(|&k| dims[k]).product();
        let traced_dim = total / kept_dim;
        let mut full = vec![0usize; total];
        let mut digits = vec![0usize; dims.len()];
        for flat in 0..total {
            let mut rem = flat;
            for f in (0..dims.len()).rev() {
                digits[f] = rem % dims[f];
                rem /= dims[f];
            }
            let (mut k, mut t) = (0usize, 0usize);
            for (f, &d) in dims.iter().enumerate() {
                if kept.binary_search(&f).is_ok() {
                    k = k * d + digits[f];
                } else {
                    t = t * d + digits[f];
                }
            }
            full[k * traced_dim + t] = flat;
        }
        Self {
            kept_dim,
            traced_dim,
            full,
        }
    }
}

/// Reorders tensor factors: factor `perm[i]` of the input becomes factor `i`
/// of the output.
pub fn permute_factors(
    m: &ComplexMatrix,
    dims: &[usize],
    perm: &[usize],
) -> Result<(ComplexMatrix, Vec<usize>)> {
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..dims.len()).collect::<Vec<_>>() {
        return Err(Error::arg(format!("{perm:?} is not a permutation of the factors")));
    }
    let total: usize = dims.iter().product();
    if m.rows() != total || !m.is_square() {
        return Err(Error::dim("operator does not match factor dimensions"));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let map = permutation_index_map(dims, perm);
    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok((out, new_dims))
}

/// `map[old_flat] = new_flat` for a factor permutation.
pub(crate) fn permutation_index_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut digits = vec![0usize; dims.len()];
    (0..total)
        .map(|flat| {
            let mut rem = flat;
            for f in (0..dims.len()).rev() {
                digits[f] = rem % dims[f];
                rem /= dims[f];
            }
            new_dims
                .iter()
                .zip(perm)
                .fold(0usize, |acc, (&d, &p)| acc * d + digits[p])
        })
        .collect()
}

/// Purification on `d ⊗ r`, where `r` is the numerical rank of `rho`.
pub fn purify(rho: &DensityMatrix) -> Result<PureState> {
    let (vals, vecs) = eigh(rho.matrix())?;
    let support: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > tol::PSD).collect();
    let support = if support.is_empty() { vec![0] } else { support };
    let d = rho.dim();
    let r = support.len();
    let mut v = vec![C64::new(0.0, 0.0); d * r];
    for (col, &k) in support.iter().enumerate() {
        let amp = vals[k].max(0.0).sqrt();
        for i in 0..d {
            v[i * r + col] = vecs[(i, k)] * amp;
        }
    }
    let mut dims = rho.dims().to_vec();
    dims.push(r);
    PureState::normalized(v, dims)
}
