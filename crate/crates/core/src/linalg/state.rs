use num_complex::Complex64 as C64;

use super::decomp::eigvalsh;
use super::ComplexMatrix;
use crate::{tol, Error, Result};

/// Unit-trace positive semidefinite matrix together with its tensor-factor
/// dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and unit trace.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(matrix.rows(), &dims)?;
        if !matrix.is_square() {
            return Err(Error::dim("density matrix must be square"));
        }
        let defect = matrix.hermiticity_defect();
        if defect > tol::HERM {
            return Err(Error::arg(format!("matrix is not Hermitian (defect {defect:.3e})")));
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > tol::TRACE {
            return Err(Error::arg(format!("trace is {tr}, expected 1")));
        }
        let min_ev = eigvalsh(&matrix)?.last().copied().unwrap_or(0.0);
        if min_ev < -tol::PSD {
            return Err(Error::arg(format!(
                "matrix is not positive semidefinite (min eigenvalue {min_ev:.3e})"
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// Single-factor state.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.rows();
        Self::new(matrix, vec![d])
    }

    /// Skips validation; for results of maps that preserve the state space.
    pub(crate) fn from_parts_unchecked(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(matrix.rows(), dims.iter().product::<usize>());
        Self { matrix, dims }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            dims: vec![d],
        }
    }

    /// `|i⟩⟨i|` in dimension `d`.
    pub fn basis(d: usize, i: usize) -> Self {
        Self {
            matrix: ComplexMatrix::unit(d, d, i, i),
            dims: vec![d],
        }
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::from_matrix(ComplexMatrix::from_real_diag(probs))
    }

    /// Maximally entangled state on `d ⊗ d`.
    pub fn maximally_entangled(d: usize) -> Self {
        PureState::maximally_entangled(d).to_density()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Reinterprets the factor structure; the product must match.
    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        check_dims(self.matrix.rows(), &dims)?;
        Ok(Self { dims, ..self })
    }

    /// `ρ ⊗ σ`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let matrix = super::tensor(&self.matrix, &other.matrix)?;
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        Ok(Self { matrix, dims })
    }

    /// Convex combination `(1-t) ρ + t σ`.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::arg(format!("mixing weight {t} outside [0,1]")));
        }
        if self.dims != other.dims {
            return Err(Error::dim("mixing states with different factor dimensions"));
        }
        let mut m = self.matrix.scale_real(1.0 - t);
        m.axpy(t, &other.matrix);
        Ok(Self {
            matrix: m,
            dims: self.dims.clone(),
        })
    }
}

/// Unit vector with tensor-factor dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vector: Vec<C64>,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(vector: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(vector.len(), &dims)?;
        let norm2: f64 = vector.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > tol::TRACE {
            return Err(Error::arg(format!("state vector has squared norm {norm2}")));
        }
        Ok(Self { vector, dims })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(vector: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(vector.len(), &dims)?;
        let norm = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::arg("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self {
            vector: vector.into_iter().map(|z| z / norm).collect(),
            dims,
        })
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut vector = vec![C64::new(0.0, 0.0); d];
        vector[i] = C64::new(1.0, 0.0);
        Self {
            vector,
            dims: vec![d],
        }
    }

    /// `Σ_i |i⟩|i⟩ / √d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let amp = 1.0 / (d as f64).sqrt();
        let mut vector = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            vector[i * d + i] = C64::new(amp, 0.0);
        }
        Self {
            vector,
            dims: vec![d, d],
        }
    }

    pub fn vector(&self) -> &[C64] {
        &self.vector
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: ComplexMatrix::outer(&self.vector, &self.vector),
            dims: self.dims.clone(),
        }
    }

    /// Coefficients as a `d_0 x (rest)` matrix, i.e. `|ψ⟩ = Σ Ψ_{ij} |i⟩|j⟩`.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        let d0 = self.dims[0];
        let rest = self.vector.len() / d0;
        ComplexMatrix::new(d0, rest, self.vector.clone()).expect("dims checked on construction")
    }
}

fn check_dims(total: usize, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::dim("factor dimensions must be nonempty and positive"));
    }
    let prod: usize = dims.iter().product();
    if prod != total {
        return Err(Error::dim(format!(
            "factor dimensions {dims:?} multiply to {prod}, expected {total}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rejects_bad_states() {
        let not_unit = ComplexMatrix::from_real_diag(&[0.5, 0.4]);
        assert!(DensityMatrix::from_matrix(not_unit).is_err());
        let negative = ComplexMatrix::from_real_diag(&[1.2, -0.2]);
        assert!(DensityMatrix::from_matrix(negative).is_err());
        let mut non_herm = ComplexMatrix::from_real_diag(&[0.5, 0.5]);
        non_herm[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::from_matrix(non_herm).is_err());
        let ok = ComplexMatrix::from_real_diag(&[0.25, 0.75]);
        assert!(DensityMatrix::new(ok, vec![3]).is_err());
    }

    #[test]
    fn maximally_entangled_is_valid() {
        let rho = DensityMatrix::maximally_entangled(3);
        assert_eq!(rho.dims(), &[3, 3]);
        assert!(DensityMatrix::new(rho.matrix().clone(), vec![3, 3]).is_ok());
    }

    #[test]
    fn pure_state_requires_unit_norm() {
        let v = vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
        assert!(PureState::new(v.clone(), vec![2]).is_err());
        let psi = PureState::normalized(v, vec![2]).unwrap();
        assert!((psi.vector()[0].re - 0.5f64.sqrt()).abs() < 1e-15);
    }
}
