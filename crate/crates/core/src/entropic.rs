//! Von Neumann entropy and the information quantities built on it. All
//! values are in bits.

use crate::channels::QuantumChannel;
use crate::linalg::{eigvalsh, partial_trace_matrix, ComplexMatrix, DensityMatrix};
use crate::{tol, Error, Result};

/// Shannon entropy of a probability vector; entries are clipped to `[0,1]`
/// first.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .map(|&p| p.clamp(0.0, 1.0))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// `H(p)` without range checking; `p` is clipped to `[0,1]`.
pub(crate) fn h2(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    shannon_entropy(&[p, 1.0 - p])
}

pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg(format!("binary entropy argument {p} outside [0,1]")));
    }
    Ok(h2(p))
}

/// Entropy of a Hermitian matrix that is a state up to rounding.
pub(crate) fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    Ok(shannon_entropy(&eigvalsh(m)?))
}

/// `S(ρ) = −Tr ρ log ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    matrix_entropy(rho.matrix()).expect("density matrices are Hermitian")
}

fn reduced_entropy(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<f64> {
    if keep.is_empty() {
        return Ok(0.0);
    }
    if keep.len() == dims.len() {
        return matrix_entropy(m);
    }
    matrix_entropy(&partial_trace_matrix(m, dims, keep)?)
}

/// Entropy of the marginal on the listed factors (all factors if `keep`
/// lists every index, `0` if it is empty).
pub fn marginal_entropy(rho: &DensityMatrix, keep: &[usize]) -> Result<f64> {
    reduced_entropy(rho.matrix(), rho.dims(), keep)
}

fn check_split(rho: &DensityMatrix, split: usize) -> Result<()> {
    if split == 0 || split >= rho.dims().len() {
        return Err(Error::arg(format!(
            "split {split} must leave both parts of {:?} nonempty",
            rho.dims()
        )));
    }
    Ok(())
}

/// `S(A|B) = S(AB) − S(B)`, where `A` is the first `split` factors.
pub fn conditional_entropy(rho: &DensityMatrix, split: usize) -> Result<f64> {
    check_split(rho, split)?;
    let b: Vec<usize> = (split..rho.dims().len()).collect();
    Ok(von_neumann_entropy(rho) - marginal_entropy(rho, &b)?)
}

/// `S(T|rest)` for an arbitrary set of target factors `T`.
pub fn conditional_entropy_of(rho: &DensityMatrix, target: &[usize]) -> Result<f64> {
    let k = rho.dims().len();
    if target.is_empty() || target.iter().any(|&f| f >= k) {
        return Err(Error::arg(format!("bad target factors {target:?}")));
    }
    let rest: Vec<usize> = (0..k).filter(|f| !target.contains(f)).collect();
    Ok(von_neumann_entropy(rho) - marginal_entropy(rho, &rest)?)
}

/// `I(A;B) = S(A) + S(B) − S(AB)` with `A` the first `split` factors.
pub fn mutual_information(rho: &DensityMatrix, split: usize) -> Result<f64> {
    check_split(rho, split)?;
    let a: Vec<usize> = (0..split).collect();
    let b: Vec<usize> = (split..rho.dims().len()).collect();
    Ok(marginal_entropy(rho, &a)? + marginal_entropy(rho, &b)? - von_neumann_entropy(rho))
}

/// Views `rho` as `A ⊗ A'` with `A'` of dimension `d_in`, grouping trailing
/// factors whose product is `d_in`.
fn as_reference_and_input(rho: &DensityMatrix, d_in: usize) -> Result<DensityMatrix> {
    let dims = rho.dims();
    let mut tail = 1usize;
    for k in (1..dims.len()).rev() {
        tail *= dims[k];
        if tail == d_in {
            return rho.clone().with_dims(vec![rho.dim() / d_in, d_in]);
        }
        if tail > d_in {
            break;
        }
    }
    Err(Error::dim(format!(
        "no trailing factors of {dims:?} match channel input dimension {d_in}"
    )))
}

/// `I^coh = S(B) − S(AB)` evaluated on `(I ⊗ N)(ρ_{AA'})`.
pub fn coherent_information(ch: &QuantumChannel, rho: &DensityMatrix) -> Result<f64> {
    let rho = as_reference_and_input(rho, ch.d_in())?;
    let out = ch.apply_on_factor(&rho, 1)?;
    Ok(marginal_entropy(&out, &[1])? - von_neumann_entropy(&out))
}

/// Finite ensemble `{p_x, φ_x}` over a common input space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    items: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(items: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let Some((_, first)) = items.first() else {
            return Err(Error::arg("ensemble must not be empty"));
        };
        let d = first.dim();
        if items.iter().any(|(_, s)| s.dim() != d) {
            return Err(Error::dim("ensemble states must share one dimension"));
        }
        if items.iter().any(|(p, _)| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::arg("ensemble probabilities must be nonnegative"));
        }
        let total: f64 = items.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > tol::TRACE {
            return Err(Error::arg(format!("ensemble probabilities sum to {total}")));
        }
        Ok(Self { items })
    }

    /// Equiprobable computational basis states `|0⟩, …, |d−1⟩`.
    pub fn uniform_basis(d: usize) -> Self {
        let p = 1.0 / d as f64;
        Self {
            items: (0..d).map(|k| (p, DensityMatrix::basis(d, k))).collect(),
        }
    }

    pub fn items(&self) -> &[(f64, DensityMatrix)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.items[0].1.dim()
    }

    /// `Σ p_x φ_x`.
    pub fn average(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut avg = ComplexMatrix::zeros(d, d);
        for (p, s) in &self.items {
            avg.axpy(*p, s.matrix());
        }
        avg
    }
}

/// `I(X;B) = S(Σ p σ_x) − Σ p S(σ_x)` for output states `σ_x`.
pub(crate) fn holevo_quantity(probs: &[f64], outputs: &[ComplexMatrix]) -> Result<f64> {
    let d = outputs[0].rows();
    let mut avg = ComplexMatrix::zeros(d, d);
    let mut inner = 0.0;
    for (p, s) in probs.iter().zip(outputs) {
        avg.axpy(*p, s);
        if *p > 0.0 {
            inner += p * matrix_entropy(s)?;
        }
    }
    Ok(matrix_entropy(&avg)? - inner)
}

fn check_ensemble(ch: &QuantumChannel, ens: &Ensemble) -> Result<()> {
    if ens.dim() != ch.d_in() {
        return Err(Error::dim(format!(
            "ensemble dimension {} does not match channel input {}",
            ens.dim(),
            ch.d_in()
        )));
    }
    Ok(())
}

/// `I(X;B)` on `ω = Σ p_x |x⟩⟨x| ⊗ N(φ_x)`.
pub fn holevo_information(ch: &QuantumChannel, ens: &Ensemble) -> Result<f64> {
    check_ensemble(ch, ens)?;
    let probs: Vec<f64> = ens.items.iter().map(|(p, _)| *p).collect();
    let outs: Vec<ComplexMatrix> = ens
        .items
        .iter()
        .map(|(_, s)| ch.apply_operator(s.matrix()))
        .collect();
    holevo_quantity(&probs, &outs)
}

/// `I(X;B) − I(X;E)`, with `E` the output of the complementary channel.
pub fn private_information(ch: &QuantumChannel, ens: &Ensemble) -> Result<f64> {
    Ok(holevo_information(ch, ens)? - holevo_information(&ch.complementary(), ens)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{constant_channel, erasure, identity, mix, tensor_power};
    use crate::linalg::{partial_trace, trace_norm, PureState};
    use crate::random::{haar_pure_state, random_channel, random_density, random_unitary, SeedStream};
    use crate::C64;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(von_neumann_entropy(&DensityMatrix::basis(3, 1)), 0.0);
        assert_abs_diff_eq!(
            von_neumann_entropy(&DensityMatrix::maximally_mixed(8)),
            3.0,
            epsilon = 1e-12
        );
        let rho = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        let oracle = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
        assert_abs_diff_eq!(von_neumann_entropy(&rho), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(oracle, 0.811278, epsilon = 1e-6);
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(binary_entropy(0.25).unwrap(), 0.8112781244591328, epsilon = 1e-12);
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    fn classically_correlated() -> DensityMatrix {
        let m = ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]);
        DensityMatrix::new(m, vec![2, 2]).unwrap()
    }

    #[test]
    fn conditional_entropy_examples() {
        let mut rng = SeedStream::new(11).rng(&[]);
        let a = random_density(&mut rng, 2, 2);
        let b = random_density(&mut rng, 3, 3);
        let prod = a.tensor(&b).unwrap();
        assert_abs_diff_eq!(
            conditional_entropy(&prod, 1).unwrap(),
            von_neumann_entropy(&a),
            epsilon = 1e-10
        );
        let bell = DensityMatrix::maximally_entangled(2);
        assert_abs_diff_eq!(conditional_entropy(&bell, 1).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            conditional_entropy(&classically_correlated(), 1).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert!(conditional_entropy(&bell, 0).is_err());
        assert!(conditional_entropy(&bell, 2).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let mut rng = SeedStream::new(12).rng(&[]);
        let prod = random_density(&mut rng, 2, 2)
            .tensor(&random_density(&mut rng, 2, 1))
            .unwrap();
        assert_abs_diff_eq!(mutual_information(&prod, 1).unwrap(), 0.0, epsilon = 1e-10);
        let bell = DensityMatrix::maximally_entangled(2);
        assert_abs_diff_eq!(mutual_information(&bell, 1).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            mutual_information(&classically_correlated(), 1).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn coherent_information_examples() {
        let bell = DensityMatrix::maximally_entangled(2);
        assert_abs_diff_eq!(
            coherent_information(&identity(2), &bell).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        for &p in &[0.0, 0.1, 0.25, 0.5, 0.8] {
            let ic = coherent_information(&erasure(2, p).unwrap(), &bell).unwrap();
            assert_abs_diff_eq!(ic, 1.0 - 2.0 * p, epsilon = 1e-12);
        }
        let wrong = DensityMatrix::maximally_entangled(3);
        assert!(coherent_information(&identity(2), &wrong).is_err());
    }

    #[test]
    fn coherent_information_groups_trailing_factors() {
        let mut rng = SeedStream::new(13).rng(&[]);
        let ch = random_channel(&mut rng, 2, 2, 2).unwrap();
        let ch2 = tensor_power(&ch, 2).unwrap();
        let psi = haar_pure_state(&mut rng, &[4, 2, 2]).to_density();
        let grouped = psi.clone().with_dims(vec![4, 4]).unwrap();
        assert_abs_diff_eq!(
            coherent_information(&ch2, &psi).unwrap(),
            coherent_information(&ch2, &grouped).unwrap(),
            epsilon = 1e-12
        );
    }

    fn orthogonal_pair() -> Ensemble {
        Ensemble::uniform_basis(2)
    }

    #[test]
    fn holevo_examples() {
        let single = Ensemble::new(vec![(1.0, DensityMatrix::maximally_mixed(2))]).unwrap();
        assert_abs_diff_eq!(
            holevo_information(&identity(2), &single).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            holevo_information(&identity(2), &orthogonal_pair()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let mut rng = SeedStream::new(14).rng(&[]);
        let ens = Ensemble::new(vec![
            (0.3, random_density(&mut rng, 2, 1)),
            (0.7, random_density(&mut rng, 2, 2)),
        ])
        .unwrap();
        assert!(holevo_information(&constant_channel(2), &ens).unwrap().abs() < 1e-12);
    }

    #[test]
    fn private_examples() {
        assert_abs_diff_eq!(
            private_information(&identity(2), &orthogonal_pair()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let mut rng = SeedStream::new(15).rng(&[]);
        let ens = Ensemble::new(vec![
            (0.4, random_density(&mut rng, 2, 1)),
            (0.6, random_density(&mut rng, 2, 1)),
        ])
        .unwrap();
        assert!(private_information(&constant_channel(2), &ens).unwrap() <= 1e-12);
        assert_abs_diff_eq!(
            private_information(&erasure(2, 0.5).unwrap(), &orthogonal_pair()).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn environment_term_is_dilation_independent() {
        let streams = SeedStream::new(16);
        for t in 0..10 {
            let mut rng = streams.rng(&[t]);
            let ch = random_channel(&mut rng, 2, 3, 3).unwrap();
            // a second Kraus family related by a unitary on the environment
            let u = random_unitary(&mut rng, 3).unwrap();
            let rotated: Vec<ComplexMatrix> = (0..3)
                .map(|j| {
                    let mut k = ComplexMatrix::zeros(3, 2);
                    for (l, kl) in ch.kraus().iter().enumerate() {
                        k += &kl.scale(u[(j, l)]);
                    }
                    k
                })
                .collect();
            let other = QuantumChannel::new(2, 3, rotated).unwrap();
            let ens = Ensemble::new(vec![
                (0.5, random_density(&mut rng, 2, 1)),
                (0.5, random_density(&mut rng, 2, 1)),
            ])
            .unwrap();
            assert_abs_diff_eq!(
                private_information(&ch, &ens).unwrap(),
                private_information(&other, &ens).unwrap(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn information_ranges_on_random_channels() {
        let streams = SeedStream::new(17);
        for t in 0..30 {
            let mut rng = streams.rng(&[t]);
            let ch = random_channel(&mut rng, 2, 3, 1 + t as usize % 4).unwrap();
            let ens = Ensemble::new(vec![
                (0.2, random_density(&mut rng, 2, 1)),
                (0.3, random_density(&mut rng, 2, 2)),
                (0.5, random_density(&mut rng, 2, 1)),
            ])
            .unwrap();
            let chi = holevo_information(&ch, &ens).unwrap();
            let priv_ = private_information(&ch, &ens).unwrap();
            assert!(chi >= -tol::ENT && chi <= 3f64.log2() + tol::ENT);
            assert!(priv_ <= chi + tol::ENT);
            let rho = random_density(&mut rng, 4, 4).with_dims(vec![2, 2]).unwrap();
            let ic = coherent_information(&ch, &rho).unwrap();
            assert!(ic >= -1.0 - tol::ENT && ic <= 3f64.log2() + tol::ENT);
        }
    }

    #[test]
    fn uniform_codewords_on_mixture_with_identity() {
        // ½ constant + ½ id on a qubit, orthogonal codewords
        let ch = mix(&[constant_channel(2), identity(2)], &[0.5, 0.5]).unwrap();
        let chi = holevo_information(&ch, &orthogonal_pair()).unwrap();
        // outputs diag(1,0) and diag(1/2,1/2); average diag(3/4,1/4)
        assert_abs_diff_eq!(chi, h2(0.25) - 0.5, epsilon = 1e-12);
    }

    #[test]
    fn ensemble_validation() {
        assert!(Ensemble::new(vec![]).is_err());
        assert!(Ensemble::new(vec![(0.5, DensityMatrix::basis(2, 0))]).is_err());
        assert!(Ensemble::new(vec![
            (0.5, DensityMatrix::basis(2, 0)),
            (0.5, DensityMatrix::basis(3, 0))
        ])
        .is_err());
    }

    fn mix_toward(rho: &DensityMatrix, tau: &DensityMatrix, eps: f64) -> (DensityMatrix, f64) {
        let full = trace_norm(&(rho.matrix() - tau.matrix())).unwrap();
        let t = if full > eps { eps / full } else { 1.0 };
        let sigma = rho.mix(tau, t).unwrap();
        let e = trace_norm(&(rho.matrix() - sigma.matrix())).unwrap();
        (sigma, e)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn entropy_within_range(seed in any::<u64>(), d in 1usize..9, rank in 1usize..9) {
            let mut rng = SeedStream::new(seed).rng(&[]);
            let rho = random_density(&mut rng, d, rank.min(d));
            let s = von_neumann_entropy(&rho);
            prop_assert!(s >= -tol::ENT);
            prop_assert!(s <= (d as f64).log2() + tol::ENT);
        }

        #[test]
        fn fannes_inequality(seed in any::<u64>(), d in 2usize..9, eps in 0.001f64..0.5) {
            let mut rng = SeedStream::new(seed).rng(&[]);
            let rho = random_density(&mut rng, d, 1 + seed as usize % d);
            let tau = random_density(&mut rng, d, 1);
            let (sigma, e) = mix_toward(&rho, &tau, eps);
            let diff = (von_neumann_entropy(&rho) - von_neumann_entropy(&sigma)).abs();
            prop_assert!(diff <= e * (d as f64).log2() + h2(e) + tol::ENT);
        }

        #[test]
        fn alicki_fannes_inequality(seed in any::<u64>(), da in 2usize..5, db in 2usize..5, eps in 0.001f64..0.5) {
            let mut rng = SeedStream::new(seed).rng(&[]);
            let d = da * db;
            let rho = random_density(&mut rng, d, 1 + seed as usize % d).with_dims(vec![da, db]).unwrap();
            let tau = random_density(&mut rng, d, 1).with_dims(vec![da, db]).unwrap();
            let (sigma, e) = mix_toward(&rho, &tau, eps);
            let diff = (conditional_entropy(&rho, 1).unwrap() - conditional_entropy(&sigma, 1).unwrap()).abs();
            prop_assert!(diff <= 4.0 * e * (da as f64).log2() + 2.0 * h2(e) + tol::ENT);
        }

        #[test]
        fn conditional_entropy_range(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
            let mut rng = SeedStream::new(seed).rng(&[]);
            let rho = random_density(&mut rng, da * db, da * db).with_dims(vec![da, db]).unwrap();
            let c = conditional_entropy(&rho, 1).unwrap();
            let bound = (da as f64).log2() + tol::ENT;
            prop_assert!(c.abs() <= bound);
        }
    }

    #[test]
    fn marginal_of_pure_purification() {
        // S(A) = S(B) for pure bipartite states
        let mut rng = SeedStream::new(18).rng(&[]);
        let psi = haar_pure_state(&mut rng, &[3, 2]).to_density();
        let a = partial_trace(&psi, &[0]).unwrap();
        let b = partial_trace(&psi, &[1]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&a), von_neumann_entropy(&b), epsilon = 1e-12);
        let basis = PureState::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)], vec![2]).unwrap();
        assert_eq!(von_neumann_entropy(&basis.to_density()), 0.0);
    }
}
