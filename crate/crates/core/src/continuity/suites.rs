use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{af_bound, fannes_bound, BoundReport, CheckKind, TrialMeta};
use crate::distance::trace_distance;
use crate::entropic::{conditional_entropy, von_neumann_entropy};
use crate::linalg::DensityMatrix;
use crate::random::{random_density, SeedStream};
use crate::{Error, Result};

/// Largest sampled trace distance in the suites.
pub const MAX_SUITE_EPS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub quantity: String,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub violations: usize,
    pub min_margin: f64,
    pub max_epsilon: f64,
    /// Report with the smallest margin.
    pub worst: BoundReport,
}

/// `(ρ, σ)` with `σ = (1−t)ρ + tτ` and `‖ρ − σ‖₁ ≤ 1/2`; ranks are random so
/// pure and mixed states both occur.
fn sample_pair(rng: &mut impl Rng, d: usize) -> Result<(DensityMatrix, DensityMatrix)> {
    let r1 = rng.random_range(1..=d);
    let r2 = rng.random_range(1..=d);
    let rho = random_density(rng, d, r1);
    let tau = random_density(rng, d, r2);
    let full = trace_distance(&rho, &tau)?;
    let target = MAX_SUITE_EPS * (1.0 - rng.random::<f64>());
    let t = if full > target { target / full } else { 1.0 };
    let sigma = rho.mix(&tau, t)?;
    Ok((rho, sigma))
}

fn summarize(quantity: &str, dims: Vec<usize>, reports: Vec<BoundReport>) -> Result<SuiteSummary> {
    let worst = reports
        .iter()
        .min_by(|a, b| a.margin.total_cmp(&b.margin))
        .cloned()
        .ok_or_else(|| Error::arg("suite needs at least one trial"))?;
    Ok(SuiteSummary {
        quantity: quantity.to_string(),
        dims,
        trials: reports.len(),
        violations: super::count_violations(&reports),
        min_margin: worst.margin,
        max_epsilon: reports.iter().map(|r| r.epsilon).fold(0.0, f64::max),
        worst,
    })
}

fn meta(seed: u64, trial: usize) -> TrialMeta {
    TrialMeta {
        seed,
        pair: None,
        trial,
        channels: None,
    }
}

/// `|S(ρ) − S(σ)| ≤ ε log d + H(ε)` on `trials` sampled pairs.
pub fn fannes_suite(d: usize, trials: usize, seed: u64, tol: f64) -> Result<SuiteSummary> {
    if d == 0 {
        return Err(Error::dim("dimension must be positive"));
    }
    let streams = SeedStream::new(seed);
    let reports = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (rho, sigma) = sample_pair(&mut streams.rng(&[d as u64, t as u64]), d)?;
            let eps = trace_distance(&rho, &sigma)?;
            let measured = (von_neumann_entropy(&rho) - von_neumann_entropy(&sigma)).abs();
            let bound = fannes_bound(eps.min(1.0), d)?;
            Ok(BoundReport::new("fannes", CheckKind::Hard, measured, bound, tol, eps, 1, d, meta(seed, t)))
        })
        .collect::<Result<Vec<_>>>()?;
    summarize("fannes", vec![d], reports)
}

/// `|S(A|B)_ρ − S(A|B)_σ| ≤ 4ε log d_A + 2H(ε)` on `trials` sampled pairs.
pub fn af_suite(d_a: usize, d_b: usize, trials: usize, seed: u64, tol: f64) -> Result<SuiteSummary> {
    if d_a == 0 || d_b == 0 {
        return Err(Error::dim("dimensions must be positive"));
    }
    let d = d_a * d_b;
    let streams = SeedStream::new(seed);
    let reports = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = streams.rng(&[d_a as u64, d_b as u64, t as u64]);
            let (rho, sigma) = sample_pair(&mut rng, d)?;
            let rho = rho.with_dims(vec![d_a, d_b])?;
            let sigma = sigma.with_dims(vec![d_a, d_b])?;
            let eps = trace_distance(&rho, &sigma)?;
            let measured = (conditional_entropy(&rho, 1)? - conditional_entropy(&sigma, 1)?).abs();
            let bound = af_bound(eps.min(1.0), d_a)?;
            Ok(BoundReport::new(
                "alicki-fannes",
                CheckKind::Hard,
                measured,
                bound,
                tol,
                eps,
                1,
                d_a,
                meta(seed, t),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    summarize("alicki-fannes", vec![d_a, d_b], reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    #[test]
    fn suites_hold_and_stay_in_regime() {
        for d in [2, 4] {
            let s = fannes_suite(d, 200, 5, tol::ENT).unwrap();
            assert_eq!(s.violations, 0);
            assert!(s.max_epsilon <= MAX_SUITE_EPS + 1e-12);
            assert_eq!(s.trials, 200);
        }
        let s = af_suite(2, 3, 200, 6, tol::ENT).unwrap();
        assert_eq!(s.violations, 0);
        assert_eq!(s.dims, vec![2, 3]);
    }

    #[test]
    fn suites_are_seeded() {
        let a = serde_json::to_string(&fannes_suite(3, 50, 1, tol::ENT).unwrap()).unwrap();
        let b = serde_json::to_string(&fannes_suite(3, 50, 1, tol::ENT).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_suite_is_an_error() {
        assert!(fannes_suite(2, 0, 0, tol::ENT).is_err());
        assert!(af_suite(0, 2, 10, 0, tol::ENT).is_err());
    }
}
