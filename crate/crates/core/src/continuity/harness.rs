use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    af_bound, corollary_bounds, hybrid_sequence, output_entropy_bound, BoundReport, CheckKind,
    TrialMeta,
};
use crate::capopt::{maximize, OptimizerSettings, Quantity};
use crate::channels::{mix, tensor_power, QuantumChannel};
use crate::distance::{diamond_distance, SdpResult, SdpStatus};
use crate::entropic::{self, coherent_information, von_neumann_entropy, Ensemble};
use crate::random::{haar_pure_state, random_channel, random_density, SeedStream};
use crate::{tol, Error, Result};

/// Largest diamond distance the harness accepts.
pub const MAX_HARNESS_EPS: f64 = 0.5;
/// Largest mixing weight `q` in [`random_pair`].
pub const MAX_MIX: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct HarnessSettings {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Slack before a hard check counts as violated.
    pub tol: f64,
    /// Pair index recorded in metadata and mixed into the trial streams.
    pub pair: Option<usize>,
    pub ensemble_size: usize,
    /// Runs the optimized single-letter comparisons when set.
    pub optimize: Option<OptimizerSettings>,
}

impl Default for HarnessSettings {
    fn default() -> Self {
        Self {
            n: 1,
            trials: 50,
            seed: 0,
            tol: tol::ENT,
            pair: None,
            ensemble_size: 4,
            optimize: None,
        }
    }
}

impl HarnessSettings {
    fn meta(&self, trial: usize) -> TrialMeta {
        TrialMeta {
            seed: self.seed,
            pair: self.pair,
            trial,
            channels: None,
        }
    }

    fn stream(&self, trial: usize) -> crate::random::StreamRng {
        let pair = self.pair.map_or(u64::MAX, |p| p as u64);
        SeedStream::new(self.seed).rng(&[pair, trial as u64])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelPair {
    pub index: usize,
    pub n: QuantumChannel,
    pub m: QuantumChannel,
    /// `M = (1 − q) N + q R`.
    pub q: f64,
    pub distance: SdpResult,
}

/// Draws `N`, `R` at random and returns `M = (1−q)N + qR` with
/// `q ∈ (0, 0.3]`, redrawing until `‖N − M‖⋄ ≤ 1/2`.
pub fn random_pair(rng: &mut impl Rng, index: usize, d_in: usize, d_out: usize) -> Result<ChannelPair> {
    let max_kraus = d_in * d_out;
    for _ in 0..256 {
        let kn = rng.random_range(1..=max_kraus);
        let kr = rng.random_range(1..=max_kraus);
        let n = random_channel(rng, d_in, d_out, kn)?;
        let r = random_channel(rng, d_in, d_out, kr)?;
        let q = MAX_MIX * (1.0 - rng.random::<f64>());
        let m = mix(&[n.clone(), r], &[1.0 - q, q])?;
        let distance = diamond_distance(&n, &m)?;
        if distance.status != SdpStatus::Infeasible && distance.value <= MAX_HARNESS_EPS {
            return Ok(ChannelPair {
                index,
                n,
                m,
                q,
                distance,
            });
        }
    }
    Err(Error::Numeric("could not sample a pair within the harness distance".into()))
}

/// `count` independent pairs, pair `i` drawn from stream `[i]` of `seed`.
pub fn random_pairs(count: usize, d_in: usize, d_out: usize, seed: u64) -> Result<Vec<ChannelPair>> {
    let streams = SeedStream::new(seed);
    (0..count)
        .into_par_iter()
        .map(|i| random_pair(&mut streams.rng(&[i as u64]), i, d_in, d_out))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnessRun {
    pub epsilon: f64,
    pub distance: SdpResult,
    pub reports: Vec<BoundReport>,
}

fn harness_eps(distance: &SdpResult) -> Result<f64> {
    if distance.status == SdpStatus::Infeasible {
        return Err(Error::Numeric("diamond-norm solve broke down".into()));
    }
    let eps = distance.value.max(0.0);
    if eps > MAX_HARNESS_EPS {
        return Err(Error::Domain(format!(
            "diamond distance {eps:.6} exceeds the harness limit {MAX_HARNESS_EPS}"
        )));
    }
    Ok(eps)
}

fn check_pair(n_ch: &QuantumChannel, m_ch: &QuantumChannel) -> Result<()> {
    if (n_ch.d_in(), n_ch.d_out()) != (m_ch.d_in(), m_ch.d_out()) {
        return Err(Error::dim("channels must share input and output dimensions"));
    }
    Ok(())
}

/// Samples Haar-random `φ` on `A ⊗ A'^{⊗n}` (`dim A = d_in^n`) and checks
/// the output-entropy bound, each hybrid step, consecutive hybrid distances
/// and the telescoping inequality.
pub fn verify_output_entropy(
    n_ch: &QuantumChannel,
    m_ch: &QuantumChannel,
    settings: &HarnessSettings,
) -> Result<HarnessRun> {
    check_pair(n_ch, m_ch)?;
    let distance = diamond_distance(n_ch, m_ch)?;
    verify_output_entropy_at(n_ch, m_ch, &distance, settings)
}

/// As [`verify_output_entropy`] with a precomputed diamond distance.
pub fn verify_output_entropy_at(
    n_ch: &QuantumChannel,
    m_ch: &QuantumChannel,
    distance: &SdpResult,
    settings: &HarnessSettings,
) -> Result<HarnessRun> {
    check_pair(n_ch, m_ch)?;
    let eps = harness_eps(distance)?;
    let n = settings.n;
    let d_b = n_ch.d_out();
    let total_bound = output_entropy_bound(n, eps, d_b)?;
    let step_bound = af_bound(eps, d_b)?;
    let d_ref = n_ch
        .d_in()
        .checked_pow(n as u32)
        .ok_or_else(|| Error::dim("reference dimension overflows"))?;
    let mut dims = vec![d_ref];
    dims.extend(std::iter::repeat_n(n_ch.d_in(), n));

    let per_trial = (0..settings.trials)
        .into_par_iter()
        .map(|t| {
            let phi = haar_pure_state(&mut settings.stream(t), &dims).to_density();
            let seq = hybrid_sequence(n_ch, m_ch, &phi, n)?;
            let steps = seq.step_differences()?;
            let dists = seq.consecutive_distances()?;
            let total = (von_neumann_entropy(&seq.states()[0])
                - von_neumann_entropy(&seq.states()[n]))
            .abs();
            let meta = settings.meta(t);
            let report = |name: String, kind, measured, bound, tol| {
                BoundReport::new(name, kind, measured, bound, tol, eps, n, d_b, meta.clone())
            };
            let mut out = vec![report(
                "output-entropy".into(),
                CheckKind::Hard,
                total,
                total_bound,
                settings.tol,
            )];
            for (k, (&s, &d)) in steps.iter().zip(&dists).enumerate() {
                out.push(report(format!("af-step[{}]", k + 1), CheckKind::Hard, s, step_bound, settings.tol));
                out.push(report(format!("hybrid-distance[{}]", k + 1), CheckKind::Hard, d, eps, tol::TRACE));
            }
            out.push(report(
                "telescoping".into(),
                CheckKind::Hard,
                total,
                steps.iter().sum(),
                settings.tol,
            ));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HarnessRun {
        epsilon: eps,
        distance: *distance,
        reports: per_trial.into_iter().flatten().collect(),
    })
}

fn random_ensemble(rng: &mut impl Rng, d: usize, size: usize) -> Result<Ensemble> {
    let weights: Vec<f64> = (0..size).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let items = weights
        .iter()
        .map(|w| {
            let rank = rng.random_range(1..=d);
            (w / total, random_density(rng, d, rank))
        })
        .collect();
    Ensemble::new(items)
}

/// Fixed-parameter checks on `N^{⊗n}` vs `M^{⊗n}` with shared random
/// inputs and ensembles (hard), plus optimized single-letter comparisons
/// against the capacity bounds when `settings.optimize` is set
/// (informational).
pub fn verify_corollaries(
    n_ch: &QuantumChannel,
    m_ch: &QuantumChannel,
    settings: &HarnessSettings,
) -> Result<HarnessRun> {
    check_pair(n_ch, m_ch)?;
    let distance = diamond_distance(n_ch, m_ch)?;
    verify_corollaries_at(n_ch, m_ch, &distance, settings)
}

pub fn verify_corollaries_at(
    n_ch: &QuantumChannel,
    m_ch: &QuantumChannel,
    distance: &SdpResult,
    settings: &HarnessSettings,
) -> Result<HarnessRun> {
    check_pair(n_ch, m_ch)?;
    let eps = harness_eps(distance)?;
    let n = settings.n;
    let d_b = n_ch.d_out();
    let t = output_entropy_bound(n, eps, d_b)?;
    let nn = tensor_power(n_ch, n)?;
    let mn = tensor_power(m_ch, n)?;
    let d = nn.d_in();
    let size = settings.ensemble_size.max(2);

    let per_trial = (0..settings.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = settings.stream(trial);
            let phi = haar_pure_state(&mut rng, &[d, d]).to_density();
            let ens = random_ensemble(&mut rng, d, size)?;
            let coh = (coherent_information(&nn, &phi)? - coherent_information(&mn, &phi)?).abs();
            let chi = (entropic::holevo_information(&nn, &ens)?
                - entropic::holevo_information(&mn, &ens)?)
            .abs();
            let prv = (entropic::private_information(&nn, &ens)?
                - entropic::private_information(&mn, &ens)?)
            .abs();
            let meta = settings.meta(trial);
            let report = |name: &str, measured, bound| {
                BoundReport::new(name, CheckKind::Hard, measured, bound, settings.tol, eps, n, d_b, meta.clone())
            };
            Ok(vec![
                report("fixed-holevo", chi, 2.0 * t),
                report("fixed-coherent", coh, 2.0 * t),
                report("fixed-private", prv, 4.0 * t),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut reports: Vec<BoundReport> = per_trial.into_iter().flatten().collect();

    if let Some(opt) = &settings.optimize {
        let bounds = corollary_bounds(eps, d_b)?;
        let size = crate::capopt::default_ensemble_size(n_ch.d_in());
        for (quantity, bound) in [
            (Quantity::Holevo, bounds.classical),
            (Quantity::Coherent, bounds.quantum),
            (Quantity::Private, bounds.private),
        ] {
            let a = maximize(n_ch, quantity, size, opt)?.best_value;
            let b = maximize(m_ch, quantity, size, opt)?.best_value;
            reports.push(BoundReport::new(
                format!("optimized-{}", quantity.name()),
                CheckKind::Informational,
                (a - b).abs(),
                bound,
                tol::OPT,
                eps,
                1,
                d_b,
                settings.meta(0),
            ));
        }
    }
    Ok(HarnessRun {
        epsilon: eps,
        distance: *distance,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing, identity, truncated_classical_pair};
    use crate::continuity::count_violations;
    use crate::linalg::DensityMatrix;
    use approx::assert_abs_diff_eq;

    fn settings(n: usize, trials: usize, seed: u64) -> HarnessSettings {
        HarnessSettings {
            n,
            trials,
            seed,
            ..HarnessSettings::default()
        }
    }

    #[test]
    fn equal_channels_measure_zero() {
        let ch = depolarizing(2, 0.3).unwrap();
        let run = verify_output_entropy(&ch, &ch, &settings(2, 5, 1)).unwrap();
        assert_eq!(run.epsilon, 0.0);
        assert!(run.reports.iter().all(|r| r.measured <= 1e-9 && !r.violation));
        let run = verify_corollaries(&ch, &ch, &settings(1, 5, 1)).unwrap();
        assert!(run.reports.iter().all(|r| r.measured <= 1e-9));
    }

    #[test]
    fn identity_vs_depolarizing() {
        let a = identity(2);
        let b = depolarizing(2, 0.1).unwrap();
        for n in [1, 2] {
            let run = verify_output_entropy(&a, &b, &settings(n, 10, 2)).unwrap();
            assert_abs_diff_eq!(run.epsilon, 0.15, epsilon = 1e-6);
            assert_eq!(count_violations(&run.reports), 0);
            assert_eq!(run.reports.len(), 10 * (2 + 2 * n));
        }
        let run = verify_corollaries(&a, &b, &settings(1, 10, 3)).unwrap();
        assert_eq!(count_violations(&run.reports), 0);
        // fixed coherent difference at the maximally entangled input
        let phi = DensityMatrix::maximally_entangled(2);
        let diff = (coherent_information(&a, &phi).unwrap()
            - coherent_information(&b, &phi).unwrap())
        .abs();
        assert!(diff <= 2.0 * af_bound(0.15, 2).unwrap());
    }

    #[test]
    fn truncated_pair_is_outside_the_harness_regime_for_small_n() {
        let (n, m) = truncated_classical_pair(4).unwrap();
        let err = verify_output_entropy(&n, &m, &settings(1, 2, 0)).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn random_pairs_are_seeded_and_close() {
        let a = random_pairs(3, 2, 2, 9).unwrap();
        let b = random_pairs(3, 2, 2, 9).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.m, y.m);
            assert!(x.distance.value <= MAX_HARNESS_EPS);
            assert!(x.q > 0.0 && x.q <= MAX_MIX);
        }
        let run = verify_output_entropy_at(
            &a[0].n,
            &a[0].m,
            &a[0].distance,
            &HarnessSettings {
                pair: Some(0),
                ..settings(2, 4, 9)
            },
        )
        .unwrap();
        assert_eq!(count_violations(&run.reports), 0);
        let again = verify_output_entropy_at(
            &a[0].n,
            &a[0].m,
            &a[0].distance,
            &HarnessSettings {
                pair: Some(0),
                ..settings(2, 4, 9)
            },
        )
        .unwrap();
        assert_eq!(
            serde_json::to_string(&run).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn optimized_checks_are_informational() {
        let a = identity(2);
        let b = depolarizing(2, 0.1).unwrap();
        let s = HarnessSettings {
            optimize: Some(OptimizerSettings {
                restarts: 2,
                iters: 200,
                seed: 4,
                grad_tol: 1e-8,
            }),
            ..settings(1, 2, 4)
        };
        let run = verify_corollaries(&a, &b, &s).unwrap();
        let opt: Vec<_> = run
            .reports
            .iter()
            .filter(|r| r.kind == CheckKind::Informational)
            .collect();
        assert_eq!(opt.len(), 3);
        assert!(opt.iter().all(|r| r.margin >= 0.0));
    }
}
