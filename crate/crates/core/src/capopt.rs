//! Lower-bound certifiers for single-letter (and small `n`-copy) capacity
//! proxies: coherent information over pure bipartite inputs, Holevo and
//! private information over finite pure-state ensembles.
//!
//! Each restart runs gradient ascent with Armijo backtracking on
//! unconstrained parameters: complex vectors normalized on evaluation and,
//! for ensembles, softmax logits for the probabilities. Restarts run in
//! parallel with independent random streams and the best value wins.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{tensor_power, QuantumChannel};
use crate::entropic::{self, Ensemble};
use crate::linalg::{eigh, spectral_sum, ComplexMatrix, PureState};
use crate::random::{complex_gaussian, SeedStream};
use crate::{tol, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Coherent,
    Holevo,
    Private,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Coherent => "coherent",
            Quantity::Holevo => "holevo",
            Quantity::Private => "private",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    pub grad_tol: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            restarts: 16,
            iters: 2000,
            seed: 0,
            grad_tol: 1e-8,
        }
    }
}

impl OptimizerSettings {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Argmax {
    State(PureState),
    Ensemble(Ensemble),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationReport {
    pub quantity: Quantity,
    pub best_value: f64,
    pub argmax: Argmax,
    pub restarts: usize,
    /// Iterations used by each restart, in restart order.
    pub iterations: Vec<usize>,
    /// Whether the winning restart met the gradient tolerance.
    pub converged: bool,
}

impl OptimizationReport {
    /// Recomputes the quantity at `argmax` with the entropic module.
    pub fn reevaluate(&self, ch: &QuantumChannel) -> Result<f64> {
        match (&self.argmax, self.quantity) {
            (Argmax::State(psi), Quantity::Coherent) => {
                entropic::coherent_information(ch, &psi.to_density())
            }
            (Argmax::Ensemble(ens), Quantity::Holevo) => entropic::holevo_information(ch, ens),
            (Argmax::Ensemble(ens), Quantity::Private) => entropic::private_information(ch, ens),
            _ => Err(Error::arg("argmax kind does not match the quantity")),
        }
    }
}

/// Parameters of one restart: complex blocks (each normalized) and logits.
#[derive(Debug, Clone)]
struct Params {
    blocks: Vec<Vec<C64>>,
    logits: Vec<f64>,
}

impl Params {
    fn normalize(&mut self) {
        for b in &mut self.blocks {
            let n = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n > 0.0 {
                b.iter_mut().for_each(|z| *z /= n);
            }
        }
    }

    fn norm_sqr(&self) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .chain(self.logits.iter().map(|x| x * x))
            .sum()
    }

    fn step(&self, dir: &Params, s: f64) -> Params {
        let mut out = Params {
            blocks: self
                .blocks
                .iter()
                .zip(&dir.blocks)
                .map(|(b, g)| b.iter().zip(g).map(|(x, d)| x + d * s).collect())
                .collect(),
            logits: self
                .logits
                .iter()
                .zip(&dir.logits)
                .map(|(x, d)| x + d * s)
                .collect(),
        };
        out.normalize();
        out
    }
}

/// `log₂` of a Hermitian positive semidefinite matrix with eigenvalues
/// floored at [`tol::PERTURB`].
fn floored_log2(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (vals, vecs) = eigh(&m.hermitian_part())?;
    let logs: Vec<f64> = vals.iter().map(|v| v.max(tol::PERTURB).log2()).collect();
    Ok(spectral_sum(&logs, &vecs))
}

/// Tangent gradient `2 (G − ⟨v|G|v⟩) v` on the unit sphere.
fn sphere_gradient(g: &ComplexMatrix, v: &[C64]) -> Vec<C64> {
    let gv = g.apply(v);
    let c: f64 = v.iter().zip(&gv).map(|(a, b)| (a.conj() * b).re).sum();
    gv.iter().zip(v).map(|(a, b)| (a - b * c) * 2.0).collect()
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|x| (x - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

trait Objective: Sync {
    fn init(&self, rng: &mut impl Rng) -> Params;
    fn value_grad(&self, p: &Params) -> Result<(f64, Params)>;
    fn argmax(&self, p: &Params) -> Result<Argmax>;
}

/// `I^coh` of a pure input on `A ⊗ A'`, parameterized by `Φ` (rows `A'`,
/// columns `A`) with `ρ_{A'} = ΦΦ†`. For pure inputs
/// `I^coh = S(N(ρ)) − S(N^c(ρ))`.
struct CoherentObjective {
    ch: QuantumChannel,
    comp: QuantumChannel,
}

impl CoherentObjective {
    fn phi(&self, p: &Params) -> ComplexMatrix {
        let d = self.ch.d_in();
        ComplexMatrix::new(d, d, p.blocks[0].clone()).expect("block size d_in²")
    }
}

impl Objective for CoherentObjective {
    fn init(&self, rng: &mut impl Rng) -> Params {
        let d = self.ch.d_in();
        let mut p = Params {
            blocks: vec![(0..d * d).map(|_| complex_gaussian(rng)).collect()],
            logits: vec![],
        };
        p.normalize();
        p
    }

    fn value_grad(&self, p: &Params) -> Result<(f64, Params)> {
        let phi = self.phi(p);
        let rho = phi.matmul(&phi.adjoint());
        let b = self.ch.apply_operator(&rho);
        let e = self.comp.apply_operator(&rho);
        let value = entropic::matrix_entropy(&b)? - entropic::matrix_entropy(&e)?;
        let g = &self.comp.apply_adjoint(&floored_log2(&e)?)
            - &self.ch.apply_adjoint(&floored_log2(&b)?);
        let c = g.real_inner(&rho);
        let shifted = &g - &ComplexMatrix::identity(rho.rows()).scale_real(c);
        let grad = shifted.matmul(&phi).scale_real(2.0);
        Ok((
            value,
            Params {
                blocks: vec![grad.into_vec()],
                logits: vec![],
            },
        ))
    }

    fn argmax(&self, p: &Params) -> Result<Argmax> {
        let phi = self.phi(p);
        let d = self.ch.d_in();
        // |ψ⟩ = Σ Φ[a', a] |a⟩_A |a'⟩_{A'}
        let v = (0..d * d).map(|k| phi[(k % d, k / d)]).collect();
        Ok(Argmax::State(PureState::normalized(v, vec![d, d])?))
    }
}

/// Holevo (and, with `comp`, private) information of a pure-state ensemble.
struct EnsembleObjective {
    ch: QuantumChannel,
    comp: Option<QuantumChannel>,
    size: usize,
}

struct HolevoTerms {
    value: f64,
    /// `∂/∂p_x`, up to a common constant.
    dp: Vec<f64>,
    /// Euclidean gradient with respect to each `φ_x`, before the `p_x` factor.
    dphi: Vec<ComplexMatrix>,
}

fn holevo_terms(ch: &QuantumChannel, probs: &[f64], states: &[ComplexMatrix]) -> Result<HolevoTerms> {
    let outs: Vec<ComplexMatrix> = states.iter().map(|s| ch.apply_operator(s)).collect();
    let value = entropic::holevo_quantity(probs, &outs)?;
    let d = ch.d_out();
    let mut avg = ComplexMatrix::zeros(d, d);
    for (p, o) in probs.iter().zip(&outs) {
        avg.axpy(*p, o);
    }
    let log_avg = floored_log2(&avg)?;
    let mut dp = Vec::with_capacity(outs.len());
    let mut dphi = Vec::with_capacity(outs.len());
    for o in &outs {
        let log_o = floored_log2(o)?;
        dp.push(-o.real_inner(&log_avg) - entropic::matrix_entropy(o)?);
        dphi.push(ch.apply_adjoint(&(&log_o - &log_avg)));
    }
    Ok(HolevoTerms { value, dp, dphi })
}

impl EnsembleObjective {
    fn states(&self, p: &Params) -> Vec<ComplexMatrix> {
        p.blocks.iter().map(|v| ComplexMatrix::outer(v, v)).collect()
    }
}

impl Objective for EnsembleObjective {
    fn init(&self, rng: &mut impl Rng) -> Params {
        let d = self.ch.d_in();
        let mut p = Params {
            blocks: (0..self.size)
                .map(|_| (0..d).map(|_| complex_gaussian(rng)).collect())
                .collect(),
            logits: (0..self.size).map(|_| 0.1 * complex_gaussian(rng).re).collect(),
        };
        p.normalize();
        p
    }

    fn value_grad(&self, p: &Params) -> Result<(f64, Params)> {
        let probs = softmax(&p.logits);
        let states = self.states(p);
        let mut t = holevo_terms(&self.ch, &probs, &states)?;
        if let Some(comp) = &self.comp {
            let e = holevo_terms(comp, &probs, &states)?;
            t.value -= e.value;
            for (a, b) in t.dp.iter_mut().zip(&e.dp) {
                *a -= b;
            }
            for (a, b) in t.dphi.iter_mut().zip(&e.dphi) {
                *a -= b;
            }
        }
        let mean: f64 = probs.iter().zip(&t.dp).map(|(p, g)| p * g).sum();
        let logits = probs.iter().zip(&t.dp).map(|(p, g)| p * (g - mean)).collect();
        let blocks = p
            .blocks
            .iter()
            .zip(&t.dphi)
            .zip(&probs)
            .map(|((v, g), &px)| sphere_gradient(&g.scale_real(px), v))
            .collect();
        Ok((t.value, Params { blocks, logits }))
    }

    fn argmax(&self, p: &Params) -> Result<Argmax> {
        let probs = softmax(&p.logits);
        let d = self.ch.d_in();
        let items = probs
            .iter()
            .zip(&p.blocks)
            .map(|(&px, v)| Ok((px, PureState::normalized(v.clone(), vec![d])?.to_density())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Argmax::Ensemble(Ensemble::new(items)?))
    }
}

struct RestartOutcome {
    value: f64,
    params: Params,
    iterations: usize,
    converged: bool,
}

const ARMIJO: f64 = 1e-4;
const MAX_STEP: f64 = 1e4;
const MIN_STEP: f64 = 1e-14;

fn ascend(obj: &impl Objective, mut x: Params, settings: &OptimizerSettings) -> Result<RestartOutcome> {
    let (mut f, mut g) = obj.value_grad(&x)?;
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < settings.iters {
        let gn2 = g.norm_sqr();
        if gn2.sqrt() < settings.grad_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut accepted = false;
        while step >= MIN_STEP {
            let cand = x.step(&g, step);
            let (fc, gc) = obj.value_grad(&cand)?;
            if fc.is_finite() && fc >= f + ARMIJO * step * gn2 {
                x = cand;
                f = fc;
                g = gc;
                step = (step * 2.0).min(MAX_STEP);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // no ascent possible along the gradient at machine precision
            break;
        }
    }
    Ok(RestartOutcome {
        value: f,
        params: x,
        iterations,
        converged,
    })
}

fn run_restarts(obj: &impl Objective, quantity: Quantity, settings: &OptimizerSettings) -> Result<OptimizationReport> {
    if settings.restarts == 0 {
        return Err(Error::arg("at least one restart is required"));
    }
    let streams = SeedStream::new(settings.seed);
    let outcomes = (0..settings.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = streams.rng(&[r as u64]);
            ascend(obj, obj.init(&mut rng), settings)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = i;
        }
    }
    let win = &outcomes[best];
    Ok(OptimizationReport {
        quantity,
        best_value: win.value,
        argmax: obj.argmax(&win.params)?,
        restarts: settings.restarts,
        iterations: outcomes.iter().map(|o| o.iterations).collect(),
        converged: win.converged,
    })
}

fn check_budget(ch: &QuantumChannel) -> Result<()> {
    if ch.d_in().saturating_mul(ch.d_in()) > tol::DEFAULT_MAX_DIM {
        return Err(Error::dim(format!(
            "input dimension {} too large for the bipartite parameterization",
            ch.d_in()
        )));
    }
    Ok(())
}

/// Best `I^coh(N, ψ)` over pure inputs on `A ⊗ A'` with `dim A = d_in`.
pub fn max_coherent_information(ch: &QuantumChannel, settings: &OptimizerSettings) -> Result<OptimizationReport> {
    check_budget(ch)?;
    let obj = CoherentObjective {
        comp: ch.complementary(),
        ch: ch.clone(),
    };
    run_restarts(&obj, Quantity::Coherent, settings)
}

fn check_size(size: usize) -> Result<()> {
    if size < 2 {
        return Err(Error::arg("ensemble size must be at least 2"));
    }
    Ok(())
}

/// Best `I(X;B)` over ensembles of `ensemble_size` pure states.
pub fn max_holevo(ch: &QuantumChannel, ensemble_size: usize, settings: &OptimizerSettings) -> Result<OptimizationReport> {
    check_size(ensemble_size)?;
    let obj = EnsembleObjective {
        ch: ch.clone(),
        comp: None,
        size: ensemble_size,
    };
    run_restarts(&obj, Quantity::Holevo, settings)
}

/// Best `I(X;B) − I(X;E)` over ensembles of `ensemble_size` pure states.
pub fn max_private(ch: &QuantumChannel, ensemble_size: usize, settings: &OptimizerSettings) -> Result<OptimizationReport> {
    check_size(ensemble_size)?;
    let obj = EnsembleObjective {
        ch: ch.clone(),
        comp: Some(ch.complementary()),
        size: ensemble_size,
    };
    run_restarts(&obj, Quantity::Private, settings)
}

/// Default ensemble size: `d_in²` pure states (enough for the Holevo
/// optimum), capped at 16.
pub fn default_ensemble_size(d_in: usize) -> usize {
    (d_in * d_in).clamp(2, 16)
}

pub fn maximize(
    ch: &QuantumChannel,
    quantity: Quantity,
    ensemble_size: usize,
    settings: &OptimizerSettings,
) -> Result<OptimizationReport> {
    match quantity {
        Quantity::Coherent => max_coherent_information(ch, settings),
        Quantity::Holevo => max_holevo(ch, ensemble_size, settings),
        Quantity::Private => max_private(ch, ensemble_size, settings),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NCopyReport {
    pub n: usize,
    /// `best_value / n` on `N^{⊗n}`.
    pub per_copy_value: f64,
    pub single_letter_value: f64,
    /// `per_copy_value − single_letter_value`; reported, not asserted.
    pub superadditivity: f64,
    /// `per_copy_value ≥ single_letter_value − τ_opt`.
    pub monotone: bool,
    pub report: OptimizationReport,
}

/// Runs the maximizer on `N^{⊗n}` and normalizes per copy.
pub fn n_copy(
    ch: &QuantumChannel,
    n: usize,
    quantity: Quantity,
    ensemble_size: usize,
    settings: &OptimizerSettings,
) -> Result<NCopyReport> {
    let power = tensor_power(ch, n)?;
    let report = maximize(&power, quantity, ensemble_size, settings)?;
    let single = if n == 1 {
        report.best_value
    } else {
        maximize(ch, quantity, ensemble_size, settings)?.best_value
    };
    let per_copy = report.best_value / n as f64;
    Ok(NCopyReport {
        n,
        per_copy_value: per_copy,
        single_letter_value: single,
        superadditivity: per_copy - single,
        monotone: per_copy >= single - tol::OPT,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{
        constant_channel, depolarizing, erasure, identity, truncated_classical_example,
    };
    use crate::random::{random_channel, random_unitary};
    use approx::assert_abs_diff_eq;

    fn quick(seed: u64) -> OptimizerSettings {
        OptimizerSettings {
            restarts: 4,
            iters: 500,
            seed,
            grad_tol: 1e-8,
        }
    }

    fn check_gradient(obj: &impl Objective, seed: u64) {
        let mut rng = SeedStream::new(seed).rng(&[]);
        let x = obj.init(&mut rng);
        let (_, g) = obj.value_grad(&x).unwrap();
        // directional derivative along the (tangent) gradient itself
        let h = 1e-6;
        let (fp, _) = obj.value_grad(&x.step(&g, h)).unwrap();
        let (fm, _) = obj.value_grad(&x.step(&g, -h)).unwrap();
        let fd = (fp - fm) / (2.0 * h);
        let gn2 = g.norm_sqr();
        assert!((fd - gn2).abs() <= 1e-4 * (1.0 + gn2), "fd {fd} vs {gn2}");
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let mut rng = SeedStream::new(40).rng(&[]);
        let ch = random_channel(&mut rng, 2, 3, 2).unwrap();
        check_gradient(
            &CoherentObjective {
                comp: ch.complementary(),
                ch: ch.clone(),
            },
            1,
        );
        check_gradient(
            &EnsembleObjective {
                ch: ch.clone(),
                comp: None,
                size: 3,
            },
            2,
        );
        check_gradient(
            &EnsembleObjective {
                comp: Some(ch.complementary()),
                ch,
                size: 3,
            },
            3,
        );
    }

    #[test]
    fn coherent_examples() {
        let r = max_coherent_information(&identity(2), &quick(1)).unwrap();
        assert_abs_diff_eq!(r.best_value, 1.0, epsilon = 1e-6);
        for &p in &[0.0, 0.1, 0.25] {
            let r = max_coherent_information(&erasure(2, p).unwrap(), &quick(2)).unwrap();
            assert_abs_diff_eq!(r.best_value, 1.0 - 2.0 * p, epsilon = 1e-3);
            assert_abs_diff_eq!(
                r.reevaluate(&erasure(2, p).unwrap()).unwrap(),
                r.best_value,
                epsilon = tol::ENT
            );
        }
        let r = max_coherent_information(&erasure(2, 0.5).unwrap(), &quick(3)).unwrap();
        assert!(r.best_value.abs() <= 1e-6);
    }

    #[test]
    fn holevo_examples() {
        let r = max_holevo(&identity(2), 2, &quick(4)).unwrap();
        assert_abs_diff_eq!(r.best_value, 1.0, epsilon = 1e-4);
        let r = max_holevo(&constant_channel(2), 3, &quick(5)).unwrap();
        assert!(r.best_value.abs() <= 1e-9);
        let ch = truncated_classical_example(8).unwrap();
        let chi = entropic::holevo_information(&ch, &Ensemble::uniform_basis(8)).unwrap();
        assert_abs_diff_eq!(chi, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn private_examples() {
        let r = max_private(&identity(2), 2, &quick(6)).unwrap();
        assert_abs_diff_eq!(r.best_value, 1.0, epsilon = 1e-4);
        let r = max_private(&erasure(2, 0.5).unwrap(), 2, &quick(7)).unwrap();
        assert!(r.best_value.abs() <= 1e-6);
        let ch = erasure(2, 0.25).unwrap();
        let pr = max_private(&ch, 4, &quick(8)).unwrap();
        let chi = max_holevo(&ch, 4, &quick(8)).unwrap();
        assert!(pr.best_value >= 0.5 - tol::OPT);
        assert!(pr.best_value <= chi.best_value + tol::OPT);
        assert_abs_diff_eq!(
            pr.reevaluate(&ch).unwrap(),
            pr.best_value,
            epsilon = tol::ENT
        );
    }

    #[test]
    fn sandwich_on_depolarizing() {
        let ch = depolarizing(2, 0.1).unwrap();
        let ic = max_coherent_information(&ch, &quick(9)).unwrap().best_value;
        let pr = max_private(&ch, 4, &quick(9)).unwrap().best_value;
        let chi = max_holevo(&ch, 4, &quick(9)).unwrap().best_value;
        assert!(ic <= pr + tol::OPT, "{ic} {pr}");
        assert!(pr <= chi + tol::OPT, "{pr} {chi}");
    }

    #[test]
    fn seeded_runs_are_identical() {
        let ch = erasure(2, 0.3).unwrap();
        let a = serde_json::to_string(&max_holevo(&ch, 3, &quick(10)).unwrap()).unwrap();
        let b = serde_json::to_string(&max_holevo(&ch, 3, &quick(10)).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn input_unitary_does_not_change_optimum() {
        let mut rng = SeedStream::new(41).rng(&[]);
        let ch = random_channel(&mut rng, 2, 2, 2).unwrap();
        let u = random_unitary(&mut rng, 2).unwrap();
        let rotated = ch.precompose_unitary(&u).unwrap();
        let a = max_coherent_information(&ch, &quick(11)).unwrap().best_value;
        let b = max_coherent_information(&rotated, &quick(11)).unwrap().best_value;
        assert_abs_diff_eq!(a, b, epsilon = tol::OPT);
    }

    #[test]
    fn n_copy_wrappers() {
        let r = n_copy(&identity(2), 2, Quantity::Coherent, 2, &quick(12)).unwrap();
        assert_abs_diff_eq!(r.report.best_value, 2.0, epsilon = 1e-4);
        assert_abs_diff_eq!(r.per_copy_value, 1.0, epsilon = 1e-4);
        let ch = erasure(2, 0.25).unwrap();
        let r = n_copy(&ch, 2, Quantity::Coherent, 2, &quick(13)).unwrap();
        assert_abs_diff_eq!(r.per_copy_value, 0.5, epsilon = tol::OPT);
        assert!(r.monotone);
        let one = n_copy(&ch, 1, Quantity::Holevo, 2, &quick(14)).unwrap();
        assert_eq!(one.per_copy_value, one.report.best_value);
    }

    #[test]
    fn argument_checks() {
        assert!(max_holevo(&identity(2), 1, &quick(0)).is_err());
        let none = OptimizerSettings {
            restarts: 0,
            ..quick(0)
        };
        assert!(max_coherent_information(&identity(2), &none).is_err());
    }
}
