//! Primal-dual interior-point solver for the diamond norm of a map with
//! Hermitian Choi matrix `J` on `in ⊗ out`.
//!
//! Dual (minimization) form, with `P = Tr_out`:
//!
//! ```text
//! minimize t  s.t.  Y − J ⪰ 0,  Y + J ⪰ 0,  t·I − P(Y) ⪰ 0
//! ```
//!
//! Primal (maximization) form:
//!
//! ```text
//! maximize ⟨J, X1 − X2⟩  s.t.  X1 + X2 = X3 ⊗ I_out,  Tr X3 = 1,  X_i ⪰ 0
//! ```
//!
//! Newton directions use Nesterov-Todd scaling. The operator
//! `K(Z) = W1 Z W1 + W2 Z W2` is inverted exactly by simultaneous
//! diagonalization of the pencil `(W1, W2)`, which reduces every Newton step
//! to a dense system of size `d_in² + 1`.
//!
//! Each iterate yields certified bounds: an upper bound from the dual
//! variables (shifted to exact feasibility) and a lower bound
//! `‖(√ρ ⊗ I) J (√ρ ⊗ I)‖₁` from the normalized primal `X3`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::linalg::{eigh, eigvalsh, spectral_sum, ComplexMatrix};
use crate::{tol, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    /// Certified gap within the requested tolerance.
    Optimal,
    MaxIters,
    /// The iterates lost strict feasibility to rounding before the gap
    /// closed; the reported bounds are still certified.
    Infeasible,
}

/// `value` is a certified upper bound on the optimum and `dual_value` a
/// certified lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SdpResult {
    pub value: f64,
    pub dual_value: f64,
    pub iterations: usize,
    pub status: SdpStatus,
}

impl SdpResult {
    pub fn gap(&self) -> f64 {
        self.value - self.dual_value
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    /// Relative gap required for [`SdpStatus::Optimal`].
    pub tol_gap: f64,
    /// Relative gap at which iteration stops.
    pub stop_gap: f64,
    pub max_iters: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol_gap: tol::SDP,
            stop_gap: 1e-10,
            max_iters: 200,
        }
    }
}

const STEP_FRACTION: f64 = 0.98;

pub(crate) fn solve(j: &ComplexMatrix, di: usize, dout: usize, opts: &SdpOptions) -> Result<SdpResult> {
    let d = di * dout;
    if j.rows() != d || j.cols() != d {
        return Err(Error::dim("Choi matrix size does not match d_in * d_out"));
    }
    let jh = j.hermitian_part();
    let scale = eigvalsh(&jh)?
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(SdpResult {
            value: 0.0,
            dual_value: 0.0,
            iterations: 0,
            status: SdpStatus::Optimal,
        });
    }
    let mut solver = Solver::new(jh.scale_real(1.0 / scale), di, dout);
    let mut r = solver.run(opts)?;
    r.value *= scale;
    r.dual_value *= scale;
    Ok(r)
}

fn trace_out(m: &ComplexMatrix, di: usize, dout: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(di, di, |a, b| {
        (0..dout).map(|o| m[(a * dout + o, b * dout + o)]).sum()
    })
}

fn lift(z: &ComplexMatrix, dout: usize) -> ComplexMatrix {
    let di = z.rows();
    ComplexMatrix::from_fn(di * dout, di * dout, |r, c| {
        if r % dout == c % dout {
            z[(r / dout, c / dout)]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn pow_hermitian(vals: &[f64], vecs: &ComplexMatrix, p: f64) -> ComplexMatrix {
    let v: Vec<f64> = vals.iter().map(|&x| x.powf(p)).collect();
    spectral_sum(&v, vecs)
}

/// NT scaling point `W` with `W S W = X`, plus `S⁻¹`.
fn nt_scaling(x: &ComplexMatrix, s: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (sv, su) = eigh(s)?;
    if sv.last().is_none_or(|&v| v <= 0.0) {
        return Err(Error::Numeric("dual slack lost positive definiteness".into()));
    }
    let s_half = pow_hermitian(&sv, &su, 0.5);
    let s_mhalf = pow_hermitian(&sv, &su, -0.5);
    let s_inv = pow_hermitian(&sv, &su, -1.0);
    let g = s_half.conjugate(x).hermitian_part();
    let (gv, gu) = eigh(&g)?;
    if gv.last().is_none_or(|&v| v <= 0.0) {
        return Err(Error::Numeric("primal iterate lost positive definiteness".into()));
    }
    let g_half = pow_hermitian(&gv, &gu, 0.5);
    Ok((s_mhalf.conjugate(&g_half).hermitian_part(), s_inv))
}

/// Largest `α` with `X + α ΔX ⪰ 0` (infinite if `ΔX ⪰ 0`).
fn max_step(x: &ComplexMatrix, dx: &ComplexMatrix) -> Result<f64> {
    let (xv, xu) = eigh(x)?;
    if xv.last().is_none_or(|&v| v <= 0.0) {
        return Ok(0.0);
    }
    let xm = pow_hermitian(&xv, &xu, -0.5);
    let b = xm.conjugate(dx).hermitian_part();
    let lmin = eigvalsh(&b)?.last().copied().unwrap_or(0.0);
    Ok(if lmin >= 0.0 { f64::INFINITY } else { -1.0 / lmin })
}

/// Exact inverse of `K(Z) = W1 Z W1 + W2 Z W2` through `T` with
/// `T† W1 T = Λ`, `T† W2 T = I − Λ`.
struct PencilInverse {
    t: ComplexMatrix,
    t_adj: ComplexMatrix,
    q: Vec<f64>,
}

impl PencilInverse {
    fn new(w1: &ComplexMatrix, w2: &ComplexMatrix) -> Result<Self> {
        let n = w1.rows();
        let sum = (w1 + w2).hermitian_part().to_nalgebra();
        let chol = sum
            .cholesky()
            .ok_or_else(|| Error::Numeric("scaling pencil is not positive definite".into()))?;
        let l = chol.l();
        let fail = || Error::Numeric("triangular solve failed in scaling pencil".into());
        let lw = l.solve_lower_triangular(&w1.to_nalgebra()).ok_or_else(fail)?;
        let a = l.solve_lower_triangular(&lw.adjoint()).ok_or_else(fail)?;
        let a = ComplexMatrix::from_nalgebra(&a).hermitian_part();
        let (lam, u) = eigh(&a)?;
        let t = l
            .adjoint()
            .solve_upper_triangular(&u.to_nalgebra())
            .ok_or_else(fail)?;
        let t = ComplexMatrix::from_nalgebra(&t);
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let den = lam[i] * lam[k] + (1.0 - lam[i]) * (1.0 - lam[k]);
                q[i * n + k] = 1.0 / den;
            }
        }
        Ok(Self {
            t_adj: t.adjoint(),
            t,
            q,
        })
    }

    fn apply(&self, r: &ComplexMatrix) -> ComplexMatrix {
        let mut x = self.t_adj.matmul(r).matmul(&self.t);
        for (z, q) in x.as_mut_slice().iter_mut().zip(&self.q) {
            *z *= q;
        }
        self.t.matmul(&x).matmul(&self.t_adj).hermitian_part()
    }

    /// Matrix of `Z ↦ P K⁻¹(Z ⊗ I)` in the elementary basis, row-major
    /// index `(c,d)` by `(a,b)`.
    fn reduced_operator(&self, di: usize, dout: usize) -> ComplexMatrix {
        let n = self.t.rows();
        let nn = n * n;
        // row (c,d): H^{cd}_{ij} = Σ_o T[(c,o),i] conj(T[(d,o),j])
        let mut h = ComplexMatrix::zeros(di * di, nn);
        let mut hq = ComplexMatrix::zeros(di * di, nn);
        for c in 0..di {
            for dd in 0..di {
                let row = c * di + dd;
                let dst = &mut h.as_mut_slice()[row * nn..(row + 1) * nn];
                for o in 0..dout {
                    let tc = self.t.row(c * dout + o);
                    let td = self.t.row(dd * dout + o);
                    for (i, &a) in tc.iter().enumerate() {
                        let line = &mut dst[i * n..(i + 1) * n];
                        for (z, b) in line.iter_mut().zip(td) {
                            *z += a * b.conj();
                        }
                    }
                }
                let src = h.row(row).to_vec();
                for (k, (z, s)) in hq.as_mut_slice()[row * nn..(row + 1) * nn]
                    .iter_mut()
                    .zip(&src)
                    .enumerate()
                {
                    *z = s * self.q[k];
                }
            }
        }
        let hq = hq.to_nalgebra();
        let h = h.to_nalgebra();
        ComplexMatrix::from_nalgebra(&(hq * h.adjoint()))
    }
}

struct Direction {
    dx: [ComplexMatrix; 3],
    dy: ComplexMatrix,
    dt: f64,
}

struct Solver {
    j: ComplexMatrix,
    di: usize,
    dout: usize,
    x: [ComplexMatrix; 3],
    y: ComplexMatrix,
    t: f64,
}

impl Solver {
    fn new(j: ComplexMatrix, di: usize, dout: usize) -> Self {
        let d = di * dout;
        let beta = 1.0 + j.max_abs() * d as f64;
        Self {
            x: [
                ComplexMatrix::identity(d).scale_real(0.5 / di as f64),
                ComplexMatrix::identity(d).scale_real(0.5 / di as f64),
                ComplexMatrix::identity(di).scale_real(1.0 / di as f64),
            ],
            y: ComplexMatrix::identity(d).scale_real(beta),
            t: beta * dout as f64 + 1.0,
            j,
            di,
            dout,
        }
    }

    fn slacks(&self, y: &ComplexMatrix, t: f64) -> [ComplexMatrix; 3] {
        let s3 = &ComplexMatrix::identity(self.di).scale_real(t) - &trace_out(y, self.di, self.dout);
        [
            (y - &self.j).hermitian_part(),
            (y + &self.j).hermitian_part(),
            s3.hermitian_part(),
        ]
    }

    fn upper_bound(&self, s: &[ComplexMatrix; 3]) -> Result<f64> {
        let m1 = eigvalsh(&s[0])?.last().copied().unwrap_or(0.0);
        let m2 = eigvalsh(&s[1])?.last().copied().unwrap_or(0.0);
        let shift = (-m1.min(m2)).max(0.0);
        let top = eigvalsh(&trace_out(&self.y, self.di, self.dout))?[0];
        Ok(top + shift * self.dout as f64)
    }

    fn lower_bound(&self) -> Result<f64> {
        let (vals, vecs) = eigh(&self.x[2].hermitian_part())?;
        let clipped: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Ok(0.0);
        }
        let root: Vec<f64> = clipped.iter().map(|v| (v / total).sqrt()).collect();
        let a = lift(&spectral_sum(&root, &vecs), self.dout);
        let h = a.conjugate(&self.j).hermitian_part();
        Ok(eigvalsh(&h)?.iter().map(|v| v.abs()).sum())
    }

    fn run(&mut self, opts: &SdpOptions) -> Result<SdpResult> {
        let n_barrier = (2 * self.di * self.dout + self.di) as f64;
        let mut best_upper = f64::INFINITY;
        let mut best_lower = 0.0f64;
        let mut iterations = 0;
        let mut broke_down = false;
        let mut stalled = 0;
        loop {
            let s = self.slacks(&self.y, self.t);
            best_upper = best_upper.min(self.upper_bound(&s)?);
            best_lower = best_lower.max(self.lower_bound()?);
            let rel = (best_upper - best_lower) / (1.0 + best_upper.abs());
            if rel <= opts.stop_gap || iterations >= opts.max_iters {
                break;
            }
            let mu = (0..3).map(|i| self.x[i].real_inner(&s[i])).sum::<f64>() / n_barrier;
            if !(mu > 0.0) || !mu.is_finite() {
                broke_down = true;
                break;
            }
            iterations += 1;
            let (ap, ad) = match self.step(&s, mu) {
                Ok(steps) => steps,
                Err(Error::Numeric(_)) => {
                    broke_down = true;
                    break;
                }
                Err(e) => return Err(e),
            };
            if ap.max(ad) < 1e-10 {
                stalled += 1;
                if stalled >= 3 {
                    broke_down = true;
                    break;
                }
            } else {
                stalled = 0;
            }
        }
        let rel = (best_upper - best_lower) / (1.0 + best_upper.abs());
        let status = if rel <= opts.tol_gap {
            SdpStatus::Optimal
        } else if broke_down {
            SdpStatus::Infeasible
        } else {
            SdpStatus::MaxIters
        };
        Ok(SdpResult {
            value: best_upper,
            dual_value: best_lower.min(best_upper),
            iterations,
            status,
        })
    }

    /// One predictor-corrector step; returns the primal and dual step lengths.
    fn step(&mut self, s: &[ComplexMatrix; 3], mu: f64) -> Result<(f64, f64)> {
        let (di, dout) = (self.di, self.dout);
        let mut w = Vec::with_capacity(3);
        let mut s_inv = Vec::with_capacity(3);
        for (xi, si) in self.x.iter().zip(s) {
            let (wi, si) = nt_scaling(xi, si)?;
            w.push(wi);
            s_inv.push(si);
        }
        let kinv = PencilInverse::new(&w[0], &w[1])?;
        let m = kinv.reduced_operator(di, dout);

        let dd = di * di;
        let w3 = &w[2];
        let w3sq = w3.matmul(w3);
        let mut schur = DMatrix::<C64>::zeros(dd + 1, dd + 1);
        for a in 0..di {
            for b in 0..di {
                let col = a * di + b;
                let mab = ComplexMatrix::from_fn(di, di, |c, e| m[(c * di + e, col)]);
                let img = w3.matmul(&mab).matmul(w3);
                for c in 0..di {
                    for e in 0..di {
                        schur[(c * di + e, col)] = img[(c, e)];
                    }
                }
                schur[(col, col)] += C64::new(1.0, 0.0);
                if a == b {
                    schur[(dd, col)] = C64::new(1.0, 0.0);
                }
            }
        }
        for c in 0..di {
            for e in 0..di {
                schur[(c * di + e, dd)] = -w3sq[(c, e)];
            }
        }
        let lu = schur.lu();

        let r_x = &(&lift(&self.x[2], dout) - &self.x[0]) - &self.x[1];
        let r_tr = 1.0 - self.x[2].trace().re;

        let direction = |sigma: f64| -> Result<Direction> {
            let r: Vec<ComplexMatrix> = (0..3)
                .map(|i| (&s_inv[i].scale_real(sigma * mu) - &self.x[i]).hermitian_part())
                .collect();
            let f = &(&(&r[0] + &r[1]) - &lift(&r[2], dout)) - &r_x;
            let pkf = trace_out(&kinv.apply(&f), di, dout);
            let rhs_m = w3.matmul(&pkf).matmul(w3);
            let mut rhs = DMatrix::<C64>::zeros(dd + 1, 1);
            for c in 0..di {
                for e in 0..di {
                    rhs[c * di + e] = -rhs_m[(c, e)];
                }
            }
            rhs[dd] = C64::new(r[2].trace().re - r_tr, 0.0);
            let sol = lu
                .solve(&rhs)
                .ok_or_else(|| Error::Numeric("singular reduced Newton system".into()))?;
            if sol.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Numeric("non-finite Newton direction".into()));
            }
            let z3 = ComplexMatrix::from_fn(di, di, |c, e| sol[c * di + e]).hermitian_part();
            let dt = sol[dd].re;
            let dy = kinv.apply(&(&f + &lift(&z3, dout)));
            let ds3 = &ComplexMatrix::identity(di).scale_real(dt) - &trace_out(&dy, di, dout);
            let dx = [
                (&r[0] - &w[0].matmul(&dy).matmul(&w[0])).hermitian_part(),
                (&r[1] - &w[1].matmul(&dy).matmul(&w[1])).hermitian_part(),
                (&r[2] - &w[2].matmul(&ds3).matmul(&w[2])).hermitian_part(),
            ];
            Ok(Direction { dx, dy, dt })
        };

        let steps = |dir: &Direction| -> Result<(f64, f64)> {
            let ds = self.dual_direction_slacks(dir);
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for i in 0..3 {
                ap = ap.min(max_step(&self.x[i], &dir.dx[i])?);
                ad = ad.min(max_step(&s[i], &ds[i])?);
            }
            Ok((ap, ad))
        };

        let pred = direction(0.0)?;
        let (ap, ad) = steps(&pred)?;
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let ds = self.dual_direction_slacks(&pred);
        let n_barrier = (2 * di * dout + di) as f64;
        let mu_aff = (0..3)
            .map(|i| {
                let xa = &self.x[i] + &pred.dx[i].scale_real(ap);
                let sa = &s[i] + &ds[i].scale_real(ad);
                xa.real_inner(&sa)
            })
            .sum::<f64>()
            / n_barrier;
        let sigma = (mu_aff.max(0.0) / mu).powi(3).clamp(0.0, 1.0);

        let corr = direction(sigma)?;
        let (ap, ad) = steps(&corr)?;
        let ap = (STEP_FRACTION * ap).min(1.0);
        let ad = (STEP_FRACTION * ad).min(1.0);
        for i in 0..3 {
            self.x[i] = (&self.x[i] + &corr.dx[i].scale_real(ap)).hermitian_part();
        }
        self.y = (&self.y + &corr.dy.scale_real(ad)).hermitian_part();
        self.t += ad * corr.dt;
        Ok((ap, ad))
    }

    fn dual_direction_slacks(&self, dir: &Direction) -> [ComplexMatrix; 3] {
        let ds3 = &ComplexMatrix::identity(self.di).scale_real(dir.dt)
            - &trace_out(&dir.dy, self.di, self.dout);
        [dir.dy.clone(), dir.dy.clone(), ds3.hermitian_part()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_unitary, SeedStream};

    /// Pencil inverse against the defining equation.
    #[test]
    fn pencil_inverse_solves_k() {
        let mut rng = SeedStream::new(3).rng(&[]);
        for n in [1usize, 3, 6] {
            let mk = |rng: &mut _| {
                let u = random_unitary(rng, n).unwrap();
                let d: Vec<f64> = (1..=n).map(|k| 0.1 * k as f64).collect();
                spectral_sum(&d, &u)
            };
            let w1 = mk(&mut rng);
            let w2 = mk(&mut rng);
            let r = random_hermitian(&mut rng, n);
            let k = PencilInverse::new(&w1, &w2).unwrap();
            let z = k.apply(&r);
            let back = &w1.matmul(&z).matmul(&w1) + &w2.matmul(&z).matmul(&w2);
            assert!(back.max_abs_diff(&r) < 1e-10);
        }
    }

    #[test]
    fn reduced_operator_matches_direct_application() {
        let mut rng = SeedStream::new(4).rng(&[]);
        let (di, dout) = (2, 3);
        let n = di * dout;
        let a = random_hermitian(&mut rng, n);
        let w1 = &a.matmul(&a) + &ComplexMatrix::identity(n);
        let b = random_hermitian(&mut rng, n);
        let w2 = &b.matmul(&b) + &ComplexMatrix::identity(n).scale_real(0.5);
        let k = PencilInverse::new(&w1, &w2).unwrap();
        let m = k.reduced_operator(di, dout);
        let z = random_hermitian(&mut rng, di);
        let direct = trace_out(&k.apply(&lift(&z, dout)), di, dout);
        for c in 0..di {
            for e in 0..di {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..di {
                    for b in 0..di {
                        acc += m[(c * di + e, a * di + b)] * z[(a, b)];
                    }
                }
                assert!((acc - direct[(c, e)]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn nt_scaling_identity() {
        let mut rng = SeedStream::new(5).rng(&[]);
        let a = random_hermitian(&mut rng, 4);
        let x = &a.matmul(&a) + &ComplexMatrix::identity(4).scale_real(0.1);
        let b = random_hermitian(&mut rng, 4);
        let s = &b.matmul(&b) + &ComplexMatrix::identity(4).scale_real(0.2);
        let (w, s_inv) = nt_scaling(&x, &s).unwrap();
        assert!(w.matmul(&s).matmul(&w).max_abs_diff(&x) < 1e-10);
        assert!(s_inv.matmul(&s).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-10);
    }

    #[test]
    fn certified_bounds_bracket_known_value() {
        // J = |0⟩⟨0| ⊗ σ_z on a 1 -> 2 map: the norm is ‖σ_z‖₁ = 2
        let j = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        let r = solve(&j, 1, 2, &SdpOptions::default()).unwrap();
        assert!(r.dual_value <= 2.0 + 1e-12 && r.value >= 2.0 - 1e-12);
        assert!(r.gap() <= 1e-8);
        assert_eq!(r.status, SdpStatus::Optimal);
    }

    #[test]
    fn iteration_cap_reports_max_iters() {
        let j = ComplexMatrix::from_real_diag(&[1.0, -0.5, 0.25, 0.0]);
        let opts = SdpOptions {
            max_iters: 2,
            ..SdpOptions::default()
        };
        let r = solve(&j, 2, 2, &opts).unwrap();
        assert_eq!(r.iterations, 2);
        assert_eq!(r.status, SdpStatus::MaxIters);
        assert!(r.dual_value <= r.value);
    }
}
