use num_complex::Complex64 as C64;

use super::{mix, QuantumChannel};
use crate::linalg::ComplexMatrix;
use crate::{Error, Result};

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg(format!("probability {p} outside [0,1]")));
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::arg("dimension must be positive"));
    }
    Ok(())
}

fn check_truncation(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::arg(format!("truncation level n = {n}, need n >= 2")));
    }
    Ok(())
}

fn unchecked(d_in: usize, d_out: usize, kraus: Vec<ComplexMatrix>) -> QuantumChannel {
    QuantumChannel {
        d_in,
        d_out,
        kraus,
    }
}

pub fn identity(d: usize) -> QuantumChannel {
    unchecked(d, d, vec![ComplexMatrix::identity(d)])
}

/// Replaces every input by `|0⟩⟨0|` in the same dimension.
pub fn constant_channel(d: usize) -> QuantumChannel {
    sink_to(d, d)
}

fn sink_to(d_in: usize, d_out: usize) -> QuantumChannel {
    let kraus = (0..d_in)
        .map(|i| ComplexMatrix::unit(d_out, d_in, 0, i))
        .collect();
    unchecked(d_in, d_out, kraus)
}

/// `ρ ↦ (1−p) ρ + p Tr(ρ) |d⟩⟨d|`; the erasure flag is the highest output
/// basis index.
pub fn erasure(d: usize, p: f64) -> Result<QuantumChannel> {
    check_dim(d)?;
    check_prob(p)?;
    let mut kraus = Vec::with_capacity(d + 1);
    let keep = ComplexMatrix::from_fn(d + 1, d, |o, i| {
        C64::new(if o == i { (1.0 - p).sqrt() } else { 0.0 }, 0.0)
    });
    kraus.push(keep);
    // all d + 1 operators are kept even at p = 0 so the complementary
    // channel always has the erasure shape
    for i in 0..d {
        kraus.push(ComplexMatrix::unit(d + 1, d, d, i).scale_real(p.sqrt()));
    }
    Ok(unchecked(d, d + 1, kraus))
}

/// `ρ ↦ (1−p) ρ + p Tr(ρ) I/d`, with Kraus operators from the Weyl basis.
pub fn depolarizing(d: usize, p: f64) -> Result<QuantumChannel> {
    check_dim(d)?;
    check_prob(p)?;
    let dd = (d * d) as f64;
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    let mut kraus = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let weight = if a == 0 && b == 0 {
                1.0 - p + p / dd
            } else {
                p / dd
            };
            if weight <= 0.0 {
                continue;
            }
            // X^a Z^b |j⟩ = ω^{bj} |j + a⟩
            let w = ComplexMatrix::from_fn(d, d, |row, j| {
                if row == (j + a) % d {
                    C64::from_polar(weight.sqrt(), omega * (b * j) as f64)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            kraus.push(w);
        }
    }
    Ok(unchecked(d, d, kraus))
}

/// Qubit dephasing `ρ ↦ (1−p) ρ + p ZρZ`.
pub fn dephasing(p: f64) -> Result<QuantumChannel> {
    check_prob(p)?;
    let mut kraus = vec![ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt())];
    if p > 0.0 {
        kraus.push(ComplexMatrix::from_real_diag(&[p.sqrt(), -p.sqrt()]));
    }
    Ok(unchecked(2, 2, kraus))
}

/// `n`-dimensional input sent to output levels `1..=n` of an `(n+1)`-level
/// output, leaving level `0` free as a sink.
pub fn embedded_identity(n: usize) -> QuantumChannel {
    let k = ComplexMatrix::from_fn(n + 1, n, |o, i| {
        C64::new(if o == i + 1 { 1.0 } else { 0.0 }, 0.0)
    });
    unchecked(n, n + 1, vec![k])
}

/// Every `n`-dimensional input mapped to the sink level `|0⟩⟨0|` of an
/// `(n+1)`-level output.
pub fn sink_channel(n: usize) -> QuantumChannel {
    sink_to(n, n + 1)
}

fn inverse_log(n: usize) -> f64 {
    1.0 / (n as f64).log2()
}

/// Truncation of the classical-capacity discontinuity example:
/// `(1 − 1/log n) sink + (1/log n) id_n`.
pub fn truncated_classical_example(n: usize) -> Result<QuantumChannel> {
    check_truncation(n)?;
    let w = inverse_log(n);
    mix(&[sink_channel(n), embedded_identity(n)], &[1.0 - w, w])
}

/// Base channel `ρ ↦ ½ Tr(ρ) |0⟩⟨0| + ½ ρ` of the quantum example: a 50%
/// erasure with the sink as flag.
pub fn truncated_quantum_base(n: usize) -> Result<QuantumChannel> {
    check_truncation(n)?;
    mix(&[sink_channel(n), embedded_identity(n)], &[0.5, 0.5])
}

/// `(1 − 1/log n) base + (1/log n) id_n` for the quantum example.
pub fn truncated_quantum_example(n: usize) -> Result<QuantumChannel> {
    let base = truncated_quantum_base(n)?;
    let w = inverse_log(n);
    mix(&[base, embedded_identity(n)], &[1.0 - w, w])
}

/// `(N, M_n)` of the classical example.
pub fn truncated_classical_pair(n: usize) -> Result<(QuantumChannel, QuantumChannel)> {
    Ok((sink_channel(n), truncated_classical_example(n)?))
}

/// `(N, M_n)` of the quantum example.
pub fn truncated_quantum_pair(n: usize) -> Result<(QuantumChannel, QuantumChannel)> {
    Ok((truncated_quantum_base(n)?, truncated_quantum_example(n)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DensityMatrix;
    use crate::random::{random_density, SeedStream};
    use crate::tol;

    fn assert_valid(ch: &QuantumChannel) {
        assert!(ch.tp_defect() <= tol::TP, "TP defect {}", ch.tp_defect());
        assert!(ch.to_choi().is_cp(tol::PSD).unwrap());
    }

    #[test]
    fn all_constructors_are_channels() {
        assert_valid(&identity(3));
        assert_valid(&constant_channel(3));
        for &p in &[0.0, 0.25, 1.0] {
            assert_valid(&erasure(2, p).unwrap());
            assert_valid(&erasure(3, p).unwrap());
            assert_valid(&depolarizing(2, p).unwrap());
            assert_valid(&depolarizing(3, p).unwrap());
            assert_valid(&dephasing(p).unwrap());
        }
        for n in 2..=8 {
            assert_valid(&truncated_classical_example(n).unwrap());
            assert_valid(&truncated_quantum_example(n).unwrap());
            assert_valid(&sink_channel(n));
        }
    }

    #[test]
    fn parameter_checks() {
        assert!(erasure(2, 1.5).is_err());
        assert!(depolarizing(2, -0.1).is_err());
        assert!(dephasing(2.0).is_err());
        assert!(truncated_classical_example(1).is_err());
        assert!(truncated_quantum_example(0).is_err());
        assert!(erasure(0, 0.1).is_err());
    }

    #[test]
    fn erasure_limits() {
        let mut rng = SeedStream::new(2).rng(&[]);
        let rho = random_density(&mut rng, 2, 2);
        let full = erasure(2, 1.0).unwrap().apply(&rho).unwrap();
        assert!(full.matrix().max_abs_diff(DensityMatrix::basis(3, 2).matrix()) < 1e-15);
        let none = erasure(2, 0.0).unwrap().apply(&rho).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((none.matrix()[(i, j)] - rho.matrix()[(i, j)]).norm() < 1e-15);
            }
        }
        assert!(none.matrix()[(2, 2)].norm() < 1e-15);
    }

    #[test]
    fn depolarizing_action() {
        let mut rng = SeedStream::new(3).rng(&[]);
        for d in [2, 3] {
            let rho = random_density(&mut rng, d, d);
            let p = 0.37;
            let out = depolarizing(d, p).unwrap().apply(&rho).unwrap();
            let mut expect = rho.matrix().scale_real(1.0 - p);
            expect.axpy(p / d as f64, &ComplexMatrix::identity(d));
            assert!(out.matrix().max_abs_diff(&expect) < 1e-14);
        }
    }

    #[test]
    fn truncated_examples_act_as_described() {
        let n = 4;
        let w = 0.5; // 1 / log2 4
        let ch = truncated_classical_example(n).unwrap();
        let out = ch.apply(&DensityMatrix::basis(n, 2)).unwrap();
        let mut expect = ComplexMatrix::zeros(n + 1, n + 1);
        expect[(0, 0)] = C64::new(1.0 - w, 0.0);
        expect[(3, 3)] = C64::new(w, 0.0);
        assert!(out.matrix().max_abs_diff(&expect) < 1e-15);

        let q = truncated_quantum_example(n).unwrap();
        let out = q.apply(&DensityMatrix::basis(n, 0)).unwrap();
        let erase = 0.5 - 0.5 * w;
        assert!((out.matrix()[(0, 0)].re - erase).abs() < 1e-15);
        assert!((out.matrix()[(1, 1)].re - (1.0 - erase)).abs() < 1e-15);
    }

    #[test]
    fn quantum_example_at_two_levels_is_embedded_identity() {
        let q = truncated_quantum_example(2).unwrap();
        let id = embedded_identity(2);
        for i in 0..2 {
            for j in 0..2 {
                let x = ComplexMatrix::unit(2, 2, i, j);
                assert!(q.apply_operator(&x).max_abs_diff(&id.apply_operator(&x)) < 1e-15);
            }
        }
    }
}
