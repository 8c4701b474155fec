//! Rate arithmetic for two-way and back-assisted quantum capacities near a
//! channel `N` with `Q₂(N) > 0`.
//!
//! A nearby `M` is written as `M = p₁M₁ + (1−p₁)N` and `N = p₂M₂ + (1−p₂)M`
//! with `M₁`, `M₂` channels. Each channel then simulates the other: a
//! `(1−p)` fraction of uses carries the channel itself and the rest is
//! replaced by teleportation at cost `log d` per use.

use serde::Serialize;

use crate::{Error, Result};

/// Mixing decomposition of a pair `(N, M)` inside a ball of radius `Δ`
/// around `N`, shrunk to radius `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingGeometry {
    pub p1: f64,
    /// At most 1/2 because `M₂` is taken on the far side of `M`.
    pub p2: f64,
    #[serde(rename = "Delta")]
    pub big_delta: f64,
    pub delta: f64,
    /// `log₂ min(d_in, d_out)`.
    pub log_d: f64,
}

fn in_unit(name: &str, x: f64, hi: f64) -> Result<()> {
    if !(0.0..=hi).contains(&x) {
        return Err(Error::arg(format!("{name} = {x} outside [0, {hi}]")));
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::arg(format!("{name} = {x} must be positive")));
    }
    Ok(())
}

impl MixingGeometry {
    pub fn new(p1: f64, p2: f64, big_delta: f64, delta: f64, log_d: f64) -> Result<Self> {
        in_unit("p1", p1, 1.0)?;
        in_unit("p2", p2, 0.5)?;
        positive("Delta", big_delta)?;
        positive("delta", delta)?;
        positive("log_d", log_d)?;
        if delta > big_delta {
            return Err(Error::arg(format!("delta = {delta} exceeds Delta = {big_delta}")));
        }
        Ok(Self {
            p1,
            p2,
            big_delta,
            delta,
            log_d,
        })
    }

    pub fn from_dims(p1: f64, p2: f64, big_delta: f64, delta: f64, d_in: usize, d_out: usize) -> Result<Self> {
        let d = d_in.min(d_out);
        if d < 2 {
            return Err(Error::dim("need min(d_in, d_out) >= 2"));
        }
        Self::new(p1, p2, big_delta, delta, (d as f64).log2())
    }
}

/// `p₁ log d + (1 − p₁) Q₂(N)`, an upper bound on `Q₂(M)`.
pub fn simulation_upper_bound(q2_n: f64, p1: f64, log_d: f64) -> Result<f64> {
    if !(q2_n > 0.0) {
        return Err(Error::Domain(format!(
            "Q2(N) = {q2_n}: the simulation bound needs positive capacity"
        )));
    }
    in_unit("p1", p1, 1.0)?;
    positive("log_d", log_d)?;
    Ok(p1 * log_d + (1.0 - p1) * q2_n)
}

/// `min[p₁ (log d − Q₂(N)), p₂ (log d − Q₂(M))]`, bounding `|Q₂(N) − Q₂(M)|`.
pub fn mutual_gap_bound(q2_n: f64, q2_m: f64, p1: f64, p2: f64, log_d: f64) -> Result<f64> {
    positive("log_d", log_d)?;
    in_unit("Q2(N)", q2_n, log_d)?;
    in_unit("Q2(M)", q2_m, log_d)?;
    in_unit("p1", p1, 1.0)?;
    in_unit("p2", p2, 1.0)?;
    Ok((p1 * (log_d - q2_n)).min(p2 * (log_d - q2_m)))
}

/// Mixing weights after moving `M` along the line through `N` to distance
/// `δ`: `q₁ = p₁ δ/Δ` and `q₂ = p₂ r / (r p₂ + 1 − p₂)` with `r = δ/Δ`, so
/// `q₂ ≤ 2 p₂ δ/Δ`.
pub fn colinear_rescale(geom: &MixingGeometry) -> (f64, f64) {
    let r = geom.delta / geom.big_delta;
    let q1 = geom.p1 * r;
    let q2 = geom.p2 * r / (r * geom.p2 + (1.0 - geom.p2));
    (q1, q2)
}

/// `δ = Δ ε / (2 log d)`: radius within which `|Q₂(N) − Q₂(N′)| ≤ ε`.
pub fn continuity_delta(eps: f64, big_delta: f64, log_d: f64) -> Result<f64> {
    positive("eps", eps)?;
    positive("Delta", big_delta)?;
    positive("log_d", log_d)?;
    Ok(big_delta * eps / (2.0 * log_d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityCheck {
    pub delta: f64,
    pub q1: f64,
    pub q2: f64,
    /// `min(q₁, q₂) log d`, which dominates the mutual gap bound.
    pub gap_bound: f64,
    pub eps: f64,
}

/// Composes [`continuity_delta`], [`colinear_rescale`] and the gap bound for
/// the given `p₁`, `p₂`. `δ` is capped at `Δ` when `ε ≥ 2 log d`.
pub fn continuity_check(eps: f64, big_delta: f64, log_d: f64, p1: f64, p2: f64) -> Result<ContinuityCheck> {
    let delta = continuity_delta(eps, big_delta, log_d)?.min(big_delta);
    let geom = MixingGeometry::new(p1, p2, big_delta, delta, log_d)?;
    let (q1, q2) = colinear_rescale(&geom);
    Ok(ContinuityCheck {
        delta,
        q1,
        q2,
        gap_bound: q1.min(q2) * log_d,
        eps,
    })
}

/// `Q₂` of the qubit erasure channel: `1 − p`.
pub fn erasure_q2(p: f64) -> Result<f64> {
    in_unit("p", p, 1.0)?;
    Ok(1.0 - p)
}

/// Bounds on the back-assisted capacity of the qubit erasure channel:
/// `max(1 − 2p, 0) ≤ Q ≤ Q_B ≤ Q₂ = 1 − p`.
pub fn erasure_qb_bounds(p: f64) -> Result<(f64, f64)> {
    let upper = erasure_q2(p)?;
    Ok(((1.0 - 2.0 * p).max(0.0), upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn simulation_bound_examples() {
        assert_eq!(simulation_upper_bound(0.3, 0.0, 2.0).unwrap(), 0.3);
        assert_eq!(simulation_upper_bound(0.3, 1.0, 2.0).unwrap(), 2.0);
        assert_abs_diff_eq!(simulation_upper_bound(1.0, 0.1, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(matches!(simulation_upper_bound(0.0, 0.1, 1.0), Err(Error::Domain(_))));
        assert!(simulation_upper_bound(0.5, 1.5, 1.0).is_err());
    }

    #[test]
    fn gap_bound_examples() {
        assert_eq!(mutual_gap_bound(1.0, 1.0, 0.3, 0.2, 1.0).unwrap(), 0.0);
        assert_eq!(mutual_gap_bound(0.2, 0.4, 0.0, 0.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            mutual_gap_bound(0.5, 0.7, 0.2, 0.1, 1.0).unwrap(),
            0.03,
            epsilon = 1e-15
        );
        assert!(mutual_gap_bound(1.5, 0.2, 0.1, 0.1, 1.0).is_err());
    }

    #[test]
    fn rescale_examples() {
        let g = MixingGeometry::new(0.4, 0.3, 1.0, 1.0, 1.0).unwrap();
        let (q1, q2) = colinear_rescale(&g);
        assert_eq!(q1, 0.4);
        assert_abs_diff_eq!(q2, 0.3, epsilon = 1e-15);
        let g = MixingGeometry::new(0.4, 0.3, 1.0, 1e-300, 1.0).unwrap();
        let (q1, q2) = colinear_rescale(&g);
        assert!(q1 < 1e-299 && q2 < 1e-299);
        let g = MixingGeometry::new(0.9, 0.5, 2.0, 1.0, 1.0).unwrap();
        let (_, q2) = colinear_rescale(&g);
        assert_abs_diff_eq!(q2, 1.0 / 3.0, epsilon = 1e-15);
        assert!(q2 <= 0.5);
    }

    #[test]
    fn geometry_validation() {
        assert!(MixingGeometry::new(0.2, 0.6, 1.0, 0.5, 1.0).is_err());
        assert!(MixingGeometry::new(0.2, 0.2, 1.0, 1.5, 1.0).is_err());
        assert!(MixingGeometry::new(0.2, 0.2, 0.0, 0.0, 1.0).is_err());
        assert!(MixingGeometry::from_dims(0.2, 0.2, 1.0, 0.5, 1, 4).is_err());
        let g = MixingGeometry::from_dims(0.2, 0.2, 1.0, 0.5, 4, 8).unwrap();
        assert_eq!(g.log_d, 2.0);
    }

    #[test]
    fn delta_examples() {
        assert_abs_diff_eq!(continuity_delta(2.0, 1.0, 1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(continuity_delta(0.01, 0.1, 1.0).unwrap(), 0.0005, epsilon = 1e-18);
        let c = continuity_check(0.01, 0.1, 1.0, 0.5, 0.5).unwrap();
        assert!(c.gap_bound <= c.eps);
        assert!(continuity_delta(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn erasure_examples() {
        assert_eq!(erasure_q2(0.0).unwrap(), 1.0);
        assert_eq!(erasure_q2(1.0).unwrap(), 0.0);
        assert_eq!(erasure_qb_bounds(1.0).unwrap(), (0.0, 0.0));
        assert_eq!(erasure_qb_bounds(0.5).unwrap(), (0.0, 0.5));
        assert!(erasure_q2(1.2).is_err());
    }

    proptest! {
        #[test]
        fn gap_bound_nonnegative_and_symmetric(
            qn in 0.0f64..=1.0, qm in 0.0f64..=1.0, p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0, ld in 1.0f64..4.0,
        ) {
            let (qn, qm) = (qn * ld, qm * ld);
            let g = mutual_gap_bound(qn, qm, p1, p2, ld).unwrap();
            prop_assert!(g >= 0.0);
            prop_assert_eq!(g, mutual_gap_bound(qm, qn, p2, p1, ld).unwrap());
            prop_assert_eq!(mutual_gap_bound(qn, qm, 0.0, p2, ld).unwrap(), 0.0);
        }

        #[test]
        fn rescale_bounds(p1 in 0.0f64..=1.0, p2 in 0.0f64..=0.5, big in 1e-3f64..10.0, frac in 1e-6f64..=1.0) {
            let g = MixingGeometry::new(p1, p2, big, big * frac, 1.0).unwrap();
            let (q1, q2) = colinear_rescale(&g);
            let r = g.delta / g.big_delta;
            prop_assert!(q1 <= p1);
            prop_assert!(q2 <= 2.0 * p2 * r);
        }

        #[test]
        fn composition_within_eps(
            eps in 1e-6f64..4.0, big in 1e-3f64..10.0, ld in 0.5f64..6.0, p1 in 0.0f64..=1.0, p2 in 0.0f64..=0.5,
        ) {
            let c = continuity_check(eps, big, ld, p1, p2).unwrap();
            prop_assert!(c.gap_bound <= eps);
        }

        #[test]
        fn erasure_is_affine_and_ordered(p in 0.0f64..=1.0) {
            let (lo, hi) = erasure_qb_bounds(p).unwrap();
            prop_assert!(lo <= hi);
            prop_assert!((erasure_q2(p).unwrap() - (1.0 - p)).abs() == 0.0);
        }
    }
}
