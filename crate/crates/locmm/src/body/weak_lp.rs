//! The convex weak-ℓp ball for 1 < p < 2.
//!
//! The underlying quasi-norm max_i i^{1/p} x*_i (x* the decreasing
//! rearrangement of magnitudes) is not convex; the equivalent norm averages
//! first: ||x|| = max_i i^{1/p} x**_i with x**_i = (x*_1 + ... + x*_i)/i.
//! Membership in the unit ball is therefore a family of prefix-sum caps
//! sum_{j<=i} x*_j <= i^{1-1/p}, one top-i-sum constraint per i, and the
//! metric projection is computed by Dykstra's algorithm over those caps.

use crate::body::dykstra::dykstra;
use crate::body::topk::project_top_k_sum;
use crate::error::{Error, Result};

pub fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::invalid(format!(
            "weak-lp exponent must satisfy 1 < p < 2, got {p}"
        )));
    }
    Ok(())
}

/// The convexified weak-ℓp norm max_i i^{1/p} x**_i.
pub fn weak_lp_norm(x: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut best = 0.0_f64;
    for (i, m) in mags.iter().enumerate() {
        cum += m;
        let idx = (i + 1) as f64;
        // i^{1/p} * (prefix mean) = i^{1/p - 1} * prefix sum
        best = best.max(idx.powf(1.0 / p - 1.0) * cum);
    }
    Ok(best)
}

/// Prefix-cap thresholds tau_i = i^{1 - 1/p} for i = 1..=n.
pub fn prefix_caps(n: usize, p: f64) -> Vec<f64> {
    (1..=n)
        .map(|i| (i as f64).powf(1.0 - 1.0 / p))
        .collect()
}

/// Membership at the authoritative boundary tolerance.
pub fn is_member(x: &[f64], p: f64) -> Result<bool> {
    Ok(weak_lp_norm(x, p)? <= 1.0 + 1e-9)
}

/// Metric projection onto the unit ball, via Dykstra over the prefix caps.
pub fn project_weak_lp(x: &[f64], p: f64) -> Result<Vec<f64>> {
    if is_member(x, p)? {
        return Ok(x.to_vec());
    }
    let n = x.len();
    let caps = prefix_caps(n, p);
    let projectors: Vec<Box<dyn Fn(&[f64]) -> Result<Vec<f64>>>> = (0..n)
        .map(|i| {
            let tau = caps[i];
            Box::new(move |z: &[f64]| Ok(project_top_k_sum(z, i + 1, tau)))
                as Box<dyn Fn(&[f64]) -> Result<Vec<f64>>>
        })
        .collect();
    let z = dykstra(x, &projectors, 1e-8, 10_000, "weak-lp ball projection")?;
    Ok(z)
}

/// Exact Euclidean diameter of the unit ball: twice the norm of the
/// prefix-saturating extremal sequence x*_i = i^q - (i-1)^q, q = 1 - 1/p
/// (greedy saturation weakly majorizes every feasible magnitude profile,
/// and the squared norm is Schur-convex).
pub fn diameter(n: usize, p: f64) -> f64 {
    let q = 1.0 - 1.0 / p;
    let mut sum_sq = 0.0;
    for i in 1..=n {
        let step = (i as f64).powf(q) - ((i - 1) as f64).powf(q);
        sum_sq += step * step;
    }
    2.0 * sum_sq.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng_from;
    use rand::Rng;

    #[test]
    fn zero_vector_has_zero_norm() {
        assert_eq!(weak_lp_norm(&[0.0, 0.0, 0.0], 1.5).unwrap(), 0.0);
    }

    #[test]
    fn single_spike_has_unit_norm() {
        // Prefix means are 1/i, so i^{1/p - 1} peaks at i = 1.
        for p in [1.2, 1.5, 1.9] {
            assert!((weak_lp_norm(&[1.0, 0.0, 0.0, 0.0], p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_ones_at_p_four_thirds() {
        // max(1, 2^{3/4}) with prefix sums (1, 2).
        let got = weak_lp_norm(&[1.0, 1.0], 4.0 / 3.0).unwrap();
        assert!((got - 2.0_f64.powf(0.75)).abs() < 1e-12);
        assert!((got - 1.6818).abs() < 1e-4);
    }

    #[test]
    fn rejects_p_out_of_range() {
        assert!(weak_lp_norm(&[1.0], 1.0).is_err());
        assert!(weak_lp_norm(&[1.0], 2.0).is_err());
    }

    #[test]
    fn lp_ball_is_contained() {
        // Points with sum |x|^p <= 1 satisfy the weak norm bound: the power
        // mean inequality gives prefix means <= (prefix p-mean), so the
        // weak-lp ball is the larger set.
        let p = 1.5;
        let mut rng = rng_from(17);
        for _ in 0..500 {
            let n = 4;
            let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lp: f64 = x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
            if lp > 0.0 {
                x.iter_mut().for_each(|v| *v /= lp);
            }
            assert!(weak_lp_norm(&x, p).unwrap() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn projection_lands_in_ball_and_is_idempotent() {
        let p = 1.5;
        let mut rng = rng_from(23);
        for _ in 0..100 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let z = project_weak_lp(&x, p).unwrap();
            assert!(weak_lp_norm(&z, p).unwrap() <= 1.0 + 1e-6);
            let zz = project_weak_lp(&z, p).unwrap();
            assert!(crate::vector::dist(&z, &zz) < 1e-6);
        }
    }

    #[test]
    fn diameter_matches_brute_force_in_2d() {
        // Maximize ||x||^2 over the ball by scanning magnitude profiles
        // (s1, s2) with s1 <= tau_1, s1 + s2' ... i.e. prefix caps.
        let p = 1.5;
        let caps = prefix_caps(2, p);
        let mut best = 0.0_f64;
        let steps = 2000;
        for i in 0..=steps {
            let x1 = caps[0] * i as f64 / steps as f64;
            for j in 0..=steps {
                let x2 = x1 * j as f64 / steps as f64; // keep sorted
                if x1 + x2 <= caps[1] && top_k_sum(&[x1, x2], 1) <= caps[0] {
                    best = best.max(x1 * x1 + x2 * x2);
                }
            }
        }
        assert!((diameter(2, p) - 2.0 * best.sqrt()).abs() < 2e-3);
    }
}
