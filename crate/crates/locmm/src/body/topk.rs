//! Euclidean projection onto a top-k-sum cap
//! `{x : sum of the k largest |x_i| <= tau}`.
//!
//! The cap is the ball of the vector Ky Fan k-norm, which is sign- and
//! permutation-invariant, so the projection keeps the signs and the sorted
//! order of the input. On the sorted magnitude vector the KKT system has a
//! three-block structure: the largest q-1 entries shift down by a common
//! lambda, a tie block [q, r] straddling position k collapses to a common
//! value t, and the tail is untouched. We scan the O(k n) candidate blocks,
//! solve each 2x2 linear system, and keep the feasible solution closest to
//! the input (with a water-filling fallback for the t = 0 boundary case).

/// Sum of the k largest magnitudes.
pub fn top_k_sum(x: &[f64], k: usize) -> f64 {
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    mags.iter().take(k).sum()
}

/// Projects `x` onto `{z : top_k_sum(z, k) <= tau}`, `1 <= k <= x.len()`,
/// `tau >= 0`.
pub fn project_top_k_sum(x: &[f64], k: usize, tau: f64) -> Vec<f64> {
    let n = x.len();
    debug_assert!(k >= 1 && k <= n);
    // Sort magnitudes descending, remembering the permutation.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
    let u: Vec<f64> = order.iter().map(|&i| x[i].abs()).collect();

    let head: f64 = u.iter().take(k).sum();
    if head <= tau {
        return x.to_vec();
    }

    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + u[i];
    }

    let eps = 1e-12;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |z_sorted: Vec<f64>| {
        // Feasibility with a hair of slack, then keep the closest candidate.
        let mut zk: Vec<f64> = z_sorted.clone();
        zk.sort_unstable_by(|a, b| b.total_cmp(a));
        let tks: f64 = zk.iter().take(k).sum();
        if tks > tau + 1e-9 * (1.0 + tau) {
            return;
        }
        let d: f64 = z_sorted
            .iter()
            .zip(u.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
            best = Some((d, z_sorted));
        }
    };

    // Three-block candidates: free head [0, q-2], tie block [q-1, r-1]
    // (1-based [q, r] with q <= k <= r), untouched tail.
    for q in 1..=k {
        for r in k..=n {
            let m1 = (q - 1) as f64;
            let m2 = (r - q + 1) as f64;
            let kappa = (k - q + 1) as f64;
            let w1 = prefix[q - 1];
            let w2 = prefix[r] - prefix[q - 1];
            let denom = m1 * m2 + kappa * kappa;
            let t = (kappa * (tau - w1) + m1 * w2) / denom;
            let lambda = (w2 - m2 * t) / kappa;
            if !(t.is_finite() && lambda.is_finite()) || lambda <= 0.0 || t < -eps {
                continue;
            }
            let t = t.max(0.0);
            // Tie-block shares must lie in [0, lambda]; blocks must stay ordered.
            if u[r - 1] < t - eps || u[q - 1] - t > lambda + eps {
                continue;
            }
            if q >= 2 && u[q - 2] - lambda < t - eps {
                continue;
            }
            if r < n && t < u[r] - eps {
                continue;
            }
            let mut z = u.clone();
            for zi in z.iter_mut().take(q - 1) {
                *zi -= lambda;
            }
            for zi in z.iter_mut().take(r).skip(q - 1) {
                *zi = t;
            }
            consider(z);
        }
    }

    // Boundary case t = 0: fewer than k positive entries remain, and the
    // constraint degenerates to water-filling on the positive part.
    if let Some(lambda) = water_level(&u, tau) {
        let z: Vec<f64> = u.iter().map(|&v| (v - lambda).max(0.0)).collect();
        let positives = z.iter().filter(|v| **v > 0.0).count();
        if positives <= k {
            consider(z);
        }
    }

    let (_, z_sorted) = best.expect("top-k-sum projection: no feasible KKT block");
    let mut out = vec![0.0; n];
    for (slot, &idx) in order.iter().enumerate() {
        out[idx] = x[idx].signum() * z_sorted[slot];
    }
    out
}

/// Water level lambda with sum_i (u_i - lambda)_+ = tau, for u sorted
/// descending. None when tau is at least the total mass.
fn water_level(u: &[f64], tau: f64) -> Option<f64> {
    let total: f64 = u.iter().sum();
    if tau >= total {
        return None;
    }
    let mut cum = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let lambda = (cum - tau) / (i + 1) as f64;
        let next = u.get(i + 1).copied().unwrap_or(0.0);
        if lambda >= next - 1e-15 && lambda <= ui + 1e-15 {
            return Some(lambda.max(0.0));
        }
    }
    Some(((total - tau) / u.len() as f64).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng_from;
    use crate::vector::dist;
    use rand::Rng;

    #[test]
    fn inside_is_identity() {
        let x = [0.5, -0.3, 0.1];
        assert_eq!(project_top_k_sum(&x, 2, 1.0), x.to_vec());
    }

    #[test]
    fn k_equals_n_matches_l1_projection() {
        let x = [2.0, -1.0, 0.5];
        let z = project_top_k_sum(&x, 3, 1.0);
        let l1 = crate::body::l1::project_l1(&x, 1.0);
        assert!(dist(&z, &l1) < 1e-9);
    }

    #[test]
    fn k_equals_one_caps_the_max() {
        let z = project_top_k_sum(&[3.0, 0.2, -0.1], 1, 1.0);
        // Capping the single largest magnitude at tau moves only that entry
        // when the rest are already below tau.
        assert!((z[0] - 1.0).abs() < 1e-9);
        assert!((z[1] - 0.2).abs() < 1e-9 && (z[2] + 0.1).abs() < 1e-9);
    }

    #[test]
    fn tau_zero_collapses_to_origin() {
        let z = project_top_k_sum(&[1.0, -2.0], 1, 0.0);
        assert!(z.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn random_points_beat_sampled_feasible_points() {
        // Optimality oracle: no sampled feasible point may be closer than
        // the returned projection, and the projection itself is feasible.
        let mut rng = rng_from(0xb0b);
        for trial in 0..200 {
            let n = 2 + (trial % 3);
            let k = 1 + (trial % n);
            let tau = 0.5 + rng.gen::<f64>();
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let z = project_top_k_sum(&x, k, tau);
            assert!(top_k_sum(&z, k) <= tau + 1e-8);
            let dz = dist(&x, &z);
            for _ in 0..300 {
                let mut c: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let t = top_k_sum(&c, k);
                if t > tau {
                    // Pull the sample into the cap radially; still feasible.
                    let s = tau / t;
                    c.iter_mut().for_each(|v| *v *= s);
                }
                assert!(
                    dz <= dist(&x, &c) + 1e-7,
                    "sampled feasible point closer than projection"
                );
            }
            // Idempotence.
            let zz = project_top_k_sum(&z, k, tau);
            assert!(dist(&z, &zz) < 1e-9);
        }
    }
}
