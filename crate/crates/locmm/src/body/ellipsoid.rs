//! Euclidean projection onto an axis-aligned ellipsoid.
//!
//! For `K = {x : sum_i x_i^2 / a_i <= 1}` the projection of an outside point
//! y has the form `x_i = a_i y_i / (a_i + lambda)` where the multiplier
//! lambda > 0 solves `phi(lambda) = sum_i a_i y_i^2 / (a_i + lambda)^2 = 1`.
//! phi is strictly decreasing, so a safeguarded bisection+Newton iteration
//! converges to full precision.

use crate::error::{Error, Result};

pub fn quad_form(y: &[f64], a: &[f64]) -> f64 {
    y.iter().zip(a.iter()).map(|(v, ai)| v * v / ai).sum()
}

/// Projects `y` onto the ellipsoid with squared semi-axes `a` (all > 0).
pub fn project_ellipsoid(y: &[f64], a: &[f64]) -> Result<Vec<f64>> {
    if quad_form(y, a) <= 1.0 {
        return Ok(y.to_vec());
    }
    let phi = |lambda: f64| -> f64 {
        y.iter()
            .zip(a.iter())
            .map(|(v, ai)| {
                let d = ai + lambda;
                ai * v * v / (d * d)
            })
            .sum::<f64>()
    };
    let dphi = |lambda: f64| -> f64 {
        -2.0 * y
            .iter()
            .zip(a.iter())
            .map(|(v, ai)| {
                let d = ai + lambda;
                ai * v * v / (d * d * d)
            })
            .sum::<f64>()
    };

    let mut lo = 0.0_f64;
    let weighted: f64 = y.iter().zip(a.iter()).map(|(v, ai)| ai * v * v).sum();
    let mut hi = weighted.sqrt() + a.iter().cloned().fold(0.0, f64::max);
    while phi(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lambda = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..200 {
        let f = phi(lambda) - 1.0;
        if f.abs() <= 1e-13 {
            converged = true;
            break;
        }
        if f > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        // Newton step, safeguarded to the current bracket.
        let d = dphi(lambda);
        let newton = lambda - f / d;
        lambda = if d.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (hi - lo) <= 1e-14 * (1.0 + lambda.abs()) {
            converged = true;
            break;
        }
    }
    if !converged && (hi - lo) > 1e-10 * (1.0 + lambda.abs()) {
        return Err(Error::NonConvergence {
            context: "ellipsoid projection multiplier",
            iterations: 200,
            residual: (phi(lambda) - 1.0).abs(),
        });
    }
    Ok(y
        .iter()
        .zip(a.iter())
        .map(|(v, ai)| ai * v / (ai + lambda))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::dist;

    #[test]
    fn inside_is_identity() {
        let y = [0.1, 0.2];
        assert_eq!(project_ellipsoid(&y, &[1.0, 4.0]).unwrap(), y.to_vec());
    }

    #[test]
    fn axis_point_projects_to_vertex() {
        let z = project_ellipsoid(&[5.0, 0.0], &[4.0, 9.0]).unwrap();
        assert!((z[0] - 2.0).abs() < 1e-10 && z[1].abs() < 1e-12);
    }

    #[test]
    fn lands_on_boundary_with_tight_multiplier() {
        let a = [1.0, 4.0, 9.0];
        let z = project_ellipsoid(&[3.0, -2.0, 5.0], &a).unwrap();
        assert!((quad_form(&z, &a) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn beats_dense_boundary_scan() {
        // Independent check: the returned point is at least as close as any
        // point on a dense parametric sweep of the 2-D boundary.
        let a = [4.0, 1.0];
        let y = [3.0, 2.0];
        let z = project_ellipsoid(&y, &a).unwrap();
        let dz = dist(&y, &z);
        for k in 0..20000 {
            let t = 2.0 * std::f64::consts::PI * (k as f64) / 20000.0;
            let b = [2.0 * t.cos(), t.sin()];
            assert!(dz <= dist(&y, &b) + 1e-7);
        }
    }
}
