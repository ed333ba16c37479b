//! Nearest point in the convex hull of a finite vertex set.
//!
//! Pairwise Frank-Wolfe on f(z) = ||z - y||^2 / 2 over conv(V), with exact
//! line search and an active vertex weight set. The iterate is always an
//! explicit convex combination of vertices, so returned points are hull
//! members by construction. Terminates on the Frank-Wolfe duality gap;
//! since f is 1-strongly convex, gap <= g implies ||z - z*||^2 <= 2g.

use crate::error::{Error, Result};
use crate::vector::{dist_sq, dot, sub};

pub struct HullProjection {
    pub point: Vec<f64>,
    pub distance: f64,
}

pub fn project_hull(y: &[f64], vertices: &[Vec<f64>]) -> Result<HullProjection> {
    let n = y.len();
    let m = vertices.len();
    // Start from the nearest vertex (smallest index on ties).
    let mut best = 0;
    let mut best_d = dist_sq(y, &vertices[0]);
    for (i, v) in vertices.iter().enumerate().skip(1) {
        let d = dist_sq(y, v);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    if m == 1 || best_d == 0.0 {
        return Ok(HullProjection {
            point: vertices[best].clone(),
            distance: best_d.sqrt(),
        });
    }

    let mut weights = vec![0.0; m];
    weights[best] = 1.0;
    let mut z = vertices[best].clone();
    let f0 = 0.5 * best_d;
    let gap_tol = 1e-14 * f0.max(1.0);
    let max_iter = (10 * n * m).max(1000);

    for iter in 0..max_iter {
        let grad = sub(&z, y);
        // Frank-Wolfe vertex: minimizes <grad, v>.
        let mut fw = 0;
        let mut fw_val = f64::INFINITY;
        // Away vertex: maximizes <grad, v> over the active set.
        let mut away = usize::MAX;
        let mut away_val = f64::NEG_INFINITY;
        for (i, v) in vertices.iter().enumerate() {
            let g = dot(&grad, v);
            if g < fw_val {
                fw_val = g;
                fw = i;
            }
            if weights[i] > 0.0 && g > away_val {
                away_val = g;
                away = i;
            }
        }
        let gap = dot(&grad, &z) - fw_val;
        if gap <= gap_tol {
            return Ok(HullProjection {
                distance: dist_sq(y, &z).sqrt(),
                point: z,
            });
        }
        // Pairwise step: move mass from the away vertex to the FW vertex.
        let dir: Vec<f64> = vertices[fw]
            .iter()
            .zip(vertices[away].iter())
            .map(|(a, b)| a - b)
            .collect();
        let dir_sq = dot(&dir, &dir);
        if dir_sq == 0.0 {
            return Ok(HullProjection {
                distance: dist_sq(y, &z).sqrt(),
                point: z,
            });
        }
        let step = (-dot(&grad, &dir) / dir_sq).clamp(0.0, weights[away]);
        if step == 0.0 {
            return Ok(HullProjection {
                distance: dist_sq(y, &z).sqrt(),
                point: z,
            });
        }
        weights[fw] += step;
        weights[away] -= step;
        if weights[away] < 1e-18 {
            weights[away] = 0.0;
        }
        if (iter + 1) % 64 == 0 {
            // Resynthesize from weights to cancel drift.
            z = vec![0.0; n];
            for (w, v) in weights.iter().zip(vertices.iter()) {
                if *w > 0.0 {
                    for (zi, vi) in z.iter_mut().zip(v.iter()) {
                        *zi += w * vi;
                    }
                }
            }
        } else {
            for (zi, di) in z.iter_mut().zip(dir.iter()) {
                *zi += step * di;
            }
        }
    }
    let grad = sub(&z, y);
    let fw_val = vertices
        .iter()
        .map(|v| dot(&grad, v))
        .fold(f64::INFINITY, f64::min);
    Err(Error::NonConvergence {
        context: "hull nearest-point",
        iterations: max_iter,
        residual: dot(&grad, &z) - fw_val,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::dist;

    fn tri() -> Vec<Vec<f64>> {
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]
    }

    #[test]
    fn vertex_is_fixed() {
        let p = project_hull(&[1.0, 0.0], &tri()).unwrap();
        assert_eq!(p.point, vec![1.0, 0.0]);
        assert_eq!(p.distance, 0.0);
    }

    #[test]
    fn projects_onto_edge() {
        // Nearest point of the hypotenuse x + y = 1 to (1, 1) is (0.5, 0.5).
        let p = project_hull(&[1.0, 1.0], &tri()).unwrap();
        assert!(dist(&p.point, &[0.5, 0.5]) < 1e-7);
        assert!((p.distance - (0.5_f64).sqrt()).abs() < 1e-7);
    }

    #[test]
    fn interior_point_is_recovered() {
        let p = project_hull(&[0.2, 0.3], &tri()).unwrap();
        assert!(dist(&p.point, &[0.2, 0.3]) < 1e-7);
    }

    #[test]
    fn matches_dense_barycentric_scan() {
        // Independent oracle: brute-force scan over barycentric coordinates.
        let verts = vec![vec![0.0, 0.0], vec![2.0, 0.5], vec![0.5, 2.0]];
        let y = [2.0, 2.0];
        let p = project_hull(&y, &verts).unwrap();
        let mut best = f64::INFINITY;
        let steps = 400;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let (u, v) = (i as f64 / steps as f64, j as f64 / steps as f64);
                let w = 1.0 - u - v;
                let q = [
                    u * verts[0][0] + v * verts[1][0] + w * verts[2][0],
                    u * verts[0][1] + v * verts[1][1] + w * verts[2][1],
                ];
                best = best.min(dist(&y, &q));
            }
        }
        assert!(p.distance <= best + 1e-4);
        assert!((p.distance - best).abs() < 1e-2);
    }
}
