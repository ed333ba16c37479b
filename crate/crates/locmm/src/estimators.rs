//! Estimators for the Gaussian sequence model on a convex body.
//!
//! The production estimator is the finite-depth iterative packing scheme:
//! at level k it packs `B(ν*, d/2^{k-1}) ∩ K` at separation `d/(2^k (C+1))`
//! (with `2(C+1) = c`), moves ν* to the packing point nearest the data
//! (least lexicographic point on ties), and halves the ball. The packing
//! tree is a pure function of the seed and visited centers, never of the
//! data, so the per-level selections form a Cauchy sequence with
//! `||Υ_m − Υ_{m'}|| <= d/2^{m-2}`.
//!
//! The depth is chosen from a known noise lower bound σ̲: the deepest level
//! J at which the level scale still dominates the noise-times-entropy
//! threshold. For unbounded bodies, sample splitting (Ỹ¹ = Y + η,
//! Ỹ² = Y − η with independent η ~ N(0, σ²I)) turns one observation into
//! two independent ones; bounded runs on growing ball intersections produce
//! a candidate list that is aggregated against the second sample.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::body::{Ball, ConvexBody};
use crate::error::{Error, Result};
use crate::packing::{greedy_packing_with_stats, PackingConfig, PackingSet};
use crate::seeding::{mix, rng_from};
use crate::vector::{dist, dist_sq, lex_cmp, Vector};
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub packing: PackingConfig,
    /// Known lower bound on the noise level, if any. Without it the
    /// iterative estimator runs to `max_depth_cap`.
    pub sigma_lower: Option<f64>,
    pub max_depth_cap: usize,
    /// Starting point ν* ∈ K; defaults to the body center (bounded case)
    /// or the projection of the origin (unbounded case).
    pub anchor: Option<Vector>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            packing: PackingConfig::default(),
            sigma_lower: None,
            max_depth_cap: 40,
            anchor: None,
        }
    }
}

impl EstimatorConfig {
    pub fn with_seed(seed: u64) -> Self {
        EstimatorConfig {
            packing: PackingConfig::with_seed(seed),
            ..Default::default()
        }
    }

    /// The level constant C with 2(C+1) = c.
    pub fn level_constant(&self) -> f64 {
        self.packing.c_const / 2.0 - 1.0
    }
}

/// Depth selection result; `capped` is set when the configured cap bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DepthBound {
    pub depth: usize,
    pub capped: bool,
}

/// One level of the estimation trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    pub center: Vector,
    pub radius: f64,
    pub separation: f64,
    pub chosen: Vector,
    pub packing_size: usize,
}

/// The Υ array of per-level selections plus the final estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateTrajectory {
    pub anchor: Vector,
    pub levels: Vec<LevelRecord>,
    pub final_point: Vector,
    /// Effective diameter governing the level radii.
    pub diameter: f64,
    pub depth_capped: bool,
}

impl EstimateTrajectory {
    /// Υ_1 = anchor, Υ_{k+1} = level-k selection.
    pub fn points(&self) -> Vec<&Vector> {
        let mut pts = vec![&self.anchor];
        pts.extend(self.levels.iter().map(|l| &l.chosen));
        pts
    }

    /// Checks the Cauchy property ||Υ_m − Υ_{m'}|| <= d/2^{m-2} for all
    /// m' > m (1-based).
    pub fn contraction_holds(&self) -> bool {
        let pts = self.points();
        for m in 1..=pts.len() {
            for mp in (m + 1)..=pts.len() {
                let bound = self.diameter / 2f64.powi(m as i32 - 2);
                if dist(pts[m - 1], pts[mp - 1]) > bound {
                    return false;
                }
            }
        }
        true
    }
}

/// Largest depth J (capped) such that the level scale
/// ε_J = d(c/2−3)/(2^{J−2} c) still satisfies
/// ε_J²/σ̲² > 16·max(log M_loc(d/2^{J−2}), log 2).
pub fn depth_bound(body: &ConvexBody, sigma_lower: f64, cfg: &EstimatorConfig) -> Result<DepthBound> {
    cfg.packing.validate()?;
    if !body.bounded() {
        return Err(Error::invalid("depth bound requires a bounded body"));
    }
    if !(sigma_lower > 0.0) {
        return Err(Error::invalid("sigma_lower must be > 0"));
    }
    let c = cfg.packing.c_const;
    let d = body.diameter();
    let mut best: Option<usize> = None;
    let mut misses = 0;
    for j in 1..=cfg.max_depth_cap {
        let scale = d / 2f64.powi(j as i32 - 2);
        let eps_j = scale * (c / 2.0 - 3.0) / c;
        let log_m = crate::entropy::local_entropy(body, scale, &cfg.packing)?.log_count;
        let threshold = 16.0 * log_m.max(std::f64::consts::LN_2);
        if eps_j * eps_j / (sigma_lower * sigma_lower) > threshold {
            best = Some(j);
            misses = 0;
        } else {
            // The condition is monotone in J up to sampling noise; stop
            // after two consecutive failures.
            misses += 1;
            if misses >= 2 {
                break;
            }
        }
    }
    let depth = best.unwrap_or(1);
    Ok(DepthBound {
        depth,
        capped: depth == cfg.max_depth_cap,
    })
}

/// Key for memoizing packing sets inside a session: exact center bits plus
/// the level and an id for the enclosing ball constraint.
type PackKey = (u64, usize, Vec<u64>);

/// Reusable estimation context: packings are pure functions of
/// (seed, center, level), so across repeated calls with different data the
/// visited packing tree is shared.
pub struct EstimatorSession<'a> {
    body: &'a ConvexBody,
    cfg: &'a EstimatorConfig,
    cache: Mutex<HashMap<PackKey, Arc<PackingSet>>>,
}

impl<'a> EstimatorSession<'a> {
    pub fn new(body: &'a ConvexBody, cfg: &'a EstimatorConfig) -> Self {
        EstimatorSession {
            body,
            cfg,
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn packing_at(
        &self,
        ball_id: u64,
        extra_balls: &[Ball],
        level: usize,
        center: &[f64],
        radius: f64,
        separation: f64,
    ) -> Result<Arc<PackingSet>> {
        let key: PackKey = (
            ball_id,
            level,
            center.iter().map(|v| v.to_bits()).collect(),
        );
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let (set, _) = greedy_packing_with_stats(
            self.body,
            extra_balls,
            center,
            radius,
            separation,
            &self.cfg.packing,
        )?;
        let arc = Arc::new(set);
        self.cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| arc.clone());
        Ok(arc)
    }

    /// Runs the iterative scheme for `depth` levels on the body
    /// (optionally intersected with one extra ball), tracking `y`.
    pub(crate) fn run(
        &self,
        extra_ball: Option<&Ball>,
        anchor: &[f64],
        diameter: f64,
        y: &[f64],
        depth: usize,
        depth_capped: bool,
    ) -> Result<EstimateTrajectory> {
        if depth == 0 {
            return Err(Error::invalid("depth must be >= 1"));
        }
        let c = self.cfg.packing.c_const;
        let extra: Vec<Ball> = extra_ball.iter().map(|b| (*b).clone()).collect();
        let ball_id = extra_ball.map_or(0, |b| {
            mix(b.radius.to_bits(), &[crate::seeding::hash_point(&b.center)])
        });
        let mut nu = anchor.to_vec();
        let mut levels = Vec::with_capacity(depth);
        for k in 1..=depth {
            let radius = diameter / 2f64.powi(k as i32 - 1);
            // d / (2^k (C+1)) with 2(C+1) = c.
            let separation = diameter / (2f64.powi(k as i32 - 1) * c);
            let packing = self.packing_at(ball_id, &extra, k, &nu, radius, separation)?;
            let chosen = nearest_lex(&packing.points, y);
            levels.push(LevelRecord {
                level: k,
                center: nu.clone(),
                radius,
                separation,
                chosen: chosen.clone(),
                packing_size: packing.points.len(),
            });
            nu = chosen;
        }
        Ok(EstimateTrajectory {
            anchor: anchor.to_vec(),
            levels,
            final_point: nu,
            diameter,
            depth_capped,
        })
    }

    pub fn estimate(&self, y: &[f64], depth: usize) -> Result<EstimateTrajectory> {
        if !self.body.bounded() {
            return Err(Error::invalid(
                "iterative estimation requires a bounded body",
            ));
        }
        let anchor = match &self.cfg.anchor {
            Some(a) => a.clone(),
            None => self.body.center(),
        };
        let capped = depth >= self.cfg.max_depth_cap;
        self.run(None, &anchor, self.body.diameter(), y, depth, capped)
    }
}

/// Nearest point with least-lexicographic tie-breaking. Points are sorted
/// lexicographically, so a strict improvement scan keeps the least element
/// among ties.
fn nearest_lex(points: &[Vector], y: &[f64]) -> Vector {
    debug_assert!(!points.is_empty());
    debug_assert!(points.windows(2).all(|w| lex_cmp(&w[0], &w[1]) != std::cmp::Ordering::Greater));
    let mut best = &points[0];
    let mut best_d = dist_sq(&points[0], y);
    for p in &points[1..] {
        let d = dist_sq(p, y);
        if d < best_d {
            best_d = d;
            best = p;
        }
    }
    best.clone()
}

/// Finite-depth iterative packing estimator on a bounded body.
pub fn iterative_estimate(
    body: &ConvexBody,
    y: &[f64],
    depth: usize,
    cfg: &EstimatorConfig,
) -> Result<EstimateTrajectory> {
    let session = EstimatorSession::new(body, cfg);
    session.estimate(y, depth)
}

/// Constrained least-squares estimator: the projection of the data onto K.
pub fn lse(body: &ConvexBody, y: &[f64]) -> Result<Vector> {
    body.project(y)
}

/// Truncated projection baseline for axis-aligned ellipsoids: keep the k
/// largest-axis coordinates, where k minimizes kσ² + d_k², d_k² = a_{n-k}
/// (a_0 = 0), then project back onto the ellipsoid.
pub fn projection_estimate(body: &ConvexBody, y: &[f64], sigma: f64) -> Result<Vector> {
    let a = match body.descriptor() {
        crate::body::BodyDescriptor::Ellipsoid { a } => a.clone(),
        _ => {
            return Err(Error::invalid(
                "projection estimator requires an ellipsoid body",
            ))
        }
    };
    crate::vector::check_dimension(a.len(), y)?;
    if !(sigma >= 0.0) {
        return Err(Error::invalid("sigma must be >= 0"));
    }
    let n = a.len();
    let width_sq = |k: usize| -> f64 {
        if k == n {
            0.0
        } else {
            a[n - k - 1]
        }
    };
    let mut best_k = 0usize;
    let mut best_obj = width_sq(0);
    for k in 1..=n {
        let obj = k as f64 * sigma * sigma + width_sq(k);
        if obj < best_obj {
            best_obj = obj;
            best_k = k;
        }
    }
    let mut truncated = y.to_vec();
    for v in truncated.iter_mut().take(n - best_k) {
        *v = 0.0;
    }
    body.project(&truncated)
}

/// The likelihood-ratio indicator for testing ν1 against ν2:
/// returns true iff ||y − ν1|| >= ||y − ν2|| (ties decide for ν2).
pub fn two_point_test(y: &[f64], nu1: &[f64], nu2: &[f64]) -> Result<bool> {
    crate::vector::check_dimension(y.len(), nu1)?;
    crate::vector::check_dimension(y.len(), nu2)?;
    Ok(dist_sq(y, nu1) >= dist_sq(y, nu2))
}

/// A sample split into two independent observations: y1 = y + η and
/// y2 = y − η with η ~ N(0, σ²I). The identity y1 + y2 = 2y holds exactly
/// in floating point, enforced componentwise.
#[derive(Debug, Clone, Serialize)]
pub struct SplitSample {
    pub y1: Vector,
    pub y2: Vector,
    pub eta_seed: u64,
}

impl SplitSample {
    pub fn draw(y: &[f64], sigma: f64, eta_seed: u64) -> Self {
        let mut rng = rng_from(eta_seed);
        let mut y1 = Vec::with_capacity(y.len());
        let mut y2 = Vec::with_capacity(y.len());
        for &yi in y {
            let eta_i: f64 = {
                let g: f64 = StandardNormal.sample(&mut rng);
                sigma * g
            };
            let (a, b) = split_exact(yi, eta_i);
            y1.push(a);
            y2.push(b);
        }
        SplitSample { y1, y2, eta_seed }
    }
}

/// Splits y into (y + η, y − η) such that the two parts sum to 2y exactly
/// in f64 arithmetic. A couple of re-rounding passes reach a fixed point;
/// in the (never observed) pathological case the noise component is
/// dropped, which keeps the identity trivially.
fn split_exact(y: f64, eta: f64) -> (f64, f64) {
    let target = 2.0 * y;
    let mut a = y + eta;
    let mut b = target - a;
    for _ in 0..4 {
        if a + b == target {
            return (a, b);
        }
        a = target - b;
        if a + b == target {
            return (a, b);
        }
        b = target - a;
    }
    (y, y)
}

/// Iterative estimator for possibly unbounded closed bodies with known σ.
///
/// Splits the sample, runs the bounded scheme on `B(ν, 2^m) ∩ K` against
/// y1 for m = 1..M (ν the projected origin by default, M large enough that
/// the ball encloses the projection of y1 with margin), then aggregates the
/// resulting candidate list ℰ against y2 with level separations
/// `d/(2^{k+1}(C̃+1))`, `C̃ = c/4 − 1`, breaking ties by the smallest index
/// in ℰ.
pub fn unbounded_estimate(
    body: &ConvexBody,
    y: &[f64],
    sigma: f64,
    cfg: &EstimatorConfig,
) -> Result<EstimateTrajectory> {
    let session = EstimatorSession::new(body, cfg);
    unbounded_estimate_in_session(&session, y, sigma, mix(cfg.packing.seed, &[0x657461]))
}

pub(crate) fn unbounded_estimate_in_session(
    session: &EstimatorSession<'_>,
    y: &[f64],
    sigma: f64,
    eta_seed: u64,
) -> Result<EstimateTrajectory> {
    let body = session.body;
    let cfg = session.cfg;
    crate::vector::check_dimension(body.dimension(), y)?;
    if !(sigma >= 0.0) {
        return Err(Error::invalid("sigma must be >= 0"));
    }
    const BALL_CAP: u32 = 30;
    let split = SplitSample::draw(y, sigma, eta_seed);
    let anchor = match &cfg.anchor {
        Some(a) => a.clone(),
        None => body.project(&vec![0.0; body.dimension()])?,
    };
    let p1 = body.project(&split.y1)?;
    let reach = dist(&p1, &anchor);
    let needed = (reach + 1.0).log2().ceil().max(1.0);
    if needed > BALL_CAP as f64 {
        return Err(Error::BallCapExceeded {
            cap: BALL_CAP,
            needed: reach,
        });
    }
    let m_max = ((needed as u32) + 2).clamp(3, BALL_CAP);

    let c = cfg.packing.c_const;
    let mut candidates: Vec<Vector> = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        let ball = Ball {
            center: anchor.clone(),
            radius: 2f64.powi(m as i32),
        };
        let d_m = (2.0 * ball.radius).min(body.diameter());
        // Depth from the noise floor alone: deepest J with
        // ε_J² > 32 log 2 · σ² at noise level √2·σ (y1 carries 2σ²).
        let depth = analytic_depth(d_m, c, sigma, cfg.max_depth_cap);
        let run = session.run(Some(&ball), &anchor, d_m, &split.y1, depth, false)?;
        candidates.push(run.final_point);
    }

    // Aggregate ℰ against the second sample.
    let mut d_emp = 0.0_f64;
    for (i, a) in candidates.iter().enumerate() {
        for b in candidates.iter().skip(i + 1) {
            d_emp = d_emp.max(dist(a, b));
        }
    }
    let anchor_agg = candidates[0].clone();
    if d_emp == 0.0 {
        return Ok(EstimateTrajectory {
            final_point: anchor_agg.clone(),
            anchor: anchor_agg,
            levels: Vec::new(),
            diameter: 0.0,
            depth_capped: false,
        });
    }
    let tilde_c = c / 4.0 - 1.0;
    let mut nu = anchor_agg.clone();
    let mut levels = Vec::new();
    for k in 1..=100usize {
        let radius = d_emp / 2f64.powi(k as i32 - 1);
        let separation = d_emp / (2f64.powi(k as i32 + 1) * (tilde_c + 1.0));
        // Greedy min-index packing of the candidate list inside the ball.
        let mut pack_idx: Vec<usize> = Vec::new();
        for (i, cand) in candidates.iter().enumerate() {
            if dist(cand, &nu) <= radius
                && pack_idx
                    .iter()
                    .all(|&j| dist(cand, &candidates[j]) >= separation)
            {
                pack_idx.push(i);
            }
        }
        // Nearest to y2, smallest index on ties: scan ascending with
        // strict improvement.
        let mut best = pack_idx[0];
        let mut best_d = dist_sq(&candidates[best], &split.y2);
        for &i in &pack_idx[1..] {
            let d = dist_sq(&candidates[i], &split.y2);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        let chosen = candidates[best].clone();
        let done = pack_idx.len() == 1 && chosen == nu;
        levels.push(LevelRecord {
            level: k,
            center: nu.clone(),
            radius,
            separation,
            chosen: chosen.clone(),
            packing_size: pack_idx.len(),
        });
        nu = chosen;
        if done {
            break;
        }
    }
    Ok(EstimateTrajectory {
        anchor: anchor_agg,
        levels,
        final_point: nu,
        diameter: d_emp,
        depth_capped: false,
    })
}

/// Depth from the noise floor alone: largest J with
/// (d(c/2−3)/(2^{J−2}c))² > 32 log 2 σ², clamped to [1, cap]. With σ = 0
/// the cap is used.
fn analytic_depth(d: f64, c: f64, sigma: f64, cap: usize) -> usize {
    if sigma <= 0.0 {
        return cap;
    }
    let lead = 4.0 * d * (c / 2.0 - 3.0) / c; // ε_J = lead / 2^J
    let floor = sigma * (32.0 * std::f64::consts::LN_2).sqrt();
    if lead <= floor * 2.0 {
        return 1;
    }
    let j = (lead / floor).log2().floor() as usize;
    j.clamp(1, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::BodyDescriptor;

    fn segment() -> ConvexBody {
        ConvexBody::new(BodyDescriptor::Hyperrectangle { a: vec![2.0] }).unwrap()
    }

    fn cone2() -> ConvexBody {
        ConvexBody::new(BodyDescriptor::MonotoneCone { n: 2 }).unwrap()
    }

    fn cfg(seed: u64) -> EstimatorConfig {
        EstimatorConfig::with_seed(seed)
    }

    #[test]
    fn depth_bound_on_segment_small_sigma() {
        let db = depth_bound(&segment(), 1e-3, &cfg(3)).unwrap();
        assert!(
            (5..=12).contains(&db.depth),
            "depth {} outside expected bracket",
            db.depth
        );
        assert!(!db.capped);
    }

    #[test]
    fn halving_sigma_deepens_by_at_least_one() {
        let d1 = depth_bound(&segment(), 1e-3, &cfg(3)).unwrap().depth;
        let d2 = depth_bound(&segment(), 5e-4, &cfg(3)).unwrap().depth;
        assert!(d2 >= d1 + 1, "depths {d1} vs {d2}");
    }

    #[test]
    fn huge_sigma_gives_depth_one() {
        let db = depth_bound(&segment(), 10.0, &cfg(3)).unwrap();
        assert_eq!(db.depth, 1);
    }

    #[test]
    fn depth_one_selects_from_single_packing() {
        let body = segment();
        let c = cfg(7);
        let traj = iterative_estimate(&body, &[0.3], 1, &c).unwrap();
        assert_eq!(traj.levels.len(), 1);
        let level = &traj.levels[0];
        let manual = level
            .packing_size
            .min(level.packing_size);
        assert!(manual >= 1);
        // Final point is the nearest packing point to y in the level-1
        // packing of K itself.
        assert_eq!(traj.final_point, level.chosen);
        assert!((level.radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn far_observation_contracts_to_boundary() {
        // y = 5 outside [-1, 1]: the iterates track the projection 1.0 and
        // land within d/2^8 of it at depth 10.
        let traj = iterative_estimate(&segment(), &[5.0], 10, &cfg(1)).unwrap();
        assert!(
            (traj.final_point[0] - 1.0).abs() <= 2.0 / 256.0,
            "final {}",
            traj.final_point[0]
        );
        assert!(traj.contraction_holds());
    }

    #[test]
    fn noiseless_member_recovery() {
        let body = segment();
        let c = cfg(5);
        let db = depth_bound(&body, 1e-2, &c).unwrap();
        let y = [0.371];
        let traj = iterative_estimate(&body, &y, db.depth, &c).unwrap();
        let tol = 2.0 / 2f64.powi(db.depth as i32 - 2);
        assert!((traj.final_point[0] - y[0]).abs() <= tol);
    }

    #[test]
    fn packings_ignore_data() {
        let body = segment();
        let c = cfg(9);
        let t1 = iterative_estimate(&body, &[0.9], 4, &c).unwrap();
        let t2 = iterative_estimate(&body, &[-0.9], 4, &c).unwrap();
        // Level-1 packings share the anchor center, so identical seeds give
        // identical level-1 packing sizes regardless of y.
        assert_eq!(t1.levels[0].packing_size, t2.levels[0].packing_size);
        assert_eq!(t1.levels[0].center, t2.levels[0].center);
    }

    #[test]
    fn lse_examples() {
        let body = segment();
        assert_eq!(lse(&body, &[5.0]).unwrap(), vec![1.0]);
        assert_eq!(lse(&body, &[0.4]).unwrap(), vec![0.4]);
        let l1 = ConvexBody::new(BodyDescriptor::L1Ball { radius: 1.0, n: 2 }).unwrap();
        let z = lse(&l1, &[1.0, 1.0]).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-12 && (z[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn projection_estimate_hand_enumeration() {
        // a = (1, 4, 9)σ²: objectives 9, 5, 3, 3 → k = 2 on the tie.
        let sigma = 0.7;
        let s2 = sigma * sigma;
        let body = ConvexBody::new(BodyDescriptor::Ellipsoid {
            a: vec![s2, 4.0 * s2, 9.0 * s2],
        })
        .unwrap();
        let y = [1.0, 1.0, 1.0];
        let est = projection_estimate(&body, &y, sigma).unwrap();
        // First coordinate zeroed, rest projected.
        assert_eq!(est[0], 0.0);
        assert!(body.contains(&est, 1e-9).unwrap());
    }

    #[test]
    fn projection_estimate_sigma_zero_keeps_everything() {
        let body = ConvexBody::new(BodyDescriptor::Ellipsoid { a: vec![1.0, 4.0] }).unwrap();
        let y = [0.1, 0.2];
        assert_eq!(projection_estimate(&body, &y, 0.0).unwrap(), y.to_vec());
    }

    #[test]
    fn projection_estimate_huge_sigma_collapses_to_zero() {
        let body = ConvexBody::new(BodyDescriptor::Ellipsoid { a: vec![0.1, 0.2] }).unwrap();
        let est = projection_estimate(&body, &[0.3, -0.2], 10.0).unwrap();
        assert!(est.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn two_point_test_tie_breaks_toward_alternative() {
        let nu1 = [0.0, 0.0];
        let nu2 = [1.0, 0.0];
        assert!(!two_point_test(&[0.0, 0.0], &nu1, &nu2).unwrap());
        assert!(two_point_test(&[0.5, 3.0], &nu1, &nu2).unwrap());
        assert!(two_point_test(&[1.0, 0.0], &nu1, &nu2).unwrap());
    }

    #[test]
    fn split_sample_sums_exactly() {
        let y = vec![0.013, -7.25, 1e-9, 0.0, 123.456];
        for seed in 0..200 {
            let s = SplitSample::draw(&y, 3.0, seed);
            for i in 0..y.len() {
                assert_eq!(s.y1[i] + s.y2[i], 2.0 * y[i], "component {i} seed {seed}");
            }
        }
    }

    #[test]
    fn unbounded_near_zero_noise_returns_data() {
        let body = cone2();
        let y = [0.2, 0.4]; // member
        let traj = unbounded_estimate(&body, &y, 1e-9, &cfg(3)).unwrap();
        assert!(dist(&traj.final_point, &y) < 1e-2, "{:?}", traj.final_point);
    }

    #[test]
    fn unbounded_cone_tracks_isotonic_projection() {
        let body = cone2();
        let traj = unbounded_estimate(&body, &[1.0, 0.0], 0.05, &cfg(11)).unwrap();
        // The projection of (1, 0) is (0.5, 0.5); with small noise the
        // estimate must land nearby.
        assert!(
            dist(&traj.final_point, &[0.5, 0.5]) < 0.2,
            "{:?}",
            traj.final_point
        );
        assert!(traj.contraction_holds());
    }

    #[test]
    fn trajectory_membership() {
        let traj = iterative_estimate(&segment(), &[0.7], 6, &cfg(21)).unwrap();
        for p in traj.points() {
            assert!(segment().contains(p, 1e-6).unwrap());
        }
    }
}
