//! Packing sets that double as coverings.
//!
//! A packing of `B(center, radius) ∩ K` at separation δ is built greedily:
//! quasi-random candidates in the bounding box of the ball are mapped into
//! the localized set by projection and accepted when they keep all pairwise
//! distances at least δ. Construction stops after `stall_limit` consecutive
//! rejections (the set is then a covering of the localized set up to the
//! sampling resolution) or when the candidate budget runs out.
//!
//! Construction is a deterministic pure function of
//! (descriptor, center, radius, separation, seed) and never sees observed
//! data. Candidate offsets are drawn scale-free — the stream depends on the
//! seed and the center only — so packings of geometrically similar localized
//! sets at different scales are exact rescalings of each other.

use serde::{Deserialize, Serialize};

use crate::body::{Ball, ConvexBody};
use crate::error::{Error, Result};
use crate::seeding::{hash_point, mix, rng_from};
use crate::vector::{dist, lex_cmp, Vector};
use rand::Rng;

/// Tuning for packing construction and entropy estimation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PackingConfig {
    /// Localization constant c: packings at separation ε/c inside radius-ε
    /// balls. Must be at least 8.
    pub c_const: f64,
    /// Candidate draws per packing.
    pub candidate_budget: usize,
    /// Consecutive rejections before the packing is declared maximal.
    pub stall_limit: usize,
    /// Number of centers swept when estimating the localized entropy sup.
    pub center_candidates: usize,
    /// Master seed for all candidate streams.
    pub seed: u64,
}

impl Default for PackingConfig {
    fn default() -> Self {
        PackingConfig {
            c_const: 16.0,
            candidate_budget: 4000,
            stall_limit: 500,
            center_candidates: 32,
            seed: 0,
        }
    }
}

impl PackingConfig {
    pub fn with_seed(seed: u64) -> Self {
        PackingConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_const >= 8.0) {
            return Err(Error::invalid("c_const must be >= 8"));
        }
        if self.candidate_budget == 0 || self.stall_limit == 0 || self.center_candidates == 0 {
            return Err(Error::invalid("packing budgets must be positive"));
        }
        Ok(())
    }
}

/// One constructed packing: points pairwise >= `separation` apart inside
/// `B(center, radius) ∩ K` (membership within 1e-6), sorted
/// lexicographically.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PackingSet {
    pub center: Vector,
    pub radius: f64,
    pub separation: f64,
    pub points: Vec<Vector>,
    /// Fraction of certification probes covered; 0.0 until certified.
    pub certified_cover_fraction: f64,
}

/// Side-channel facts about a construction run.
#[derive(Debug, Clone, Copy)]
pub struct PackingStats {
    pub candidates_used: usize,
    /// True when the run ended by exhausting the candidate budget rather
    /// than by stalling.
    pub budget_exhausted: bool,
}

/// Low-discrepancy offsets in [0,1)^n: an additive Kronecker sequence with
/// the generalized golden ratio, shifted by a seeded random origin.
pub(crate) struct CandidateStream {
    alpha: Vec<f64>,
    state: Vec<f64>,
}

impl CandidateStream {
    pub fn new(dim: usize, seed: u64) -> Self {
        // phi_d is the unique positive root of x^(d+1) = x + 1.
        let d = dim as f64;
        let mut phi = 1.5_f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (d + 1.0));
        }
        let alpha: Vec<f64> = (1..=dim)
            .map(|j| (1.0 / phi.powi(j as i32)).fract())
            .collect();
        let mut rng = rng_from(seed);
        let state: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        CandidateStream { alpha, state }
    }

    /// Next point of [0,1)^n.
    pub fn next_point(&mut self) -> Vec<f64> {
        for (s, a) in self.state.iter_mut().zip(self.alpha.iter()) {
            *s = (*s + *a).fract();
        }
        self.state.clone()
    }
}

/// Greedy maximal packing of `B(center, radius) ∩ K` at separation δ.
pub fn greedy_packing(
    body: &ConvexBody,
    center: &[f64],
    radius: f64,
    separation: f64,
    cfg: &PackingConfig,
) -> Result<PackingSet> {
    let (set, _) = greedy_packing_with_stats(body, &[], center, radius, separation, cfg)?;
    Ok(set)
}

/// As [`greedy_packing`], additionally reporting construction stats and
/// honoring extra ball constraints (used by the unbounded estimator, which
/// packs `B(ν*, r) ∩ B(anchor, 2^m) ∩ K`).
pub fn greedy_packing_with_stats(
    body: &ConvexBody,
    extra_balls: &[Ball],
    center: &[f64],
    radius: f64,
    separation: f64,
    cfg: &PackingConfig,
) -> Result<(PackingSet, PackingStats)> {
    cfg.validate()?;
    if !(radius > 0.0) || !(separation > 0.0) {
        return Err(Error::invalid("radius and separation must be positive"));
    }
    if separation > 2.0 * radius {
        return Err(Error::invalid("separation must be at most 2 * radius"));
    }
    if !body.contains(center, 1e-6)? {
        return Err(Error::invalid("packing center is not a member of the body"));
    }
    for b in extra_balls {
        if b.distance(center) > 1e-6 {
            return Err(Error::invalid(
                "packing center violates an extra ball constraint",
            ));
        }
    }

    let n = body.dimension();
    let primary = Ball {
        center: center.to_vec(),
        radius,
    };
    let mut all_balls: Vec<Ball> = vec![primary.clone()];
    all_balls.extend(extra_balls.iter().cloned());

    // The center itself is always the first accepted point.
    let mut accepted: Vec<Vector> = vec![center.to_vec()];
    let mut stream = CandidateStream::new(n, mix(cfg.seed, &[hash_point(center)]));
    let mut rejects = 0usize;
    let mut used = 0usize;
    while used < cfg.candidate_budget && rejects < cfg.stall_limit {
        let u = stream.next_point();
        used += 1;
        let raw: Vector = center
            .iter()
            .zip(u.iter())
            .map(|(c, ui)| c + radius * (2.0 * ui - 1.0))
            .collect();
        let mut p = body.project_constrained(&all_balls, &raw)?;
        // Pull exactly into the primary ball; the chord toward the member
        // center keeps body membership within tolerance.
        let d0 = dist(&p, center);
        if d0 > radius {
            let s = radius / d0;
            for (pi, ci) in p.iter_mut().zip(center.iter()) {
                *pi = ci + s * (*pi - ci);
            }
        }
        let ok = accepted.iter().all(|q| dist(q, &p) >= separation);
        if ok {
            accepted.push(p);
            rejects = 0;
        } else {
            rejects += 1;
        }
    }
    let budget_exhausted = used >= cfg.candidate_budget && rejects < cfg.stall_limit;
    accepted.sort_by(|a, b| lex_cmp(a, b));
    Ok((
        PackingSet {
            center: center.to_vec(),
            radius,
            separation,
            points: accepted,
            certified_cover_fraction: 0.0,
        },
        PackingStats {
            candidates_used: used,
            budget_exhausted,
        },
    ))
}

/// Exact check of the packing invariants: pairwise separation within 1e-9
/// and membership in `B(center, radius) ∩ K` within 1e-6.
pub fn verify_packing(body: &ConvexBody, ps: &PackingSet) -> bool {
    for (i, p) in ps.points.iter().enumerate() {
        if dist(p, &ps.center) > ps.radius + 1e-6 {
            return false;
        }
        match body.contains(p, 1e-6) {
            Ok(true) => {}
            _ => return false,
        }
        for q in ps.points.iter().skip(i + 1) {
            if dist(p, q) < ps.separation - 1e-9 {
                return false;
            }
        }
    }
    true
}

/// Certifies the covering property: draws probes from
/// `B(center, radius) ∩ K` by projection sampling and returns the fraction
/// lying within `separation` of some packing point. A maximal packing is a
/// covering at its separation, so the fraction should be 1.0.
pub fn certify_covering(
    body: &ConvexBody,
    ps: &PackingSet,
    probe_count: usize,
    seed: u64,
) -> Result<f64> {
    if probe_count == 0 {
        return Err(Error::invalid("probe_count must be >= 1"));
    }
    let n = body.dimension();
    let ball = Ball {
        center: ps.center.clone(),
        radius: ps.radius,
    };
    let mut rng = rng_from(mix(seed, &[hash_point(&ps.center), 0x70726f62]));
    let mut covered = 0usize;
    let mut landed = 0usize;
    let mut failed = 0usize;
    for _ in 0..probe_count {
        let raw: Vector = ps
            .center
            .iter()
            .map(|c| c + ps.radius * rng.gen_range(-1.0..1.0))
            .collect();
        debug_assert_eq!(raw.len(), n);
        match body.project_constrained(std::slice::from_ref(&ball), &raw) {
            Ok(p) => {
                landed += 1;
                if ps.points.iter().any(|q| dist(q, &p) <= ps.separation) {
                    covered += 1;
                }
            }
            Err(_) => failed += 1,
        }
    }
    if landed == 0 || (failed as f64) / (probe_count as f64) > 0.9999 {
        return Err(Error::SamplerFailure(format!(
            "projection sampling failed for {failed}/{probe_count} probes"
        )));
    }
    Ok(covered as f64 / landed as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::BodyDescriptor;

    fn segment() -> ConvexBody {
        ConvexBody::new(BodyDescriptor::Hyperrectangle { a: vec![2.0] }).unwrap()
    }

    fn square() -> ConvexBody {
        ConvexBody::new(BodyDescriptor::Hyperrectangle { a: vec![2.0, 2.0] }).unwrap()
    }

    #[test]
    fn segment_packing_cardinality_matches_1d_counting() {
        // On [-1, 1] at separation 0.5 a maximal packing has between 3
        // points ({-0.75, 0, 0.75} is maximal) and 5 ({-1,-0.5,0,0.5,1}).
        let cfg = PackingConfig::with_seed(11);
        let ps = greedy_packing(&segment(), &[0.0], 1.0, 0.5, &cfg).unwrap();
        assert!(
            (3..=5).contains(&ps.points.len()),
            "got {}",
            ps.points.len()
        );
        assert!(verify_packing(&segment(), &ps));
    }

    #[test]
    fn oversized_separation_keeps_only_center() {
        let cfg = PackingConfig::with_seed(1);
        let ps = greedy_packing(&segment(), &[0.25], 0.1, 0.2, &cfg).unwrap();
        assert_eq!(ps.points.len(), 1);
        assert_eq!(ps.points[0], vec![0.25]);
    }

    #[test]
    fn wide_separation_on_square_fits_at_most_two() {
        // Three points pairwise >= 2.9 apart cannot fit in a square of
        // diagonal 2*sqrt(2); brute-force grid check in the entropy tests.
        let cfg = PackingConfig::with_seed(5);
        let ps = greedy_packing(&square(), &[0.0, 0.0], 10.0, 2.9, &cfg).unwrap();
        assert!(ps.points.len() <= 2, "got {}", ps.points.len());
    }

    #[test]
    fn construction_is_bit_deterministic() {
        let cfg = PackingConfig::with_seed(99);
        let a = greedy_packing(&square(), &[0.1, -0.2], 0.7, 0.1, &cfg).unwrap();
        let b = greedy_packing(&square(), &[0.1, -0.2], 0.7, 0.1, &cfg).unwrap();
        assert_eq!(a.points, b.points);
        let other = greedy_packing(&square(), &[0.1, -0.2], 0.7, 0.1, &PackingConfig::with_seed(100))
            .unwrap();
        assert_ne!(a.points, other.points);
    }

    #[test]
    fn points_are_sorted_lexicographically() {
        let cfg = PackingConfig::with_seed(2);
        let ps = greedy_packing(&square(), &[0.0, 0.0], 1.0, 0.3, &cfg).unwrap();
        for w in ps.points.windows(2) {
            assert_ne!(lex_cmp(&w[0], &w[1]), std::cmp::Ordering::Greater);
        }
    }

    #[test]
    fn verify_rejects_separation_violation() {
        let ps = PackingSet {
            center: vec![0.0],
            radius: 1.0,
            separation: 0.5,
            points: vec![vec![0.0], vec![0.4]],
            certified_cover_fraction: 0.0,
        };
        assert!(!verify_packing(&segment(), &ps));
    }

    #[test]
    fn verify_accepts_singleton() {
        let ps = PackingSet {
            center: vec![0.0],
            radius: 1.0,
            separation: 0.5,
            points: vec![vec![0.0]],
            certified_cover_fraction: 0.0,
        };
        assert!(verify_packing(&segment(), &ps));
    }

    #[test]
    fn greedy_packing_certifies_as_covering() {
        let cfg = PackingConfig::with_seed(3);
        let ps = greedy_packing(&segment(), &[0.0], 1.0, 0.25, &cfg).unwrap();
        let frac = certify_covering(&segment(), &ps, 2000, 77).unwrap();
        assert!(frac >= 0.999, "cover fraction {frac}");
    }

    #[test]
    fn sparse_set_fails_certification() {
        // A single off-center point at separation 0.5 leaves most of
        // [-1, 1] uncovered.
        let ps = PackingSet {
            center: vec![0.0],
            radius: 1.0,
            separation: 0.5,
            points: vec![vec![-0.75]],
            certified_cover_fraction: 0.0,
        };
        let frac = certify_covering(&segment(), &ps, 2000, 7).unwrap();
        assert!(frac < 1.0, "cover fraction {frac}");
    }

    #[test]
    fn full_radius_singleton_covers_everything() {
        let ps = PackingSet {
            center: vec![0.0, 0.0],
            radius: 0.5,
            separation: 1.0,
            points: vec![vec![0.0, 0.0]],
            certified_cover_fraction: 0.0,
        };
        let frac = certify_covering(&square(), &ps, 1000, 7).unwrap();
        assert_eq!(frac, 1.0);
    }
}
