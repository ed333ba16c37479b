//! Local and global packing entropy.
//!
//! The local entropy of K at scale ε is the log cardinality of the largest
//! ε/c-packing of `B(θ, ε) ∩ K`, supremized over centers θ ∈ K. The sup is
//! approximated from below by a finite deterministic center sweep (analytic
//! extreme points, the body center, and seeded boundary points); per-center
//! counts are reported so the approximation can be audited. The pointwise
//! variant skips the sup entirely.

use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::packing::{greedy_packing_with_stats, PackingConfig};
use crate::seeding::{mix, rng_from};
use crate::vector::{dist, norm, Vector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// How an entropy estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyMethod {
    GreedySampled,
    /// Greedy construction that ran out of candidate budget before
    /// stalling; the count is a firm lower bound but may undershoot.
    GreedySampledBudgetExhausted,
    ExhaustiveGrid,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub epsilon: f64,
    /// Natural log of the largest per-center packing cardinality.
    pub log_count: f64,
    pub per_center_counts: Vec<(Vector, usize)>,
    pub method: EntropyMethod,
}

impl EntropyEstimate {
    pub fn budget_exhausted(&self) -> bool {
        self.method == EntropyMethod::GreedySampledBudgetExhausted
    }
}

/// Volumetric sanity guard: reject requests whose packing cardinality
/// estimate min((1 + 2r/δ)^n, budget) exceeds 10^6. At the default budgets
/// this never trips; it protects against configurations that could not
/// finish at desk scale anyway.
fn guard_expected_count(dim: usize, radius: f64, separation: f64, budget: usize) -> Result<()> {
    const CAP: f64 = 1e6;
    let log_volumetric = dim as f64 * (1.0 + 2.0 * radius / separation).ln();
    if log_volumetric > CAP.ln() && (budget as f64) > CAP {
        return Err(Error::BudgetExceeded {
            estimate: log_volumetric.exp(),
            budget,
        });
    }
    Ok(())
}

/// Pointwise local entropy at a fixed center θ: the packing of
/// `B(θ, ε) ∩ K` at separation ε/c, with no supremum over centers.
pub fn local_entropy_at(
    body: &ConvexBody,
    theta: &[f64],
    epsilon: f64,
    cfg: &PackingConfig,
) -> Result<EntropyEstimate> {
    cfg.validate()?;
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be > 0"));
    }
    guard_expected_count(body.dimension(), epsilon, epsilon / cfg.c_const, cfg.candidate_budget)?;
    let (set, stats) =
        greedy_packing_with_stats(body, &[], theta, epsilon, epsilon / cfg.c_const, cfg)?;
    let count = set.points.len();
    Ok(EntropyEstimate {
        epsilon,
        log_count: (count as f64).ln(),
        per_center_counts: vec![(theta.to_vec(), count)],
        method: if stats.budget_exhausted {
            EntropyMethod::GreedySampledBudgetExhausted
        } else {
            EntropyMethod::GreedySampled
        },
    })
}

/// Local entropy of K at scale ε: max of the pointwise entropy over a
/// deterministic center set. Centers are swept in parallel with per-center
/// derived seeds; the result is independent of scheduling.
pub fn local_entropy(body: &ConvexBody, epsilon: f64, cfg: &PackingConfig) -> Result<EntropyEstimate> {
    cfg.validate()?;
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be > 0"));
    }
    guard_expected_count(body.dimension(), epsilon, epsilon / cfg.c_const, cfg.candidate_budget)?;
    let centers = entropy_centers(body, epsilon, cfg);
    let results: Vec<Result<(Vector, usize, bool)>> = centers
        .into_par_iter()
        .enumerate()
        .map(|(i, theta)| {
            let sub = PackingConfig {
                seed: mix(cfg.seed, &[0x63656e74, i as u64]),
                ..cfg.clone()
            };
            let (set, stats) = greedy_packing_with_stats(
                body,
                &[],
                &theta,
                epsilon,
                epsilon / cfg.c_const,
                &sub,
            )?;
            Ok((theta, set.points.len(), stats.budget_exhausted))
        })
        .collect();
    let mut per_center = Vec::with_capacity(results.len());
    let mut exhausted = false;
    for r in results {
        let (theta, count, ex) = r?;
        exhausted |= ex;
        per_center.push((theta, count));
    }
    let max_count = per_center.iter().map(|(_, c)| *c).max().unwrap_or(1);
    Ok(EntropyEstimate {
        epsilon,
        log_count: (max_count as f64).ln(),
        per_center_counts: per_center,
        method: if exhausted {
            EntropyMethod::GreedySampledBudgetExhausted
        } else {
            EntropyMethod::GreedySampled
        },
    })
}

/// Global entropy: log cardinality of a greedy packing of all of K at
/// separation ε (center = body center, radius = diameter).
pub fn global_entropy(body: &ConvexBody, epsilon: f64, cfg: &PackingConfig) -> Result<EntropyEstimate> {
    cfg.validate()?;
    if !body.bounded() {
        return Err(Error::invalid("global entropy requires a bounded body"));
    }
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be > 0"));
    }
    let d = body.diameter();
    if epsilon >= 2.0 * d.max(f64::MIN_POSITIVE) {
        // Nothing besides the center can fit.
        let center = body.center();
        return Ok(EntropyEstimate {
            epsilon,
            log_count: 0.0,
            per_center_counts: vec![(center, 1)],
            method: EntropyMethod::GreedySampled,
        });
    }
    guard_expected_count(body.dimension(), d, epsilon, cfg.candidate_budget)?;
    let center = body.center();
    let (set, stats) = greedy_packing_with_stats(body, &[], &center, d, epsilon.min(2.0 * d), cfg)?;
    let count = set.points.len();
    Ok(EntropyEstimate {
        epsilon,
        log_count: (count as f64).ln(),
        per_center_counts: vec![(center, count)],
        method: if stats.budget_exhausted {
            EntropyMethod::GreedySampledBudgetExhausted
        } else {
            EntropyMethod::GreedySampled
        },
    })
}

/// Deterministic greedy packing of an axis grid restricted to the body:
/// an auditable lower bound for packing counts at small dimension.
pub fn exhaustive_grid_entropy(
    body: &ConvexBody,
    epsilon: f64,
    grid_step: f64,
) -> Result<EntropyEstimate> {
    if !body.bounded() {
        return Err(Error::invalid("grid entropy requires a bounded body"));
    }
    if !(epsilon > 0.0) || !(grid_step > 0.0) {
        return Err(Error::invalid("epsilon and grid_step must be positive"));
    }
    let n = body.dimension();
    let center = body.center();
    let half = body.diameter();
    let per_axis = ((2.0 * half / grid_step).floor() as usize + 1).max(1);
    let total = (per_axis as f64).powi(n as i32);
    if total > 2e6 {
        return Err(Error::BudgetExceeded {
            estimate: total,
            budget: 2_000_000,
        });
    }
    let mut accepted: Vec<Vector> = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let point: Vector = idx
            .iter()
            .zip(center.iter())
            .map(|(i, c)| c - half + (*i as f64) * grid_step)
            .collect();
        if body.contains(&point, 1e-9)? && accepted.iter().all(|q| dist(q, &point) >= epsilon) {
            accepted.push(point);
        }
        // Odometer increment in lexicographic order.
        let mut carry = true;
        for slot in (0..n).rev() {
            if carry {
                idx[slot] += 1;
                if idx[slot] >= per_axis {
                    idx[slot] = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }
    let count = accepted.len().max(1);
    Ok(EntropyEstimate {
        epsilon,
        log_count: (count as f64).ln(),
        per_center_counts: vec![(center, count)],
        method: EntropyMethod::ExhaustiveGrid,
    })
}

/// Center sweep for the local-entropy sup: the body center, analytic
/// extreme points, then seeded boundary points (projections of scaled
/// random directions) up to `cfg.center_candidates` total.
fn entropy_centers(body: &ConvexBody, epsilon: f64, cfg: &PackingConfig) -> Vec<Vector> {
    let budget = cfg.center_candidates.max(1);
    let mut centers = vec![body.center()];
    let scale = if body.bounded() {
        body.diameter() / 2.0
    } else {
        epsilon.max(1.0)
    };
    for e in body.extreme_points(scale, budget.saturating_sub(1)) {
        push_unique(&mut centers, e, budget);
    }
    let mut rng = rng_from(mix(cfg.seed, &[0x626f756e_64]));
    let n = body.dimension();
    let reach = if body.bounded() {
        body.diameter()
    } else {
        2.0 * epsilon.max(1.0)
    };
    while centers.len() < budget {
        let g: Vector = (0..n)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let len = norm(&g).max(1e-12);
        let raw: Vector = centers[0]
            .iter()
            .zip(g.iter())
            .map(|(c, gi)| c + reach * gi / len)
            .collect();
        match body.project(&raw) {
            Ok(p) => push_unique(&mut centers, p, budget),
            Err(_) => break,
        }
    }
    centers
}

fn push_unique(centers: &mut Vec<Vector>, candidate: Vector, budget: usize) {
    if centers.len() >= budget {
        return;
    }
    if centers.iter().all(|c| dist(c, &candidate) > 1e-12) {
        centers.push(candidate);
    }
}
