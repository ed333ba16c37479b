//! Seeded Monte Carlo risk evaluation and estimator comparison.
//!
//! The worst-case risk sup_{μ ∈ K} E||ν̂(Y) − μ||² is approximated over a
//! finite list of truth points (extreme points, the center, seeded boundary
//! points); reports label it worst-over-listed-μ, never "minimax risk".
//! Replicate noise streams are derived as hash(master, μ index, σ index,
//! replicate index), shared across estimators so paired comparisons are
//! exact. Reports are byte-identical across runs and thread schedules.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::body::{BodyDescriptor, ConvexBody};
use crate::error::{Error, Result};
use crate::estimators::{
    depth_bound, lse, projection_estimate, two_point_test, unbounded_estimate_in_session,
    EstimatorConfig, EstimatorSession,
};
use crate::rates::closed_form_rate;
use crate::seeding::{mix, rng_from};
use crate::vector::{dist_sq, norm, Vector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorId {
    Iterative,
    Lse,
    Projection,
    Unbounded,
}

impl std::fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EstimatorId::Iterative => "iterative",
            EstimatorId::Lse => "lse",
            EstimatorId::Projection => "projection",
            EstimatorId::Unbounded => "unbounded",
        };
        write!(f, "{s}")
    }
}

/// How the truth points μ are generated.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TruthSpec {
    Points { points: Vec<Vector> },
    Vertices,
    Center,
    RandomBoundary { count: usize },
    /// Center + extreme points + seeded boundary fill, `count` total.
    Auto { count: usize },
}

impl Default for TruthSpec {
    fn default() -> Self {
        TruthSpec::Auto { count: 8 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub body: BodyDescriptor,
    pub estimators: Vec<EstimatorId>,
    #[serde(default)]
    pub truth: TruthSpec,
    pub sigma_grid: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
    #[serde(default)]
    pub config: EstimatorConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiskCell {
    pub mu_id: usize,
    pub sigma: f64,
    pub estimator: EstimatorId,
    pub mse: f64,
    pub stderr: f64,
    pub replications: usize,
    pub failures: usize,
    /// False when more than 1% of replicates failed.
    pub valid: bool,
    /// Base seed of this cell's replicate streams.
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorstRow {
    pub sigma: f64,
    pub estimator: EstimatorId,
    pub mse: f64,
    pub mu_id: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioRow {
    pub mu_id: usize,
    pub sigma: f64,
    pub estimator_a: EstimatorId,
    pub estimator_b: EstimatorId,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiskReport {
    pub body: BodyDescriptor,
    pub truth_points: Vec<Vector>,
    pub sigma_grid: Vec<f64>,
    pub replications: usize,
    pub master_seed: u64,
    pub cells: Vec<RiskCell>,
    /// Per (σ, estimator): the worst mse over the listed truth points.
    pub worst_over_listed_mu: Vec<WorstRow>,
    /// Closed-form rate per σ when the family has one.
    pub closed_form_rate: Option<Vec<(f64, f64)>>,
    /// Pairwise risk ratios, present when several estimators ran.
    pub ratios: Vec<RatioRow>,
    /// Wall-clock seconds; excluded from serialization so identical seeds
    /// produce byte-identical reports.
    #[serde(skip)]
    pub runtime_seconds: f64,
}

/// Empirical error rate of the two-point likelihood test against its
/// analytic bound exp(−(C−2)²δ²/(8σ²)).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestErrorReport {
    pub empirical_rate: f64,
    pub bound: f64,
    pub replications: usize,
}

fn resolve_truth(body: &ConvexBody, spec: &TruthSpec, seed: u64) -> Result<Vec<Vector>> {
    let scale = if body.bounded() {
        body.diameter() / 2.0
    } else {
        1.0
    };
    let points = match spec {
        TruthSpec::Points { points } => points.clone(),
        TruthSpec::Vertices => body.extreme_points(scale, 64),
        TruthSpec::Center => vec![body.center()],
        TruthSpec::RandomBoundary { count } => boundary_points(body, *count, seed),
        TruthSpec::Auto { count } => {
            let mut pts = vec![body.center()];
            for e in body.extreme_points(scale, count.saturating_sub(1)) {
                if pts.len() >= *count {
                    break;
                }
                if pts.iter().all(|p| dist_sq(p, &e) > 1e-24) {
                    pts.push(e);
                }
            }
            let fill = boundary_points(body, count.saturating_sub(pts.len()), seed);
            pts.extend(fill);
            pts
        }
    };
    if points.is_empty() {
        return Err(Error::invalid("truth set is empty"));
    }
    for p in &points {
        if !body.contains(p, 1e-6)? {
            return Err(Error::invalid(format!(
                "truth point {p:?} is not a member of the body"
            )));
        }
    }
    Ok(points)
}

fn boundary_points(body: &ConvexBody, count: usize, seed: u64) -> Vec<Vector> {
    let n = body.dimension();
    let reach = if body.bounded() { body.diameter() } else { 2.0 };
    let center = body.center();
    let mut rng = rng_from(mix(seed, &[0x74727574_68]));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g: Vector = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let len = norm(&g).max(1e-12);
        let raw: Vector = center
            .iter()
            .zip(g.iter())
            .map(|(c, gi)| c + reach * gi / len)
            .collect();
        match body.project(&raw) {
            Ok(p) => out.push(p),
            Err(_) => break,
        }
    }
    out
}

/// Installs the worker pool honoring LOCMM_THREADS, then runs `f` inside it.
fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    if let Ok(v) = std::env::var("LOCMM_THREADS") {
        if let Ok(threads) = v.trim().parse::<usize>() {
            if threads >= 1 {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .expect("worker pool");
                return pool.install(f);
            }
        }
    }
    f()
}

/// Monte Carlo risk sweep over (μ, σ, estimator) cells.
pub fn mc_risk(spec: &ExperimentSpec) -> Result<RiskReport> {
    let started = Instant::now();
    if spec.replications == 0 {
        return Err(Error::invalid("replications must be >= 1"));
    }
    if spec.estimators.is_empty() {
        return Err(Error::invalid("need at least one estimator id"));
    }
    if spec.sigma_grid.is_empty() || spec.sigma_grid.iter().any(|s| !(*s >= 0.0)) {
        return Err(Error::invalid("sigma grid must be nonempty and nonnegative"));
    }
    let body = ConvexBody::new(spec.body.clone())?;
    let mut cfg = spec.config.clone();
    cfg.packing.seed = mix(spec.seed, &[2]);
    cfg.packing.validate()?;
    let truth = resolve_truth(&body, &spec.truth, spec.seed)?;
    let n = body.dimension();
    let r = spec.replications;

    // Depths for the iterative estimator: per σ, data-independent.
    let needs_iterative = spec.estimators.contains(&EstimatorId::Iterative);
    let mut depths: Vec<usize> = Vec::new();
    if needs_iterative {
        if !body.bounded() {
            return Err(Error::invalid(
                "iterative estimator requires a bounded body; use the unbounded estimator",
            ));
        }
        for &sigma in &spec.sigma_grid {
            let sigma_lower = cfg.sigma_lower.unwrap_or(sigma);
            let d = if sigma_lower > 0.0 {
                depth_bound(&body, sigma_lower, &cfg)?.depth
            } else {
                cfg.max_depth_cap
            };
            depths.push(d);
        }
    }

    let session = EstimatorSession::new(&body, &cfg);
    let mut cells: Vec<RiskCell> = Vec::new();
    for estimator in &spec.estimators {
        for (j, &sigma) in spec.sigma_grid.iter().enumerate() {
            for (i, mu) in truth.iter().enumerate() {
                let cell_seed = mix(spec.seed, &[1, i as u64, j as u64]);
                let sq_errors: Vec<Option<f64>> = with_pool(|| {
                    (0..r)
                        .into_par_iter()
                        .map(|rep| {
                            let noise_seed = mix(spec.seed, &[1, i as u64, j as u64, rep as u64]);
                            let mut rng = rng_from(noise_seed);
                            let mut y = Vec::with_capacity(n);
                            for &m in mu.iter() {
                                let g: f64 = StandardNormal.sample(&mut rng);
                                y.push(m + sigma * g);
                            }
                            let est: Result<Vector> = match estimator {
                                EstimatorId::Lse => lse(&body, &y),
                                EstimatorId::Projection => projection_estimate(&body, &y, sigma),
                                EstimatorId::Iterative => session
                                    .estimate(&y, depths[j])
                                    .map(|t| t.final_point),
                                EstimatorId::Unbounded => {
                                    let eta_seed =
                                        mix(spec.seed, &[3, i as u64, j as u64, rep as u64]);
                                    unbounded_estimate_in_session(&session, &y, sigma, eta_seed)
                                        .map(|t| t.final_point)
                                }
                            };
                            est.ok().map(|nu_hat| dist_sq(&nu_hat, mu))
                        })
                        .collect()
                });
                let successes: Vec<f64> = sq_errors.iter().filter_map(|e| *e).collect();
                let failures = r - successes.len();
                let (mse, stderr) = mean_stderr(&successes);
                cells.push(RiskCell {
                    mu_id: i,
                    sigma,
                    estimator: *estimator,
                    mse,
                    stderr,
                    replications: r,
                    failures,
                    valid: failures * 100 <= r,
                    seed: cell_seed,
                });
            }
        }
    }

    // Worst-over-listed-μ rows: exact max over this report's cells.
    let mut worst: Vec<WorstRow> = Vec::new();
    for estimator in &spec.estimators {
        for &sigma in &spec.sigma_grid {
            let row = cells
                .iter()
                .filter(|c| c.estimator == *estimator && c.sigma == sigma)
                .max_by(|a, b| a.mse.total_cmp(&b.mse))
                .expect("nonempty cell group");
            worst.push(WorstRow {
                sigma,
                estimator: *estimator,
                mse: row.mse,
                mu_id: row.mu_id,
            });
        }
    }

    let closed_form = {
        let mut rows = Vec::new();
        let mut any = false;
        for &sigma in &spec.sigma_grid {
            if let Some(rate) = closed_form_rate(&spec.body, sigma)? {
                rows.push((sigma, rate));
                any = true;
            }
        }
        if any {
            Some(rows)
        } else {
            None
        }
    };

    let mut ratios: Vec<RatioRow> = Vec::new();
    for (ai, a) in spec.estimators.iter().enumerate() {
        for b in spec.estimators.iter().skip(ai + 1) {
            for &sigma in &spec.sigma_grid {
                for i in 0..truth.len() {
                    let find = |e: EstimatorId| {
                        cells
                            .iter()
                            .find(|c| c.estimator == e && c.sigma == sigma && c.mu_id == i)
                            .map(|c| c.mse)
                    };
                    if let (Some(ma), Some(mb)) = (find(*a), find(*b)) {
                        ratios.push(RatioRow {
                            mu_id: i,
                            sigma,
                            estimator_a: *a,
                            estimator_b: *b,
                            ratio: if mb > 0.0 { ma / mb } else { f64::INFINITY },
                        });
                    }
                }
            }
        }
    }

    Ok(RiskReport {
        body: spec.body.clone(),
        truth_points: truth,
        sigma_grid: spec.sigma_grid.clone(),
        replications: r,
        master_seed: spec.seed,
        cells,
        worst_over_listed_mu: worst,
        closed_form_rate: closed_form,
        ratios,
        runtime_seconds: started.elapsed().as_secs_f64(),
    })
}

/// As [`mc_risk`] but requiring at least two estimator ids, for aligned
/// comparisons with shared noise streams.
pub fn compare_estimators(spec: &ExperimentSpec) -> Result<RiskReport> {
    if spec.estimators.len() < 2 {
        return Err(Error::invalid("compare needs at least two estimator ids"));
    }
    mc_risk(spec)
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Error-rate experiment for the two-point likelihood-ratio test: the truth
/// μ is uniform on the δ-ball around ν1 = 0, the alternative sits at
/// ν2 = Cδ·e1, and the test errs when it picks ν2. The analytic bound is
/// exp(−(C−2)²δ²/(8σ²)).
pub fn two_point_error_experiment(
    c_factor: f64,
    delta: f64,
    sigma: f64,
    dim: usize,
    replications: usize,
    seed: u64,
) -> Result<TestErrorReport> {
    if !(c_factor > 2.0) {
        return Err(Error::invalid("the separation factor C must exceed 2"));
    }
    if !(delta > 0.0) || !(sigma >= 0.0) || dim == 0 || replications == 0 {
        return Err(Error::invalid("delta > 0, sigma >= 0, dim and R >= 1 required"));
    }
    let nu1 = vec![0.0; dim];
    let mut nu2 = vec![0.0; dim];
    nu2[0] = c_factor * delta;
    let errors: Vec<bool> = with_pool(|| {
        (0..replications)
            .into_par_iter()
            .map(|rep| {
                let mut rng = rng_from(mix(seed, &[4, rep as u64]));
                // Uniform on the δ-ball: Gaussian direction, radius δ·u^{1/n}.
                let g: Vector = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                let len = norm(&g).max(1e-300);
                let radius = delta * rng.gen::<f64>().powf(1.0 / dim as f64);
                let mu: Vector = g.iter().map(|v| v / len * radius).collect();
                let y: Vector = mu
                    .iter()
                    .map(|m| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        m + sigma * z
                    })
                    .collect();
                two_point_test(&y, &nu1, &nu2).unwrap()
            })
            .collect()
    });
    let empirical = errors.iter().filter(|e| **e).count() as f64 / replications as f64;
    let bound = (-(c_factor - 2.0) * (c_factor - 2.0) * delta * delta / (8.0 * sigma * sigma)).exp();
    Ok(TestErrorReport {
        empirical_rate: empirical,
        bound,
        replications,
    })
}

/// Flat CSV rows (mu_id, sigma, estimator, mse, stderr, R, seed); floats
/// carry 17 significant digits.
pub fn risk_csv(report: &RiskReport) -> String {
    let mut out = String::from("mu_id,sigma,estimator,mse,stderr,replications,seed\n");
    for c in &report.cells {
        out.push_str(&format!(
            "{},{:.16e},{},{:.16e},{:.16e},{},{}\n",
            c.mu_id, c.sigma, c.estimator, c.mse, c.stderr, c.replications, c.seed
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment_spec(estimators: Vec<EstimatorId>, sigma: f64, r: usize, seed: u64) -> ExperimentSpec {
        ExperimentSpec {
            body: BodyDescriptor::Hyperrectangle { a: vec![2.0] },
            estimators,
            truth: TruthSpec::Points {
                points: vec![vec![0.0], vec![1.0]],
            },
            sigma_grid: vec![sigma],
            replications: r,
            seed,
            config: EstimatorConfig::default(),
        }
    }

    #[test]
    fn lse_bounded_set_caps_risk() {
        // With σ = 10 the estimate stays in the segment, so the error from
        // μ = 0 is at most 1.
        let spec = segment_spec(vec![EstimatorId::Lse], 10.0, 500, 5);
        let rep = mc_risk(&spec).unwrap();
        let cell = &rep.cells[0];
        assert!(cell.mse <= 1.0 + 1e-9);
        assert!(cell.valid);
    }

    #[test]
    fn lse_boundary_cell_matches_quadrature() {
        // μ = 1, σ = 0.1: E(clamped error)² ≈ σ²/2; the quadrature-derived
        // band is [0.004, 0.007]. Moderate R here; the acceptance suite
        // runs the full R = 10^4 version.
        let spec = segment_spec(vec![EstimatorId::Lse], 0.1, 4000, 11);
        let rep = mc_risk(&spec).unwrap();
        let cell = rep.cells.iter().find(|c| c.mu_id == 1).unwrap();
        assert!(
            cell.mse > 0.004 && cell.mse < 0.007,
            "boundary mse {}",
            cell.mse
        );
    }

    #[test]
    fn identical_estimators_have_unit_ratio() {
        let spec = segment_spec(vec![EstimatorId::Lse, EstimatorId::Lse], 0.3, 50, 9);
        let rep = compare_estimators(&spec).unwrap();
        assert!(!rep.ratios.is_empty());
        for row in &rep.ratios {
            assert_eq!(row.ratio, 1.0);
        }
    }

    #[test]
    fn worst_row_equals_max_cell() {
        let spec = segment_spec(vec![EstimatorId::Lse], 0.5, 100, 3);
        let rep = mc_risk(&spec).unwrap();
        let max = rep
            .cells
            .iter()
            .map(|c| c.mse)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(rep.worst_over_listed_mu[0].mse, max);
    }

    #[test]
    fn reports_are_reproducible() {
        let spec = segment_spec(vec![EstimatorId::Lse], 0.2, 64, 123);
        let a = serde_json::to_string(&mc_risk(&spec).unwrap()).unwrap();
        let b = serde_json::to_string(&mc_risk(&spec).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn compare_requires_two_ids() {
        let spec = segment_spec(vec![EstimatorId::Lse], 0.2, 10, 1);
        assert!(compare_estimators(&spec).is_err());
    }

    #[test]
    fn two_point_bound_examples() {
        // (C, δ, σ) = (6, 1, 1): bound e^{-2} ≈ 0.1353.
        let rep = two_point_error_experiment(6.0, 1.0, 1.0, 2, 2000, 42).unwrap();
        assert!((rep.bound - (-2.0_f64).exp()).abs() < 1e-12);
        let slack = 3.0 * (rep.bound / 2000.0).sqrt();
        assert!(rep.empirical_rate <= rep.bound + slack);
        // σ = 0: deterministic separation, no errors.
        let det = two_point_error_experiment(6.0, 1.0, 0.0, 2, 500, 42).unwrap();
        assert_eq!(det.empirical_rate, 0.0);
        assert_eq!(det.bound, 0.0);
    }

    #[test]
    fn truth_validation_rejects_outsiders() {
        let mut spec = segment_spec(vec![EstimatorId::Lse], 0.2, 10, 1);
        spec.truth = TruthSpec::Points {
            points: vec![vec![3.0]],
        };
        assert!(mc_risk(&spec).is_err());
    }
}
