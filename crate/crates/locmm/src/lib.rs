//! Minimax estimation toolkit for the Gaussian sequence model under convex
//! constraints.
//!
//! The model is Y = μ + ξ with ξ ~ N(0, σ²I) and μ constrained to a known
//! closed convex set K ⊂ ℝⁿ. Everything here is built from oracle access to
//! K (membership, Euclidean projection, diameter):
//!
//! - [`body`] — convex sets as oracle bundles: hyperrectangles, ellipsoids,
//!   ℓ1 and convex weak-ℓp balls, V-polytopes, Cartesian products, and
//!   unbounded cones/halfspaces/subspaces.
//! - [`packing`] / [`entropy`] — greedy packing sets that double as
//!   coverings, plus local and global packing-entropy estimates.
//! - [`estimators`] — the iterative packing estimator (finite-depth and
//!   unbounded/aggregated variants), the constrained least-squares
//!   estimator, and a truncated projection baseline for ellipsoids.
//! - [`rates`] — the ε* rate solver driven by local entropy, Fano lower
//!   bounds, and closed-form rate formulas for the standard set families.
//! - [`risk`] — a seeded, reproducible Monte Carlo risk harness.
//! - [`cli`] — the `locmm` command-line front end.
//!
//! All randomized procedures are deterministic functions of explicit 64-bit
//! seeds; packing sets never depend on observed data.

pub mod body;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod estimators;
pub mod packing;
pub mod rates;
pub mod risk;
pub mod seeding;
pub mod vector;

pub use body::{weak_lp_norm, BodyDescriptor, ConvexBody};
pub use entropy::{
    exhaustive_grid_entropy, global_entropy, local_entropy, local_entropy_at, EntropyEstimate,
    EntropyMethod,
};
pub use error::Error;
pub use estimators::{
    depth_bound, iterative_estimate, lse, projection_estimate, two_point_test,
    unbounded_estimate, DepthBound, EstimateTrajectory, EstimatorConfig, EstimatorSession,
    SplitSample,
};
pub use packing::{
    certify_covering, greedy_packing, greedy_packing_with_stats, verify_packing, PackingConfig,
    PackingSet, PackingStats,
};
pub use rates::{
    closed_form_rate, epsilon_star, epsilon_star_from_entropy, fano_bound,
    kolmogorov_width_ellipse, maurey_rate_upper, rate_ellipse, rate_hyperrectangle, rate_l1,
    rate_product, rate_quadconvex, rate_weak_lp, FanoBound, RateConfig, RateResult, RegimeRate,
};
pub use risk::{
    compare_estimators, mc_risk, risk_csv, two_point_error_experiment, EstimatorId,
    ExperimentSpec, RiskReport, TestErrorReport, TruthSpec,
};
pub use vector::Vector;
