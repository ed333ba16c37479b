//! The `locmm` command-line front end.
//!
//! Subcommands: `rate`, `entropy`, `estimate`, `risk`, `pack`, `compare`,
//! `lemma4`. Inputs are JSON body descriptors and vectors as JSON arrays or
//! single-column CSV; outputs are JSON (and CSV where a flat table is more
//! useful). Exit codes: 0 success, 2 validation error, 3 numerical failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::body::{BodyDescriptor, ConvexBody};
use crate::entropy::{global_entropy, local_entropy, local_entropy_at};
use crate::error::{Error, Result};
use crate::estimators::{depth_bound, iterative_estimate, unbounded_estimate, EstimatorConfig};
use crate::packing::{certify_covering, greedy_packing, verify_packing, PackingConfig};
use crate::rates::{closed_form_rate, epsilon_star, RateConfig};
use crate::risk::{compare_estimators, mc_risk, risk_csv, two_point_error_experiment, ExperimentSpec};
use crate::vector::Vector;

#[derive(Parser)]
#[command(
    name = "locmm",
    about = "Minimax estimation toolkit for the Gaussian sequence model under convex constraints",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonTuning {
    /// Local-entropy constant c (>= 8).
    #[arg(long, default_value_t = 16.0)]
    c: f64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Candidate draws per packing.
    #[arg(long, default_value_t = 4000)]
    candidate_budget: usize,
    /// Consecutive rejections before a packing is declared maximal.
    #[arg(long, default_value_t = 500)]
    stall_limit: usize,
    /// Centers swept for the local-entropy supremum.
    #[arg(long, default_value_t = 32)]
    center_candidates: usize,
}

impl CommonTuning {
    fn packing(&self) -> PackingConfig {
        PackingConfig {
            c_const: self.c,
            candidate_budget: self.candidate_budget,
            stall_limit: self.stall_limit,
            center_candidates: self.center_candidates,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the minimax rate of a body at noise level sigma.
    Rate {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        sigma: f64,
        /// Use the closed-form rate formula for the family instead of the
        /// entropy solver.
        #[arg(long)]
        closed_form: bool,
        #[command(flatten)]
        tuning: CommonTuning,
        /// Write the RateResult as JSON.
        #[arg(long)]
        out_json: Option<PathBuf>,
        /// Write the entropy trace as CSV (epsilon, log_count).
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// Estimate local or global packing entropy.
    Entropy {
        #[arg(long)]
        body: PathBuf,
        /// Single scale to evaluate.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Evaluate a log-spaced grid "min,max,count" and emit CSV.
        #[arg(long)]
        grid: Option<String>,
        /// Global packing entropy instead of local.
        #[arg(long)]
        global: bool,
        /// Pointwise local entropy at this center (vector file).
        #[arg(long)]
        at: Option<PathBuf>,
        #[command(flatten)]
        tuning: CommonTuning,
        #[arg(long)]
        out_json: Option<PathBuf>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// Run the iterative packing estimator on an observation.
    Estimate {
        #[arg(long)]
        body: PathBuf,
        /// Observation vector (JSON array or single-column CSV).
        #[arg(long)]
        y: PathBuf,
        /// Known lower bound on sigma; sets the depth via the finite-step
        /// rule. Without it (and without --depth) the depth cap is used.
        #[arg(long)]
        sigma_lower: Option<f64>,
        /// Explicit depth override.
        #[arg(long)]
        depth: Option<usize>,
        /// Treat the body as unbounded and run the sample-splitting
        /// aggregation estimator with this known sigma.
        #[arg(long)]
        sigma: Option<f64>,
        #[command(flatten)]
        tuning: CommonTuning,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Monte Carlo risk sweep from an experiment spec.
    Risk {
        #[arg(long)]
        spec: PathBuf,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_json: Option<PathBuf>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// Build one greedy packing and certify its covering property.
    Pack {
        #[arg(long)]
        body: PathBuf,
        /// Packing center (vector file); defaults to the body center.
        #[arg(long)]
        center: Option<PathBuf>,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        separation: f64,
        /// Probes for covering certification.
        #[arg(long, default_value_t = 10_000)]
        probes: usize,
        #[command(flatten)]
        tuning: CommonTuning,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Compare several estimators with shared noise streams.
    Compare {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_json: Option<PathBuf>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// Error-rate experiment for the two-point likelihood test.
    Lemma4 {
        /// Separation factor C (> 2).
        #[arg(long)]
        c_factor: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 10_000)]
        replications: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read_body(path: &Path) -> Result<ConvexBody> {
    let text = std::fs::read_to_string(path)?;
    let descriptor: BodyDescriptor = serde_json::from_str(&text)?;
    ConvexBody::new(descriptor)
}

fn read_vector(path: &Path) -> Result<Vector> {
    let text = std::fs::read_to_string(path)?;
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        Ok(serde_json::from_str(trimmed)?)
    } else {
        trimmed
            .split(|c: char| c == '\n' || c == ',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::invalid(format!("bad number {s:?}: {e}")))
            })
            .collect()
    }
}

fn write_json<T: serde::Serialize>(path: &Option<PathBuf>, value: &T) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, serde_json::to_string_pretty(value)?)?;
    }
    Ok(())
}

fn write_text(path: &Option<PathBuf>, text: &str) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, text)?;
    }
    Ok(())
}

fn run(command: Command) -> Result<String> {
    match command {
        Command::Rate {
            body,
            sigma,
            closed_form,
            tuning,
            out_json,
            out_csv,
        } => {
            let body = read_body(&body)?;
            if closed_form {
                let rate = closed_form_rate(body.descriptor(), sigma)?.ok_or_else(|| {
                    Error::invalid("no closed-form rate for this body family")
                })?;
                let payload = serde_json::json!({
                    "rate_sq": rate,
                    "sigma": sigma,
                    "method": "closed-form",
                });
                write_json(&out_json, &payload)?;
                return Ok(format!("closed-form rate_sq = {rate:.6e} at sigma = {sigma}"));
            }
            let cfg = RateConfig {
                packing: tuning.packing(),
                ..Default::default()
            };
            let result = epsilon_star(&body, sigma, &cfg)?;
            let mut csv = String::from("epsilon,log_count\n");
            for (eps, lc) in &result.entropy_trace {
                csv.push_str(&format!("{eps:.16e},{lc:.16e}\n"));
            }
            write_json(&out_json, &result)?;
            write_text(&out_csv, &csv)?;
            Ok(format!(
                "epsilon_star = {:.6e}, rate_sq = {:.6e} ({})",
                result.epsilon_star, result.rate_sq, result.method
            ))
        }
        Command::Entropy {
            body,
            epsilon,
            grid,
            global,
            at,
            tuning,
            out_json,
            out_csv,
        } => {
            let body = read_body(&body)?;
            let cfg = tuning.packing();
            if let Some(grid) = grid {
                let parts: Vec<&str> = grid.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::invalid("--grid expects min,max,count"));
                }
                let lo: f64 = parts[0].trim().parse().map_err(|_| Error::invalid("bad grid min"))?;
                let hi: f64 = parts[1].trim().parse().map_err(|_| Error::invalid("bad grid max"))?;
                let count: usize = parts[2].trim().parse().map_err(|_| Error::invalid("bad grid count"))?;
                if !(lo > 0.0) || !(hi > lo) || count < 2 {
                    return Err(Error::invalid("grid needs 0 < min < max and count >= 2"));
                }
                let mut csv = String::from("epsilon,log_count\n");
                for k in 0..count {
                    let t = k as f64 / (count - 1) as f64;
                    let eps = lo * (hi / lo).powf(t);
                    let e = if global {
                        global_entropy(&body, eps, &cfg)?
                    } else {
                        local_entropy(&body, eps, &cfg)?
                    };
                    csv.push_str(&format!("{:.16e},{:.16e}\n", eps, e.log_count));
                }
                write_text(&out_csv, &csv)?;
                return Ok(format!("entropy curve over {count} scales written"));
            }
            let eps = epsilon.ok_or_else(|| Error::invalid("need --epsilon or --grid"))?;
            let estimate = if global {
                global_entropy(&body, eps, &cfg)?
            } else if let Some(theta_path) = at {
                let theta = read_vector(&theta_path)?;
                local_entropy_at(&body, &theta, eps, &cfg)?
            } else {
                local_entropy(&body, eps, &cfg)?
            };
            write_json(&out_json, &estimate)?;
            Ok(format!(
                "log_count = {:.6} at epsilon = {eps} ({:?})",
                estimate.log_count, estimate.method
            ))
        }
        Command::Estimate {
            body,
            y,
            sigma_lower,
            depth,
            sigma,
            tuning,
            out_json,
        } => {
            let body = read_body(&body)?;
            let y = read_vector(&y)?;
            let cfg = EstimatorConfig {
                packing: tuning.packing(),
                sigma_lower,
                ..Default::default()
            };
            let trajectory = if let Some(sigma) = sigma {
                unbounded_estimate(&body, &y, sigma, &cfg)?
            } else {
                let depth = match (depth, sigma_lower) {
                    (Some(d), _) => d,
                    (None, Some(sl)) => depth_bound(&body, sl, &cfg)?.depth,
                    (None, None) => {
                        eprintln!(
                            "warning: no --depth or --sigma-lower; running to the depth cap {}",
                            cfg.max_depth_cap
                        );
                        cfg.max_depth_cap
                    }
                };
                iterative_estimate(&body, &y, depth, &cfg)?
            };
            write_json(&out_json, &trajectory)?;
            Ok(format!(
                "final point after {} levels: {:?}",
                trajectory.levels.len(),
                trajectory.final_point
            ))
        }
        Command::Risk {
            spec,
            seed,
            out_json,
            out_csv,
        } => {
            let text = std::fs::read_to_string(&spec)?;
            let mut spec: ExperimentSpec = serde_json::from_str(&text)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let report = mc_risk(&spec)?;
            write_json(&out_json, &report)?;
            write_text(&out_csv, &risk_csv(&report))?;
            Ok(format!(
                "{} cells over {} truth points; runtime {:.2}s",
                report.cells.len(),
                report.truth_points.len(),
                report.runtime_seconds
            ))
        }
        Command::Compare {
            spec,
            seed,
            out_json,
            out_csv,
        } => {
            let text = std::fs::read_to_string(&spec)?;
            let mut spec: ExperimentSpec = serde_json::from_str(&text)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let report = compare_estimators(&spec)?;
            write_json(&out_json, &report)?;
            write_text(&out_csv, &risk_csv(&report))?;
            Ok(format!(
                "{} cells, {} pairwise ratios; runtime {:.2}s",
                report.cells.len(),
                report.ratios.len(),
                report.runtime_seconds
            ))
        }
        Command::Pack {
            body,
            center,
            radius,
            separation,
            probes,
            tuning,
            out_json,
        } => {
            let body = read_body(&body)?;
            let center = match center {
                Some(p) => read_vector(&p)?,
                None => body.center(),
            };
            let cfg = tuning.packing();
            let mut set = greedy_packing(&body, &center, radius, separation, &cfg)?;
            if !verify_packing(&body, &set) {
                return Err(Error::NonConvergence {
                    context: "packing verification",
                    iterations: 0,
                    residual: f64::NAN,
                });
            }
            set.certified_cover_fraction = certify_covering(&body, &set, probes, cfg.seed)?;
            write_json(&out_json, &set)?;
            Ok(format!(
                "{} points, cover fraction {:.4} over {probes} probes",
                set.points.len(),
                set.certified_cover_fraction
            ))
        }
        Command::Lemma4 {
            c_factor,
            delta,
            sigma,
            dim,
            replications,
            seed,
        } => {
            let rep = two_point_error_experiment(c_factor, delta, sigma, dim, replications, seed)?;
            Ok(format!(
                "empirical error {:.6} vs bound {:.6} over {} trials",
                rep.empirical_rate, rep.bound, rep.replications
            ))
        }
    }
}

/// Parses and dispatches; returns the process exit code.
pub fn run_cli<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
