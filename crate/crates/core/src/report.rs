//! End-to-end certification: statistics, greedy structure, bound and an
//! optional brute-force cross-check, gathered in one versioned report.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{psi, BoundReport, Provenance};
use crate::error::{Error, Result};
use crate::greedy::{greedy_structure, ClusterStructure, GreedyOptions, Stage, StageSelection};
use crate::io::space_to_json;
use crate::metric::{FiniteMetricSpace, ScaleParams};
use crate::oracle::{max_structure_bruteforce, OracleResult, DEFAULT_ORACLE_LIMIT};
use crate::stats::{compute_stats, BetaMethod, StatsMethod, StatsReport};
use crate::workers::Workers;

pub const SCHEMA: &str = "cert-report/1";
pub const DEFAULT_HISTOGRAM_BINS: usize = 8;

/// SHA-256 of the canonical (full-matrix) JSON form of a space.
pub fn space_digest(space: &FiniteMetricSpace) -> String {
    hex::encode(Sha256::digest(space_to_json(space, false).as_bytes()))
}

/// SHA-256 of arbitrary input bytes, e.g. the file a space was read from.
pub fn bytes_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    /// Use this `alpha` instead of the computed tightest one.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub greedy: GreedyOptions,
    pub beta_method: BetaMethod,
    pub histogram_bins: usize,
    /// Also run the exhaustive search (small spaces only).
    pub oracle: bool,
    pub oracle_limit: usize,
    pub selection: StageSelection,
    pub workers: Workers,
    pub timings: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            alpha: None,
            beta: None,
            greedy: GreedyOptions::default(),
            beta_method: BetaMethod::default(),
            histogram_bins: DEFAULT_HISTOGRAM_BINS,
            oracle: false,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            selection: StageSelection::Heaviest,
            workers: Workers::default(),
            timings: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub r: f64,
    pub k: usize,
    pub tolerance: f64,
    pub medium_multiplier: f64,
    pub approx: bool,
    pub clique_budget: u64,
    pub selection: StageSelection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyReport {
    pub structure: ClusterStructure,
    /// False if any stage used a budget-limited incumbent.
    pub exact: bool,
    pub nodes: u64,
    pub stages: Vec<Stage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub size: usize,
    pub measure: f64,
    pub fraction: f64,
    /// Holds less than `1/k` of the total mass.
    pub low_coverage: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub stats_s: f64,
    pub greedy_s: f64,
    pub bound_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_s: Option<f64>,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub schema: String,
    pub input_digest: String,
    pub n: usize,
    pub total_measure: f64,
    pub params: ReportParams,
    pub stats: StatsReport,
    pub bound: BoundReport,
    pub greedy: GreedyReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleResult>,
    pub coverage_ratio: f64,
    pub clusters: Vec<ClusterSummary>,
    /// Every cluster of the structure holds less than `1/k` of the mass.
    pub low_coverage: bool,
    /// The `alpha` / `beta` fed to the bound are at least the tightest ones,
    /// so the bound applies. A Monte Carlo `beta` is compared as estimated.
    pub hypotheses_hold: bool,
    /// Medium edges were classified with a multiplier other than 3; the
    /// bound is then not a certificate.
    pub exploratory: bool,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl CertReport {
    /// Pretty JSON; the same report always gives the same bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

fn check_override(name: &str, value: Option<f64>) -> Result<()> {
    match value {
        Some(v) if !(v.is_finite() && v >= 0.0) => {
            Err(Error::invalid(format!("{name} must be finite and >= 0, got {v}")))
        }
        _ => Ok(()),
    }
}

/// Runs the whole pipeline on `space`. The digest is computed from the space
/// itself; use [`certify_with_digest`] to hash the raw input instead.
pub fn certify(space: &FiniteMetricSpace, params: &ScaleParams, options: &CertifyOptions) -> Result<CertReport> {
    certify_with_digest(space, params, options, space_digest(space))
}

pub fn certify_with_digest(
    space: &FiniteMetricSpace,
    params: &ScaleParams,
    options: &CertifyOptions,
    input_digest: String,
) -> Result<CertReport> {
    check_override("alpha", options.alpha)?;
    check_override("beta", options.beta)?;
    options
        .workers
        .install(|| run(space, params, options, input_digest))
}

fn run(
    space: &FiniteMetricSpace,
    params: &ScaleParams,
    options: &CertifyOptions,
    input_digest: String,
) -> Result<CertReport> {
    let start = Instant::now();
    let stats = compute_stats(space, params, options.beta_method, options.histogram_bins)?;
    let stats_s = start.elapsed().as_secs_f64();

    let t = Instant::now();
    let (structure, decomposition) = greedy_structure(space, params, &options.greedy, options.selection)?;
    let greedy_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let computed_source = match stats.method {
        StatsMethod::Exact => Provenance::Computed,
        StatsMethod::MonteCarlo => Provenance::Estimated,
    };
    let (alpha, alpha_source) = match options.alpha {
        Some(a) => (a, Provenance::Supplied),
        None => (stats.alpha_min, Provenance::Computed),
    };
    let (beta, beta_source) = match options.beta {
        Some(b) => (b, Provenance::Supplied),
        None => (stats.beta_min, computed_source),
    };
    let mut bound = psi(alpha, beta, params.k)?;
    bound.inputs.alpha_source = alpha_source;
    bound.inputs.beta_source = beta_source;
    let bound_s = t.elapsed().as_secs_f64();

    let (oracle, oracle_s) = if options.oracle {
        let t = Instant::now();
        let found = max_structure_bruteforce(space, params, options.oracle_limit)?;
        (Some(found), Some(t.elapsed().as_secs_f64()))
    } else {
        (None, None)
    };

    let total = space.total_measure();
    let coverage_ratio = structure.measure / total;
    let share = 1.0 / params.k as f64;
    let clusters: Vec<ClusterSummary> = structure
        .clusters
        .iter()
        .map(|c| {
            let measure = space.mass(c);
            ClusterSummary {
                size: c.len(),
                measure,
                fraction: measure / total,
                low_coverage: measure / total < share,
            }
        })
        .collect();
    let low_coverage = clusters.iter().all(|c| c.low_coverage);
    let hypotheses_hold = alpha >= stats.alpha_min && beta >= stats.beta_min;
    let exploratory = params.medium_multiplier != ScaleParams::CERTIFIED_MEDIUM_MULTIPLIER;
    let certified = bound.vacuous || coverage_ratio >= bound.psi;

    let timings = options.timings.then(|| Timings {
        stats_s,
        greedy_s,
        bound_s,
        oracle_s,
        total_s: start.elapsed().as_secs_f64(),
    });

    Ok(CertReport {
        schema: SCHEMA.to_string(),
        input_digest,
        n: space.n(),
        total_measure: total,
        params: ReportParams {
            r: params.r,
            k: params.k,
            tolerance: params.tolerance,
            medium_multiplier: params.medium_multiplier,
            approx: options.greedy.approx,
            clique_budget: options.greedy.budget,
            selection: options.selection,
        },
        stats,
        bound,
        greedy: GreedyReport {
            structure,
            exact: decomposition.exact,
            nodes: decomposition.nodes,
            stages: decomposition.stages,
        },
        oracle,
        coverage_ratio,
        clusters,
        low_coverage,
        hypotheses_hold,
        exploratory,
        certified,
        timings,
    })
}
