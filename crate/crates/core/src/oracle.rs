//! Brute-force ground truth for small instances: the maximum-mass cluster
//! structure of order `k`, and a checker for the coverage inequality.

use serde::{Deserialize, Serialize};

use crate::bounds::psi;
use crate::error::{Error, Result};
use crate::greedy::{greedy_structure, ClusterStructure, GreedyOptions, StageSelection};
use crate::metric::{FiniteMetricSpace, ScaleParams};
use crate::stats::{alpha_min, beta_min, DEFAULT_ANTICLIQUE_BUDGET};

pub const DEFAULT_ORACLE_LIMIT: usize = 14;
pub const MAX_ORACLE_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub structure: ClusterStructure,
    pub measure: f64,
    pub assignments_explored: u64,
}

/// Exhausts assignments of points to `{outside, cluster 1..k}`.
///
/// Cluster labels are canonical (a new label is always the next unused one),
/// partial assignments that already break a diameter or separation rule are
/// cut, and a remaining-mass bound prunes the rest. Among optimal assignments
/// the lexicographically smallest canonical label vector wins, with
/// "outside" encoded as 0.
pub fn max_structure_bruteforce(
    space: &FiniteMetricSpace,
    params: &ScaleParams,
    limit: usize,
) -> Result<OracleResult> {
    let n = space.n();
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    if params.k > MAX_ORACLE_ORDER {
        return Err(Error::invalid(format!(
            "oracle supports k <= {MAX_ORACLE_ORDER}, got {}",
            params.k
        )));
    }
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + space.weight(i);
    }
    let mut search = Search {
        space,
        k: params.k,
        diam_bound: 2.0 * params.r,
        separation: params.r,
        suffix,
        labels: vec![0; n],
        members: vec![Vec::new(); params.k + 1],
        nodes: 0,
        eps: 1e-12 * space.total_measure(),
    };

    // best value first, searching cluster labels before "outside"
    let mut best = 0.0;
    search.best_value(0, 0, 0.0, &mut best);
    // then the lexicographically first assignment reaching it
    let target = best - search.eps;
    let labels = search
        .first_reaching(0, 0, 0.0, target)
        .expect("the optimum was reached in the first pass");

    let mut clusters = vec![Vec::new(); params.k];
    for (i, &label) in labels.iter().enumerate() {
        if label > 0 {
            clusters[label - 1].push(i);
        }
    }
    let structure = ClusterStructure::new(space, clusters);
    Ok(OracleResult {
        measure: structure.measure,
        structure,
        assignments_explored: search.nodes,
    })
}

struct Search<'a> {
    space: &'a FiniteMetricSpace,
    k: usize,
    diam_bound: f64,
    separation: f64,
    suffix: Vec<f64>,
    labels: Vec<usize>,
    /// `members[c]` for `c >= 1` lists the points with label `c`.
    members: Vec<Vec<usize>>,
    nodes: u64,
    eps: f64,
}

impl Search<'_> {
    fn fits(&self, point: usize, label: usize, used: usize) -> bool {
        let row = self.space.row(point);
        if self.members[label].iter().any(|&j| row[j] > self.diam_bound) {
            return false;
        }
        (1..=used)
            .filter(|&c| c != label)
            .all(|c| self.members[c].iter().all(|&j| row[j] >= self.separation))
    }

    /// Labels to try at `point`, given `used` clusters opened so far.
    fn choices(&self, used: usize) -> impl Iterator<Item = usize> {
        let top = if used < self.k { used + 1 } else { used };
        1..=top
    }

    fn best_value(&mut self, point: usize, used: usize, value: f64, best: &mut f64) {
        self.nodes += 1;
        if value > *best + self.eps {
            *best = value;
        }
        if point == self.labels.len() || value + self.suffix[point] <= *best + self.eps {
            return;
        }
        let w = self.space.weight(point);
        for label in self.choices(used) {
            if self.fits(point, label, used) {
                self.members[label].push(point);
                self.best_value(point + 1, used.max(label), value + w, best);
                self.members[label].pop();
            }
        }
        self.best_value(point + 1, used, value, best);
    }

    fn first_reaching(&mut self, point: usize, used: usize, value: f64, target: f64) -> Option<Vec<usize>> {
        self.nodes += 1;
        if value + self.suffix[point] < target {
            return None;
        }
        if point == self.labels.len() {
            return (value >= target).then(|| self.labels.clone());
        }
        self.labels[point] = 0;
        if let Some(found) = self.first_reaching(point + 1, used, value, target) {
            return Some(found);
        }
        let w = self.space.weight(point);
        for label in self.choices(used) {
            if self.fits(point, label, used) {
                self.labels[point] = label;
                self.members[label].push(point);
                let found = self.first_reaching(point + 1, used.max(label), value + w, target);
                self.members[label].pop();
                if found.is_some() {
                    return found;
                }
            }
        }
        self.labels[point] = 0;
        None
    }
}

/// Outcome of checking `oracle >= psi * mu(X)` and `greedy <= oracle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub alpha: f64,
    pub beta: f64,
    pub psi: f64,
    pub vacuous: bool,
    pub total_measure: f64,
    pub oracle_measure: f64,
    pub greedy_measure: f64,
    pub oracle_ratio: f64,
    /// `oracle >= psi * mu(X)`, or `psi <= 0`.
    pub bound_holds: bool,
    /// `greedy <= oracle`.
    pub dominance_holds: bool,
    /// Whether the space carries the counting measure.
    pub uniform: bool,
}

impl TheoremCheck {
    pub fn passed(&self) -> bool {
        self.bound_holds && self.dominance_holds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub oracle_limit: usize,
    pub anticlique_budget: u64,
    pub greedy: GreedyOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            anticlique_budget: DEFAULT_ANTICLIQUE_BUDGET,
            greedy: GreedyOptions::default(),
        }
    }
}

pub fn verify_theorem(
    space: &FiniteMetricSpace,
    params: &ScaleParams,
    options: &VerifyOptions,
) -> Result<TheoremCheck> {
    let params = params.certified();
    let alpha = alpha_min(space, &params);
    let beta = beta_min(space, &params, options.anticlique_budget)?;
    let bound = psi(alpha, beta, params.k)?;
    let oracle = max_structure_bruteforce(space, &params, options.oracle_limit)?;
    let (greedy, _) = greedy_structure(space, &params, &options.greedy, StageSelection::Heaviest)?;
    let total = space.total_measure();
    let tol = 1e-9 * total;
    Ok(TheoremCheck {
        alpha,
        beta,
        psi: bound.psi,
        vacuous: bound.vacuous,
        total_measure: total,
        oracle_measure: oracle.measure,
        greedy_measure: greedy.measure,
        oracle_ratio: oracle.measure / total,
        bound_holds: bound.vacuous || oracle.measure + tol >= bound.psi * total,
        dominance_holds: greedy.measure <= oracle.measure + tol,
        uniform: space.is_uniform(),
    })
}
