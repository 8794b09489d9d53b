//! Greedy cluster decomposition.
//!
//! Stage `i` takes `X_i`, a maximum-mass set of diameter `<= 2r` among the
//! points still unassigned, and removes its strict `r`-neighbourhood `Z_i`.
//! The `Z_i` partition the space and the `X_i` form valid cluster structures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{diameter, set_distance, FiniteMetricSpace, ScaleParams};

pub const DEFAULT_CLIQUE_BUDGET: u64 = 10_000_000;

/// `k` disjoint clusters (some possibly empty) and their total mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterStructure {
    pub clusters: Vec<Vec<usize>>,
    pub measure: f64,
}

/// First broken rule found by [`ClusterStructure::check`].
#[derive(Debug, Clone, PartialEq)]
pub enum StructureViolation {
    IndexOutOfRange { index: usize },
    Overlap { point: usize },
    Diameter { cluster: usize, diameter: f64 },
    Separation { a: usize, b: usize, distance: f64 },
    Measure { stored: f64, actual: f64 },
}

impl ClusterStructure {
    pub fn new(space: &FiniteMetricSpace, clusters: Vec<Vec<usize>>) -> Self {
        let measure = clusters.iter().map(|c| space.mass(c)).sum();
        ClusterStructure { clusters, measure }
    }

    pub fn order(&self) -> usize {
        self.clusters.len()
    }

    /// Checks disjointness, `diameter <= diam_bound` per cluster and
    /// `set distance >= separation` between every two non-empty clusters.
    pub fn check(
        &self,
        space: &FiniteMetricSpace,
        diam_bound: f64,
        separation: f64,
    ) -> std::result::Result<(), StructureViolation> {
        let mut owner = vec![false; space.n()];
        for cluster in &self.clusters {
            for &i in cluster {
                if i >= space.n() {
                    return Err(StructureViolation::IndexOutOfRange { index: i });
                }
                if std::mem::replace(&mut owner[i], true) {
                    return Err(StructureViolation::Overlap { point: i });
                }
            }
        }
        for (c, cluster) in self.clusters.iter().enumerate() {
            let d = diameter(space, cluster).expect("indices checked");
            if d > diam_bound {
                return Err(StructureViolation::Diameter { cluster: c, diameter: d });
            }
        }
        for a in 0..self.clusters.len() {
            for b in (a + 1)..self.clusters.len() {
                let (ca, cb) = (&self.clusters[a], &self.clusters[b]);
                if ca.is_empty() || cb.is_empty() {
                    continue;
                }
                let d = set_distance(space, ca, cb).expect("non-empty, checked");
                if d < separation {
                    return Err(StructureViolation::Separation { a, b, distance: d });
                }
            }
        }
        let actual: f64 = self.clusters.iter().map(|c| space.mass(c)).sum();
        if (actual - self.measure).abs() > 1e-9 * space.total_measure() {
            return Err(StructureViolation::Measure {
                stored: self.measure,
                actual,
            });
        }
        Ok(())
    }

    /// Validity as an `r`-cluster structure: diameters `<= 2r`, separation `>= r`.
    pub fn validate(
        &self,
        space: &FiniteMetricSpace,
        params: &ScaleParams,
    ) -> std::result::Result<(), StructureViolation> {
        self.check(space, 2.0 * params.r, params.r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    /// `X_i`, sorted.
    pub cluster: Vec<usize>,
    /// `Z_i`, sorted; contains `cluster`.
    pub neighborhood: Vec<usize>,
    pub cluster_measure: f64,
    pub neighborhood_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyDecomposition {
    pub stages: Vec<Stage>,
    /// False when some stage accepted a budget-limited incumbent.
    pub exact: bool,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Node budget per max-cluster search.
    pub budget: u64,
    /// Accept the incumbent when a search runs out of budget.
    pub approx: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions {
            budget: DEFAULT_CLIQUE_BUDGET,
            approx: false,
        }
    }
}

/// Which stage clusters form the structure of order `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageSelection {
    /// The `k` heaviest stage clusters, ties to the earlier stage.
    #[default]
    Heaviest,
    /// The first `k` stages.
    First,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxCluster {
    pub members: Vec<usize>,
    pub measure: f64,
    pub nodes: u64,
}

/// Maximum-mass subset of `active` with diameter `<= diam_bound`, i.e. a
/// maximum-weight clique of the graph with edges `d <= diam_bound`.
///
/// Branch and bound over vertices in increasing index order with a greedy
/// colouring bound. Sets are visited in lexicographic order and the incumbent
/// only moves on strict improvement, so among optima the lexicographically
/// smallest sorted index sequence is returned.
pub fn max_cluster(
    space: &FiniteMetricSpace,
    active: &[usize],
    diam_bound: f64,
    budget: u64,
) -> Result<MaxCluster> {
    if active.is_empty() {
        return Err(Error::invalid("max_cluster needs a non-empty active set"));
    }
    if budget == 0 {
        return Err(Error::invalid("budget must be positive"));
    }
    space.check_indices(active)?;
    let mut verts = active.to_vec();
    verts.sort_unstable();
    verts.dedup();
    let m = verts.len();
    let adj: Vec<Vec<bool>> = verts
        .iter()
        .map(|&i| verts.iter().map(|&j| space.dist(i, j) <= diam_bound).collect())
        .collect();
    let weights: Vec<f64> = verts.iter().map(|&i| space.weight(i)).collect();

    let mut search = CliqueSearch {
        adj: &adj,
        weights: &weights,
        budget,
        nodes: 0,
        best: Vec::new(),
        best_weight: 0.0,
        eps: 1e-12 * space.total_measure(),
        current: Vec::new(),
    };
    let all: Vec<usize> = (0..m).collect();
    let complete = search.run(0.0, &all);
    let members: Vec<usize> = search.best.iter().map(|&a| verts[a]).collect();
    if !complete {
        return Err(Error::ClusterBudgetExceeded {
            nodes: search.nodes,
            best_so_far: members,
        });
    }
    Ok(MaxCluster {
        measure: space.mass(&members),
        members,
        nodes: search.nodes,
    })
}

struct CliqueSearch<'a> {
    adj: &'a [Vec<bool>],
    weights: &'a [f64],
    budget: u64,
    nodes: u64,
    best: Vec<usize>,
    best_weight: f64,
    eps: f64,
    current: Vec<usize>,
}

impl CliqueSearch<'_> {
    fn run(&mut self, weight: f64, candidates: &[usize]) -> bool {
        let bounds = self.suffix_bounds(candidates);
        for (pos, &v) in candidates.iter().enumerate() {
            if weight + bounds[pos] <= self.best_weight + self.eps {
                break;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return false;
            }
            let extended = weight + self.weights[v];
            self.current.push(v);
            if extended > self.best_weight + self.eps {
                self.best.clone_from(&self.current);
                self.best_weight = extended;
            }
            let row = &self.adj[v];
            let next: Vec<usize> = candidates[pos + 1..]
                .iter()
                .copied()
                .filter(|&u| row[u])
                .collect();
            if !next.is_empty() && !self.run(extended, &next) {
                return false;
            }
            self.current.pop();
        }
        true
    }

    /// `bounds[p]` bounds the clique weight inside `candidates[p..]`: colour
    /// the suffix greedily into independent sets and add each set's heaviest
    /// vertex. Capped by the plain suffix mass.
    fn suffix_bounds(&self, candidates: &[usize]) -> Vec<f64> {
        let mut bounds = vec![0.0; candidates.len()];
        let mut classes: Vec<(Vec<usize>, f64)> = Vec::new();
        let mut colour_sum = 0.0;
        let mut plain_sum = 0.0;
        for (pos, &v) in candidates.iter().enumerate().rev() {
            let w = self.weights[v];
            plain_sum += w;
            let row = &self.adj[v];
            match classes
                .iter_mut()
                .find(|(members, _)| members.iter().all(|&u| !row[u]))
            {
                Some((members, max_w)) => {
                    members.push(v);
                    if w > *max_w {
                        colour_sum += w - *max_w;
                        *max_w = w;
                    }
                }
                None => {
                    classes.push((vec![v], w));
                    colour_sum += w;
                }
            }
            bounds[pos] = colour_sum.min(plain_sum);
        }
        bounds
    }
}

/// Runs the greedy stages until every point is assigned.
pub fn greedy_decomposition(
    space: &FiniteMetricSpace,
    params: &ScaleParams,
    options: &GreedyOptions,
) -> Result<GreedyDecomposition> {
    let diam_bound = 2.0 * params.r;
    let mut remaining: Vec<usize> = (0..space.n()).collect();
    let mut stages = Vec::new();
    let mut exact = true;
    let mut nodes = 0u64;
    while !remaining.is_empty() {
        let cluster = match max_cluster(space, &remaining, diam_bound, options.budget) {
            Ok(found) => {
                nodes += found.nodes;
                found.members
            }
            Err(Error::ClusterBudgetExceeded {
                nodes: spent,
                best_so_far,
            }) if options.approx => {
                exact = false;
                nodes += spent;
                best_so_far
            }
            Err(e) => return Err(e),
        };
        let (neighborhood, rest): (Vec<usize>, Vec<usize>) = remaining
            .iter()
            .partition(|&&z| cluster.iter().any(|&x| space.dist(z, x) < params.r));
        stages.push(Stage {
            cluster_measure: space.mass(&cluster),
            neighborhood_measure: space.mass(&neighborhood),
            cluster,
            neighborhood,
        });
        remaining = rest;
    }
    Ok(GreedyDecomposition {
        stages,
        exact,
        nodes,
    })
}

/// Picks `k` stage clusters, padding with empty clusters when there are fewer
/// stages than `k`. The chosen clusters keep their stage order.
pub fn structure_from_decomposition(
    space: &FiniteMetricSpace,
    params: &ScaleParams,
    decomposition: &GreedyDecomposition,
    selection: StageSelection,
) -> ClusterStructure {
    let k = params.k;
    let mut chosen: Vec<usize> = (0..decomposition.stages.len()).collect();
    if selection == StageSelection::Heaviest {
        chosen.sort_by(|&a, &b| {
            let (ma, mb) = (
                decomposition.stages[a].cluster_measure,
                decomposition.stages[b].cluster_measure,
            );
            mb.total_cmp(&ma).then(a.cmp(&b))
        });
    }
    chosen.truncate(k);
    chosen.sort_unstable();
    let mut clusters: Vec<Vec<usize>> = chosen
        .into_iter()
        .map(|s| decomposition.stages[s].cluster.clone())
        .collect();
    clusters.resize(k, Vec::new());
    ClusterStructure::new(space, clusters)
}

/// Greedy structure of order `k` together with the decomposition behind it.
pub fn greedy_structure(
    space: &FiniteMetricSpace,
    params: &ScaleParams,
    options: &GreedyOptions,
    selection: StageSelection,
) -> Result<(ClusterStructure, GreedyDecomposition)> {
    let decomposition = greedy_decomposition(space, params, options)?;
    let structure = structure_from_decomposition(space, params, &decomposition, selection);
    Ok((structure, decomposition))
}
