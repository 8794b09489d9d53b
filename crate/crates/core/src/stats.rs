//! Distance-distribution statistics: medium-edge mass, anticlique mass and
//! the tightest `alpha` / `beta` they imply.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{classify_edge, EdgeClass, FiniteMetricSpace, ScaleParams};

pub const DEFAULT_ANTICLIQUE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatsMethod {
    Exact,
    MonteCarlo,
}

/// One bin `(lower, upper]` of the weighted pair-distance histogram. The first
/// bin is closed at zero; `upper = None` means unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: Option<f64>,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub medium_measure: f64,
    pub anticlique_measure: f64,
    pub alpha_min: f64,
    pub beta_min: f64,
    pub method: StatsMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anticlique_nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    /// 95% normal-approximation half-width around the Monte Carlo `beta_min`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_halfwidth: Option<f64>,
    pub histogram: Vec<HistogramBin>,
}

/// How `beta_min` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaMethod {
    Exact { budget: u64 },
    MonteCarlo { samples: u64, seed: u64 },
    /// Exact, falling back to sampling when the budget runs out.
    ExactOrSampled { budget: u64, samples: u64, seed: u64 },
}

impl Default for BetaMethod {
    fn default() -> Self {
        BetaMethod::Exact {
            budget: DEFAULT_ANTICLIQUE_BUDGET,
        }
    }
}

/// `M(X)`: mass of unordered pairs `{i, j}` with `r < d <= 3r`.
pub fn medium_measure(space: &FiniteMetricSpace, params: &ScaleParams) -> f64 {
    class_masses(space, params)[1]
}

/// Unordered-pair mass of the short, medium and long classes.
pub fn class_masses(space: &FiniteMetricSpace, params: &ScaleParams) -> [f64; 3] {
    let mut masses = [0.0; 3];
    let n = space.n();
    for i in 0..n {
        let row = space.row(i);
        let wi = space.weight(i);
        for j in (i + 1)..n {
            let slot = match classify_edge(row[j], params) {
                EdgeClass::Short => 0,
                EdgeClass::Medium => 1,
                EdgeClass::Long => 2,
            };
            masses[slot] += wi * space.weight(j);
        }
    }
    masses
}

/// Tightest `alpha` with `M(X) <= alpha mu(X)^2 / 2`.
pub fn alpha_min(space: &FiniteMetricSpace, params: &ScaleParams) -> f64 {
    let total = space.total_measure();
    2.0 * medium_measure(space, params) / (total * total)
}

/// Result of the exact anticlique enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnticliqueCount {
    /// `T_{k+1}(X)`: sum over unordered anticliques of the product of masses.
    pub measure: f64,
    pub nodes: u64,
}

/// Exact `T_{k+1}(X)` by depth-first extension in increasing index order over
/// the graph of non-short pairs.
///
/// Fans out over the first vertex on the current rayon pool; partial sums are
/// folded in index order so the value does not depend on the pool size.
pub fn anticlique_measure_exact(
    space: &FiniteMetricSpace,
    params: &ScaleParams,
    budget: u64,
) -> Result<AnticliqueCount> {
    anticlique_measure_of_order(space, params, params.k + 1, budget)
}

/// Same as [`anticlique_measure_exact`] for an arbitrary order `s >= 1`.
pub fn anticlique_measure_of_order(
    space: &FiniteMetricSpace,
    params: &ScaleParams,
    order: usize,
    budget: u64,
) -> Result<AnticliqueCount> {
    if budget == 0 {
        return Err(Error::invalid("budget must be positive"));
    }
    if order == 0 {
        return Ok(AnticliqueCount { measure: 1.0, nodes: 0 });
    }
    let n = space.n();
    let far: Vec<Vec<bool>> = (0..n)
        .map(|i| space.row(i).iter().map(|&d| params.is_far(d)).collect())
        .collect();

    let partials: Vec<(f64, u64, bool)> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut walk = AnticliqueWalk {
                far: &far,
                weights: space.weights(),
                order,
                budget,
                nodes: 1,
                measure: 0.0,
            };
            let candidates: Vec<usize> = ((first + 1)..n).filter(|&v| far[first][v]).collect();
            let ok = walk.extend(1, space.weight(first), &candidates);
            (walk.measure, walk.nodes, ok)
        })
        .collect();

    let mut measure = 0.0;
    let mut nodes = 0u64;
    let mut aborted = false;
    for (m, c, ok) in partials {
        measure += m;
        nodes = nodes.saturating_add(c);
        aborted |= !ok;
    }
    if aborted || nodes > budget {
        return Err(Error::BudgetExceeded { nodes });
    }
    Ok(AnticliqueCount { measure, nodes })
}

struct AnticliqueWalk<'a> {
    far: &'a [Vec<bool>],
    weights: &'a [f64],
    order: usize,
    budget: u64,
    nodes: u64,
    measure: f64,
}

impl AnticliqueWalk<'_> {
    /// Returns false once the node budget is exhausted.
    fn extend(&mut self, depth: usize, product: f64, candidates: &[usize]) -> bool {
        if depth == self.order {
            self.measure += product;
            return true;
        }
        let needed = self.order - depth;
        if candidates.len() < needed {
            return true;
        }
        if needed == 1 {
            self.nodes += candidates.len() as u64;
            let mass: f64 = candidates.iter().map(|&v| self.weights[v]).sum();
            self.measure += product * mass;
            return self.nodes <= self.budget;
        }
        for (pos, &v) in candidates.iter().enumerate() {
            if candidates.len() - pos < needed {
                break;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return false;
            }
            let row = &self.far[v];
            let next: Vec<usize> = candidates[pos + 1..]
                .iter()
                .copied()
                .filter(|&u| row[u])
                .collect();
            if !self.extend(depth + 1, product * self.weights[v], &next) {
                return false;
            }
        }
        true
    }
}

/// `(k + 1)!` as a float.
pub fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

/// `beta` that makes the anticlique inequality tight, from a known `T_{k+1}`.
pub fn beta_from_measure(space: &FiniteMetricSpace, params: &ScaleParams, measure: f64) -> f64 {
    let order = params.k + 1;
    factorial(order) * measure / space.total_measure().powi(order as i32)
}

/// Tightest `beta` with `T_{k+1}(X) <= beta mu(X)^{k+1} / (k + 1)!`.
pub fn beta_min(space: &FiniteMetricSpace, params: &ScaleParams, budget: u64) -> Result<f64> {
    let count = anticlique_measure_exact(space, params, budget)?;
    Ok(beta_from_measure(space, params, count.measure))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Unbiased estimate of `beta_min`.
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
}

/// Samples ordered `(k + 1)`-tuples with independent coordinates drawn
/// proportionally to mass. The hit indicator "all pairs non-short" has mean
/// exactly `beta_min`; tuples that repeat a point never hit.
pub fn anticlique_measure_mc(
    space: &FiniteMetricSpace,
    params: &ScaleParams,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::invalid("at least one sample is required"));
    }
    let sampler = WeightedIndex::new(space.weights())
        .map_err(|e| Error::invalid(format!("cannot sample from weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = params.k + 1;
    let mut tuple = vec![0usize; order];
    let mut hits = 0u64;
    for _ in 0..samples {
        for slot in tuple.iter_mut() {
            *slot = sampler.sample(&mut rng);
        }
        let is_anticlique = (0..order)
            .all(|a| ((a + 1)..order).all(|b| params.is_far(space.dist(tuple[a], tuple[b]))));
        if is_anticlique {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        hits,
    })
}

/// Elementary symmetric polynomial `sigma_s` by the prefix recurrence
/// `e_s(y_1..y_m) = e_s(y_1..y_{m-1}) + y_m e_{s-1}(y_1..y_{m-1})`.
pub fn sym_poly(values: &[f64], s: usize) -> f64 {
    if s > values.len() {
        return 0.0;
    }
    let mut e = vec![0.0; s + 1];
    e[0] = 1.0;
    for (m, &y) in values.iter().enumerate() {
        for j in (1..=s.min(m + 1)).rev() {
            e[j] += y * e[j - 1];
        }
    }
    e[s]
}

/// Weighted unordered-pair histogram. The cut points `r` and `3r` are always
/// present; `bins - 3` extra equal-width cuts over `[0, max distance]` refine
/// it.
pub fn distance_histogram(
    space: &FiniteMetricSpace,
    params: &ScaleParams,
    bins: usize,
) -> Result<Vec<HistogramBin>> {
    if bins < 3 {
        return Err(Error::invalid("a histogram needs at least 3 bins"));
    }
    let n = space.n();
    let max_d = (0..n)
        .flat_map(|i| space.row(i).iter().copied())
        .fold(0.0f64, f64::max);
    let mut cuts = vec![params.short_limit(), params.medium_limit()];
    let extra = bins - 3;
    for i in 1..=extra {
        cuts.push(max_d * i as f64 / (extra + 1) as f64);
    }
    cuts.retain(|c| *c > 0.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut mass = vec![0.0; cuts.len() + 1];
    for i in 0..n {
        let row = space.row(i);
        for j in (i + 1)..n {
            let slot = cuts.partition_point(|&c| c < row[j]);
            mass[slot] += space.weight(i) * space.weight(j);
        }
    }
    Ok(mass
        .into_iter()
        .enumerate()
        .map(|(b, mass)| HistogramBin {
            lower: if b == 0 { 0.0 } else { cuts[b - 1] },
            upper: cuts.get(b).copied(),
            mass,
        })
        .collect())
}

/// Builds the full statistics block.
pub fn compute_stats(
    space: &FiniteMetricSpace,
    params: &ScaleParams,
    method: BetaMethod,
    bins: usize,
) -> Result<StatsReport> {
    let medium = medium_measure(space, params);
    let total = space.total_measure();
    let alpha = 2.0 * medium / (total * total);
    let histogram = distance_histogram(space, params, bins)?;
    let order = params.k + 1;
    let sampled = |samples: u64, seed: u64| -> Result<StatsReport> {
        let est = anticlique_measure_mc(space, params, samples, seed)?;
        Ok(StatsReport {
            medium_measure: medium,
            anticlique_measure: est.estimate * total.powi(order as i32) / factorial(order),
            alpha_min: alpha,
            beta_min: est.estimate,
            method: StatsMethod::MonteCarlo,
            anticlique_nodes: None,
            mc_samples: Some(samples),
            std_error: Some(est.std_error),
            ci_halfwidth: Some(1.96 * est.std_error),
            histogram: histogram.clone(),
        })
    };
    let exact = |budget: u64| -> Result<StatsReport> {
        let count = anticlique_measure_exact(space, params, budget)?;
        Ok(StatsReport {
            medium_measure: medium,
            anticlique_measure: count.measure,
            alpha_min: alpha,
            beta_min: beta_from_measure(space, params, count.measure),
            method: StatsMethod::Exact,
            anticlique_nodes: Some(count.nodes),
            mc_samples: None,
            std_error: None,
            ci_halfwidth: None,
            histogram: histogram.clone(),
        })
    };
    match method {
        BetaMethod::Exact { budget } => exact(budget),
        BetaMethod::MonteCarlo { samples, seed } => sampled(samples, seed),
        BetaMethod::ExactOrSampled {
            budget,
            samples,
            seed,
        } => match exact(budget) {
            Err(Error::BudgetExceeded { .. }) => sampled(samples, seed),
            other => other,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{validate_space, RawSpace};
    use proptest::prelude::*;

    fn space_from_rows(rows: Vec<Vec<f64>>) -> FiniteMetricSpace {
        validate_space(RawSpace {
            distances: rows,
            ..Default::default()
        })
        .unwrap()
    }

    fn equilateral(d: f64) -> FiniteMetricSpace {
        space_from_rows(vec![vec![0.0, d, d], vec![d, 0.0, d], vec![d, d, 0.0]])
    }

    /// Groups of `m` points, `2 r'` within a group and `r'` across.
    fn grouped(s: usize, m: usize, r_prime: f64) -> FiniteMetricSpace {
        let n = s * m;
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match (i == j, i / m == j / m) {
                        (true, _) => 0.0,
                        (false, true) => 2.0 * r_prime,
                        (false, false) => r_prime,
                    })
                    .collect()
            })
            .collect();
        space_from_rows(rows)
    }

    fn random_space(n: usize, seed: u64, weighted: bool) -> FiniteMetricSpace {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = rng.random_range(0.0..3.0);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        let weights = weighted.then(|| (0..n).map(|_| rng.random_range(0.2..3.0)).collect());
        FiniteMetricSpace::from_flat(n, dist, weights, None).unwrap()
    }

    /// Independent oracle: weighted count over all ordered tuples.
    fn ordered_tuple_mass(space: &FiniteMetricSpace, params: &ScaleParams) -> f64 {
        let n = space.n();
        let order = params.k + 1;
        let mut idx = vec![0usize; order];
        let mut total = 0.0;
        loop {
            let ok = (0..order).all(|a| {
                ((a + 1)..order).all(|b| space.dist(idx[a], idx[b]) > params.r)
            });
            if ok {
                total += idx.iter().map(|&i| space.weight(i)).product::<f64>();
            }
            let mut pos = 0;
            loop {
                if pos == order {
                    return total;
                }
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    fn p(r: f64, k: usize) -> ScaleParams {
        ScaleParams::new(r, k).unwrap()
    }

    #[test]
    fn medium_measure_examples() {
        let s = space_from_rows(vec![
            vec![0.0, 2.0, 2.0],
            vec![2.0, 0.0, 4.0],
            vec![2.0, 4.0, 0.0],
        ]);
        assert_eq!(medium_measure(&s, &p(1.0, 2)), 2.0);
        let g = grouped(2, 2, 2.0);
        assert_eq!(medium_measure(&g, &p(1.0, 2)), 4.0);
        assert_eq!(alpha_min(&g, &p(1.0, 2)), 0.5);
        let single = space_from_rows(vec![vec![0.0]]);
        assert_eq!(alpha_min(&single, &p(1.0, 2)), 0.0);
    }

    #[test]
    fn anticlique_examples() {
        let tri = equilateral(2.0);
        let count = anticlique_measure_exact(&tri, &p(1.0, 2), 1000).unwrap();
        assert_eq!(count.measure, 1.0);
        assert_eq!(beta_min(&tri, &p(1.0, 2), 1000).unwrap(), 2.0 / 9.0);
        // fewer than k + 1 points
        let pair = space_from_rows(vec![vec![0.0, 5.0], vec![5.0, 0.0]]);
        assert_eq!(beta_min(&pair, &p(1.0, 2), 10).unwrap(), 0.0);
    }

    #[test]
    fn anticlique_budget_is_enforced() {
        let g = grouped(4, 3, 2.0);
        let err = anticlique_measure_exact(&g, &p(1.0, 2), 5).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert!(anticlique_measure_exact(&g, &p(1.0, 2), 0).is_err());
    }

    #[test]
    fn empty_short_graph_gives_binomial_count() {
        // with r < r' every pair is far, so every triple is an anticlique
        let g = grouped(3, 2, 2.0);
        let count = anticlique_measure_exact(&g, &p(1.0, 2), 10_000).unwrap();
        assert_eq!(count.measure, 20.0);
    }

    #[test]
    fn exact_matches_ordered_tuple_oracle() {
        for seed in 0..20 {
            for k in [2, 3] {
                let params = p(1.0, k);
                let s = random_space(8, seed, false);
                let exact = anticlique_measure_exact(&s, &params, u64::MAX).unwrap().measure;
                assert_eq!(exact * factorial(k + 1), ordered_tuple_mass(&s, &params));

                let w = random_space(7, seed + 100, true);
                let exact = anticlique_measure_exact(&w, &params, u64::MAX).unwrap().measure;
                let oracle = ordered_tuple_mass(&w, &params);
                assert!((exact * factorial(k + 1) - oracle).abs() <= 1e-12 * oracle.max(1.0));
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_the_sum() {
        let s = random_space(30, 9, true);
        let params = p(1.0, 3);
        let one = crate::Workers::new(1)
            .install(|| anticlique_measure_exact(&s, &params, u64::MAX).unwrap());
        let four = crate::Workers::new(4)
            .install(|| anticlique_measure_exact(&s, &params, u64::MAX).unwrap());
        assert_eq!(one.measure.to_bits(), four.measure.to_bits());
        assert_eq!(one.nodes, four.nodes);
    }

    #[test]
    fn monte_carlo_all_far_three_points() {
        // exact mean is 6/27: the three draws must be distinct
        let tri = equilateral(2.0);
        let est = anticlique_measure_mc(&tri, &p(1.0, 2), 200_000, 3).unwrap();
        assert!((est.estimate - 2.0 / 9.0).abs() <= 4.0 * est.std_error);
        let again = anticlique_measure_mc(&tri, &p(1.0, 2), 200_000, 3).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn monte_carlo_zero_when_no_anticlique() {
        let tight = equilateral(0.5);
        let est = anticlique_measure_mc(&tight, &p(1.0, 2), 1000, 11).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.std_error, 0.0);
        assert!(anticlique_measure_mc(&tight, &p(1.0, 2), 0, 1).is_err());
    }

    #[test]
    fn sym_poly_examples() {
        assert_eq!(sym_poly(&[1.0, 2.0, 3.0], 1), 6.0);
        assert_eq!(sym_poly(&[1.0, 1.0, 1.0, 1.0], 3), 4.0);
        assert!((sym_poly(&[0.3, 0.3, 0.4], 2) - 0.33).abs() < 1e-15);
        assert_eq!(sym_poly(&[5.0, 7.0], 0), 1.0);
        assert_eq!(sym_poly(&[5.0, 7.0], 3), 0.0);
        assert_eq!(sym_poly(&[], 0), 1.0);
    }

    #[test]
    fn histogram_examples() {
        let params = p(1.0, 2);
        let single = space_from_rows(vec![vec![0.0]]);
        let h = distance_histogram(&single, &params, 3).unwrap();
        assert_eq!(h.len(), 3);
        assert!(h.iter().all(|b| b.mass == 0.0));

        let h = distance_histogram(&equilateral(2.0), &params, 3).unwrap();
        assert_eq!(h.iter().map(|b| b.mass).collect::<Vec<_>>(), vec![0.0, 3.0, 0.0]);
        assert_eq!(h[1].lower, 1.0);
        assert_eq!(h[1].upper, Some(3.0));
        assert_eq!(h[2].upper, None);

        let h = distance_histogram(&grouped(2, 2, 2.0), &params, 3).unwrap();
        assert_eq!(h.iter().map(|b| b.mass).collect::<Vec<_>>(), vec![0.0, 4.0, 2.0]);

        assert!(distance_histogram(&single, &params, 2).is_err());
    }

    #[test]
    fn refined_histogram_keeps_canonical_cuts() {
        let s = random_space(12, 5, true);
        let params = p(0.7, 2);
        let h = distance_histogram(&s, &params, 12).unwrap();
        let uppers: Vec<f64> = h.iter().filter_map(|b| b.upper).collect();
        assert!(uppers.contains(&0.7));
        assert!(uppers.contains(&(3.0 * 0.7)));
        let medium: f64 = h
            .iter()
            .filter(|b| b.lower >= 0.7 && b.upper.is_some_and(|u| u <= 2.1))
            .map(|b| b.mass)
            .sum();
        assert!((medium - medium_measure(&s, &params)).abs() < 1e-9);
    }

    #[test]
    fn compute_stats_falls_back_to_sampling() {
        let g = grouped(4, 3, 2.0);
        let params = p(1.0, 2);
        let report = compute_stats(
            &g,
            &params,
            BetaMethod::ExactOrSampled { budget: 3, samples: 1000, seed: 1 },
            3,
        )
        .unwrap();
        assert_eq!(report.method, StatsMethod::MonteCarlo);
        assert!(report.ci_halfwidth.is_some());
        let report = compute_stats(&g, &params, BetaMethod::default(), 3).unwrap();
        assert_eq!(report.method, StatsMethod::Exact);
        assert!(report.ci_halfwidth.is_none());
    }

    proptest! {
        #[test]
        fn sym_poly_matches_subset_enumeration(
            values in proptest::collection::vec(-2.0f64..2.0, 0..=12),
        ) {
            let n = values.len();
            for s in 0..=n + 1 {
                let mut brute = 0.0;
                for mask in 0u32..(1 << n) {
                    if mask.count_ones() as usize == s {
                        brute += (0..n).filter(|i| mask >> i & 1 == 1).map(|i| values[i]).product::<f64>();
                    }
                }
                let dp = sym_poly(&values, s);
                prop_assert!((dp - brute).abs() <= 1e-12 * brute.abs().max(1.0));
            }
        }

        #[test]
        fn histogram_sums_to_pair_mass(n in 1usize..10, seed in any::<u64>(), bins in 3usize..15) {
            let s = random_space(n, seed, true);
            let h = distance_histogram(&s, &p(0.8, 2), bins).unwrap();
            let total: f64 = h.iter().map(|b| b.mass).sum();
            let mu = s.total_measure();
            let sq: f64 = s.weights().iter().map(|w| w * w).sum();
            let expected = 0.5 * (mu * mu - sq);
            prop_assert!((total - expected).abs() <= 1e-9 * expected.max(1.0));
        }

        #[test]
        fn alpha_and_beta_are_scale_covariant(
            n in 1usize..9,
            seed in any::<u64>(),
            factor in prop_oneof![Just(0.25), Just(0.5), Just(2.0), Just(8.0)],
        ) {
            let s = random_space(n, seed, true);
            let scaled = FiniteMetricSpace::from_flat(
                n,
                (0..n).flat_map(|i| s.row(i).iter().map(|d| d * factor).collect::<Vec<_>>()).collect(),
                Some(s.weights().to_vec()),
                None,
            ).unwrap();
            let params = p(1.0, 2);
            let scaled_params = p(factor, 2);
            prop_assert_eq!(alpha_min(&s, &params), alpha_min(&scaled, &scaled_params));
            prop_assert_eq!(
                beta_min(&s, &params, u64::MAX).unwrap(),
                beta_min(&scaled, &scaled_params, u64::MAX).unwrap()
            );
        }
    }
}
