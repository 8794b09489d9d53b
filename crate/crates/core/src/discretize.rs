//! Epsilon discretisation: partition a space into cells of diameter at most
//! `epsilon`, collapse each cell to one point with a rational mass, and
//! inflate `alpha` / `beta` so the quotient still satisfies the hypotheses.

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greedy::ClusterStructure;
use crate::metric::{diameter, FiniteMetricSpace, ScaleParams};
use crate::stats::alpha_min;

pub const DEFAULT_DENOMINATOR_BOUND: u64 = 1_000_000;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")))
    }
}

/// Cells of diameter `<= epsilon` covering every index once, sorted by their
/// smallest member.
///
/// Centres are picked by farthest-point sampling from index 0 until every
/// point is within `epsilon / 2` of one; points go to the nearest centre
/// (ties to the smaller centre index). Cells whose diameter still exceeds
/// `epsilon` (possible without the triangle inequality) are split greedily,
/// and finally cells are merged greedily while the union stays within
/// `epsilon`.
pub fn epsilon_partition(space: &FiniteMetricSpace, epsilon: f64) -> Result<Vec<Vec<usize>>> {
    check_epsilon(epsilon)?;
    let n = space.n();
    let radius = epsilon / 2.0;

    let mut centres = vec![0usize];
    let mut nearest: Vec<f64> = space.row(0).to_vec();
    loop {
        let (far, gap) = nearest
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        if gap <= radius {
            break;
        }
        centres.push(far);
        for (i, slot) in nearest.iter_mut().enumerate() {
            *slot = slot.min(space.dist(far, i));
        }
    }
    centres.sort_unstable();

    let mut by_centre: Vec<Vec<usize>> = vec![Vec::new(); centres.len()];
    for i in 0..n {
        let row = space.row(i);
        let (slot, _) = centres
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (s, &c)| if row[c] < acc.1 { (s, row[c]) } else { acc });
        by_centre[slot].push(i);
    }

    let mut cells = Vec::new();
    for cell in by_centre.into_iter().filter(|c| !c.is_empty()) {
        if diameter(space, &cell)? <= epsilon {
            cells.push(cell);
        } else {
            cells.extend(split_cell(space, &cell, epsilon));
        }
    }
    cells.sort_by_key(|c| c[0]);

    let mut merged: Vec<Vec<usize>> = Vec::new();
    for cell in cells {
        let target = merged.iter().position(|m| {
            cell.iter()
                .all(|&i| m.iter().all(|&j| space.dist(i, j) <= epsilon))
        });
        match target {
            Some(t) => {
                merged[t].extend(cell);
                merged[t].sort_unstable();
            }
            None => merged.push(cell),
        }
    }
    Ok(merged)
}

fn split_cell(space: &FiniteMetricSpace, cell: &[usize], epsilon: f64) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = cell.to_vec();
    let mut out = Vec::new();
    while !left.is_empty() {
        let mut part = vec![left[0]];
        let mut rest = Vec::new();
        for &i in &left[1..] {
            if part.iter().all(|&j| space.dist(i, j) <= epsilon) {
                part.push(i);
            } else {
                rest.push(i);
            }
        }
        out.push(part);
        left = rest;
    }
    out
}

/// A cell mass rounded down to a rational with bounded denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellMass {
    /// `None` when no admissible rational exists and the exact mass is kept.
    pub numerator: Option<u64>,
    pub denominator: Option<u64>,
    pub value: f64,
    pub exact_mass: f64,
}

/// Largest `p / q <= x` with `q <= max_den`, by a Stern-Brocot descent that
/// takes runs of identical moves in one binary-searched step.
pub fn best_lower_rational(x: f64, max_den: u64) -> Option<(u64, u64)> {
    if !(x.is_finite() && x >= 0.0) || max_den == 0 || x >= u64::MAX as f64 / 2.0 {
        return None;
    }
    let le = |p: u64, q: u64| (p as f64) / (q as f64) <= x;
    let (mut a, mut b) = (x.floor() as u64, 1u64);
    if !le(a, b) {
        a -= 1;
    }
    let (mut c, mut d) = (a + 1, 1u64);
    if le(c, d) {
        return Some((c, d));
    }
    loop {
        if b + d > max_den {
            return Some((a, b));
        }
        if le(a + c, b + d) {
            // lower bound walks toward the upper one
            let cap = (max_den - b) / d;
            let t = last_true(1, cap, |t| le(a + t * c, b + t * d));
            a += t * c;
            b += t * d;
            if (a as f64) / (b as f64) == x {
                return Some((a, b));
            }
        } else {
            let cap = (max_den - d) / b;
            let t = last_true(1, cap, |t| !le(c + t * a, d + t * b));
            c += t * a;
            d += t * b;
        }
    }
}

/// Largest `t` in `[lo, hi]` with `pred(t)`, given `pred(lo)` and
/// monotonicity.
fn last_true(lo: u64, hi: u64, pred: impl Fn(u64) -> bool) -> u64 {
    let (mut lo, mut hi) = (lo, hi.max(lo));
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quotient {
    /// One point per cell; distance between cells is the smallest cross
    /// distance.
    pub space: FiniteMetricSpace,
    pub masses: Vec<CellMass>,
}

fn check_partition(space: &FiniteMetricSpace, cells: &[Vec<usize>]) -> Result<()> {
    let mut seen = vec![false; space.n()];
    for cell in cells {
        if cell.is_empty() {
            return Err(Error::invalid("partition contains an empty cell"));
        }
        space.check_indices(cell)?;
        for &i in cell {
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::invalid(format!("point {i} appears in two cells")));
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(i) => Err(Error::invalid(format!("point {i} is in no cell"))),
        None => Ok(()),
    }
}

pub fn quotient_space(
    space: &FiniteMetricSpace,
    cells: &[Vec<usize>],
    epsilon: f64,
    denominator_bound: u64,
) -> Result<Quotient> {
    check_epsilon(epsilon)?;
    if denominator_bound == 0 {
        return Err(Error::DenominatorBoundTooSmall { bound: 0 });
    }
    check_partition(space, cells)?;

    let masses: Vec<CellMass> = cells
        .iter()
        .map(|cell| {
            let exact = space.mass(cell);
            let floor = (1.0 - epsilon) * exact;
            match best_lower_rational(exact, denominator_bound) {
                Some((p, q)) if (p as f64) / (q as f64) >= floor && p > 0 => CellMass {
                    numerator: Some(p),
                    denominator: Some(q),
                    value: p as f64 / q as f64,
                    exact_mass: exact,
                },
                _ => CellMass {
                    numerator: None,
                    denominator: None,
                    value: exact,
                    exact_mass: exact,
                },
            }
        })
        .collect();

    let m = cells.len();
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|a| {
            (0..m)
                .map(|b| {
                    if a == b {
                        0.0
                    } else {
                        cells[a]
                            .iter()
                            .flat_map(|&i| cells[b].iter().map(move |&j| (i, j)))
                            .map(|(i, j)| space.dist(i, j))
                            .fold(f64::INFINITY, f64::min)
                    }
                })
                .collect()
        })
        .collect();
    let weights = masses.iter().map(|q| q.value).collect();
    let quotient = FiniteMetricSpace::from_flat(m, rows.concat(), Some(weights), None)?;
    Ok(Quotient {
        space: quotient,
        masses,
    })
}

/// Expands a quotient into a uniform-mass space in which cell `i` becomes
/// `|B_i|` coincident points, `|B_i|` proportional to its rational mass.
pub fn replicate(quotient: &Quotient, max_points: usize) -> Result<(FiniteMetricSpace, Vec<u64>)> {
    let mut fractions = Vec::with_capacity(quotient.masses.len());
    for (i, q) in quotient.masses.iter().enumerate() {
        match (q.numerator, q.denominator) {
            (Some(p), Some(d)) => fractions.push((p, d)),
            _ => {
                return Err(Error::invalid(format!(
                    "cell {i} has no bounded-denominator mass; cannot replicate"
                )))
            }
        }
    }
    let lcm = fractions
        .iter()
        .try_fold(1u64, |acc, &(_, d)| {
            let l = acc.lcm(&d);
            (l <= u64::MAX / 2).then_some(l)
        })
        .ok_or_else(|| Error::invalid("common denominator overflows"))?;
    let mut counts: Vec<u64> = fractions
        .iter()
        .map(|&(p, d)| p.checked_mul(lcm / d))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::invalid("replication counts overflow"))?;
    let g = counts.iter().fold(0u64, |acc, &c| acc.gcd(&c));
    for c in counts.iter_mut() {
        *c /= g;
    }
    let total: u64 = counts.iter().sum();
    if total > max_points as u64 {
        return Err(Error::invalid(format!(
            "replicated space would have {total} points, limit is {max_points}"
        )));
    }
    let owner: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(cell, &c)| std::iter::repeat_n(cell, c as usize))
        .collect();
    let n = owner.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            dist[i * n + j] = quotient.space.dist(owner[i], owner[j]);
        }
    }
    Ok((FiniteMetricSpace::from_flat(n, dist, None, None)?, counts))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InflatedParams {
    pub alpha_min: f64,
    pub beta_min: f64,
    /// Ordered-pair mass with `3r < d <= 3r + 2 epsilon`.
    pub boundary_mass: f64,
    pub alpha_eps: f64,
    pub beta_eps: f64,
}

/// `alpha_eps = (alpha + mu{3r < d <= 3r + 2 eps} / mu(X)^2) / (1 - eps)^2` and
/// `beta_eps = beta / (1 - eps)^(k+1)`, evaluated on the original space.
pub fn inflated_params(
    space: &FiniteMetricSpace,
    params: &ScaleParams,
    epsilon: f64,
    beta_min: f64,
) -> Result<InflatedParams> {
    check_epsilon(epsilon)?;
    if epsilon >= 1.0 {
        return Err(Error::invalid(format!("epsilon must be below 1, got {epsilon}")));
    }
    let params = params.certified();
    let alpha = alpha_min(space, &params);
    let lo = params.medium_limit();
    let hi = lo + 2.0 * epsilon;
    let n = space.n();
    let mut unordered = 0.0;
    for i in 0..n {
        let row = space.row(i);
        for j in (i + 1)..n {
            if row[j] > lo && row[j] <= hi {
                unordered += space.weight(i) * space.weight(j);
            }
        }
    }
    let boundary_mass = 2.0 * unordered;
    let total = space.total_measure();
    let shrink = 1.0 - epsilon;
    Ok(InflatedParams {
        alpha_min: alpha,
        beta_min,
        boundary_mass,
        alpha_eps: (alpha + boundary_mass / (total * total)) / (shrink * shrink),
        beta_eps: beta_min / shrink.powi(params.k as i32 + 1),
    })
}

/// Replaces every quotient point by the cell it stands for.
pub fn lift_structure(
    original: &FiniteMetricSpace,
    cells: &[Vec<usize>],
    structure: &ClusterStructure,
) -> Result<ClusterStructure> {
    let clusters = structure
        .clusters
        .iter()
        .map(|cluster| {
            let mut lifted: Vec<usize> = Vec::new();
            for &c in cluster {
                let cell = cells.get(c).ok_or(Error::IndexOutOfRange {
                    index: c,
                    n: cells.len(),
                })?;
                lifted.extend_from_slice(cell);
            }
            lifted.sort_unstable();
            Ok(lifted)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClusterStructure::new(original, clusters))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    pub cells: Vec<Vec<usize>>,
    pub quotient: Quotient,
    pub epsilon: f64,
}

pub fn discretize(
    space: &FiniteMetricSpace,
    epsilon: f64,
    denominator_bound: u64,
) -> Result<Discretization> {
    let cells = epsilon_partition(space, epsilon)?;
    let quotient = quotient_space(space, &cells, epsilon, denominator_bound)?;
    Ok(Discretization {
        cells,
        quotient,
        epsilon,
    })
}
