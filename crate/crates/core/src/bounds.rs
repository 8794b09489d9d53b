//! Coverage bounds and the constrained top-`k` minimisation behind them.
//!
//! `phi(beta) = 1 - (k + 1) beta^(1/(k+1))` bounds the share of the `k` largest
//! greedy neighbourhoods; `psi(alpha, beta)` further pays for medium edges and
//! bounds the share of an optimal cluster structure.
//!
//! The minimisation is over non-increasing `w >= 0` with `sum w = 1` and
//! `sigma_{k+1}(w) <= c`, minimising `w_1 + ... + w_k`. Optima have the shape
//! `(w_1, lambda x s, mu, 0, ..., 0)` with `mu < lambda`; the solver searches
//! that family.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::sym_poly;

/// Where a bound input came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Tightest value computed exactly from the space.
    Computed,
    /// Monte Carlo estimate of the tightest value.
    Estimated,
    /// Given by the user.
    Supplied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    pub alpha_source: Provenance,
    pub beta_source: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub psi: f64,
    pub phi: f64,
    /// `psi <= 0`: the bound says nothing.
    pub vacuous: bool,
    pub inputs: BoundInputs,
}

fn check_inputs(alpha: f64, beta: f64, k: usize) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::invalid(format!("alpha must be finite and >= 0, got {alpha}")));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::invalid(format!("beta must be finite and >= 0, got {beta}")));
    }
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

/// `x^(1/m)` using the exact square and cube roots where available.
pub(crate) fn root(x: f64, m: usize) -> f64 {
    match m {
        1 => x,
        2 => x.sqrt(),
        3 => x.cbrt(),
        _ => x.powf(1.0 / m as f64),
    }
}

pub fn psi(alpha: f64, beta: f64, k: usize) -> Result<BoundReport> {
    check_inputs(alpha, beta, k)?;
    let kf = k as f64;
    let beta_root = root(beta, k + 1);
    let psi = 1.0 - alpha.sqrt() * (2.0 * kf + 1.0) - (kf * (E + 1.0) + 1.0) * beta_root;
    Ok(BoundReport {
        psi,
        phi: 1.0 - (kf + 1.0) * beta_root,
        vacuous: psi <= 0.0,
        inputs: BoundInputs {
            alpha,
            beta,
            k,
            alpha_source: Provenance::Computed,
            beta_source: Provenance::Computed,
        },
    })
}

pub fn phi(beta: f64, k: usize) -> Result<f64> {
    check_inputs(0.0, beta, k)?;
    Ok(1.0 - (k as f64 + 1.0) * root(beta, k + 1))
}

/// Slack on the hypothesis `(k + 1) c^(1/(k+1)) <= 1`, so that the boundary
/// case is not lost to the last bit of a root.
const HYPOTHESIS_SLACK: f64 = 1e-12;

/// Lower bound `1 - (k + 1) c^(1/(k+1))` on the optimum, and whether its
/// hypothesis `(k + 1) c^(1/(k+1)) <= 1` holds.
pub fn opt_lower_bound(c: f64, k: usize) -> (f64, bool) {
    let penalty = (k as f64 + 1.0) * root(c, k + 1);
    (1.0 - penalty, penalty <= 1.0 + HYPOTHESIS_SLACK)
}

/// `(k + 1) c^(1/(k+1)) - 2 (c (k + 1))^(1/k)`: non-negative where the
/// `s = k + 1` case dominates the `s = k` and `s = k - 1` cases.
pub fn case_dominance_gap(c: f64, k: usize) -> f64 {
    let kf = k as f64;
    (kf + 1.0) * root(c, k + 1) - 2.0 * root(c * (kf + 1.0), k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeTag {
    Uniform,
    SEqKMinus1,
    SEqK,
    SGeKPlus1,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptSolution {
    pub n: usize,
    pub k: usize,
    pub c: f64,
    pub w: Vec<f64>,
    pub objective: f64,
    pub sigma: f64,
    pub shape: ShapeTag,
    /// Number of `lambda` entries, absent for the uniform and grid solutions.
    pub s: Option<usize>,
    pub lambda: Option<f64>,
}

fn binomial(n: usize, m: usize) -> f64 {
    if m > n {
        return 0.0;
    }
    let m = m.min(n - m);
    (0..m).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn top_k_sum(w: &[f64], k: usize) -> f64 {
    w.iter().take(k).sum()
}

struct Family {
    n: usize,
    k: usize,
    c: f64,
}

impl Family {
    /// Largest feasible `mu` for `(w_1, lambda x s, mu)` with
    /// `w_1 = 1 - s lambda - mu`. Raising `mu` lowers the objective and, since
    /// `w_1 + mu` is fixed and `mu <= w_1`, raises `sigma_{k+1}`; the constraint
    /// is quadratic in `mu`.
    fn best_mu(&self, s: usize, lambda: f64) -> Option<f64> {
        let rest = 1.0 - s as f64 * lambda;
        if rest < lambda || s + 1 > self.n {
            return None;
        }
        let k = self.k;
        let quad = binomial(s, k - 1) * lambda.powi(k as i32 - 1);
        let base = rest * binomial(s, k) * lambda.powi(k as i32)
            + binomial(s, k + 1) * lambda.powi(k as i32 + 1);
        if base > self.c {
            return None;
        }
        let shape_cap = if s + 2 <= self.n {
            lambda.min(rest - lambda)
        } else {
            0.0
        };
        if quad == 0.0 {
            return Some(shape_cap);
        }
        let room = (self.c - base) / quad;
        let disc = rest * rest - 4.0 * room;
        let root_mu = if disc <= 0.0 {
            f64::INFINITY
        } else {
            2.0 * room / (rest + disc.sqrt())
        };
        Some(shape_cap.min(root_mu).max(0.0))
    }

    fn vector(&self, s: usize, lambda: f64, mu: f64) -> Vec<f64> {
        let mut w = vec![0.0; self.n];
        w[0] = 1.0 - s as f64 * lambda - mu;
        for slot in w.iter_mut().skip(1).take(s) {
            *slot = lambda;
        }
        if s + 1 < self.n {
            w[s + 1] = mu;
        }
        w
    }

    fn objective(&self, s: usize, lambda: f64) -> Option<f64> {
        let mu = self.best_mu(s, lambda)?;
        Some(top_k_sum(&self.vector(s, lambda, mu), self.k))
    }

    /// Shrinks `mu` until the direct `sigma_{k+1}` evaluation is within `c`.
    fn feasible_vector(&self, s: usize, lambda: f64) -> Option<Vec<f64>> {
        let mu = self.best_mu(s, lambda)?;
        let w = self.vector(s, lambda, mu);
        if sym_poly(&w, self.k + 1) <= self.c {
            return Some(w);
        }
        let (mut lo, mut hi) = (0.0, mu);
        if sym_poly(&self.vector(s, lambda, 0.0), self.k + 1) > self.c {
            return None;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if sym_poly(&self.vector(s, lambda, mid), self.k + 1) <= self.c {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(self.vector(s, lambda, lo))
    }
}

/// Default `lambda` grid spacing for [`opt_solve_numeric`].
pub const DEFAULT_RESOLUTION: f64 = 1e-4;

/// Minimises the top-`k` sum over the structured family
/// `(w_1, lambda x s, mu, 0, ...)` on a `lambda` grid of spacing `resolution`,
/// then refines the best cell by golden-section search. Ties go to the
/// smallest `s`, then the smallest `lambda`.
pub fn opt_solve_numeric(n: usize, k: usize, c: f64, resolution: f64) -> Result<OptSolution> {
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    if n <= k {
        return Err(Error::invalid(format!("need n > k, got n = {n}, k = {k}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::invalid("c must be positive"));
    }
    if !(resolution > 0.0 && resolution < 1.0) {
        return Err(Error::invalid("resolution must lie in (0, 1)"));
    }

    let uniform = vec![1.0 / n as f64; n];
    let uniform_sigma = sym_poly(&uniform, k + 1);
    if uniform_sigma <= c {
        // k / n is the least possible top-k sum of a sorted probability vector
        return Ok(OptSolution {
            n,
            k,
            c,
            objective: top_k_sum(&uniform, k),
            sigma: uniform_sigma,
            w: uniform,
            shape: ShapeTag::Uniform,
            s: None,
            lambda: None,
        });
    }

    let family = Family { n, k, c };
    let mut best: Option<(f64, usize, f64)> = None;
    for s in 1..n {
        let top = 1.0 / (s as f64 + 1.0);
        let steps = (top / resolution).floor() as usize;
        let grid = (1..=steps).map(|j| j as f64 * resolution).chain(std::iter::once(top));
        for lambda in grid {
            if let Some(obj) = family.objective(s, lambda) {
                if best.is_none_or(|(b, _, _)| obj < b) {
                    best = Some((obj, s, lambda));
                }
            }
        }
    }
    let (_, s, lambda) = best.ok_or_else(|| Error::invalid("no feasible vector found"))?;

    let lambda = golden_refine(&family, s, lambda, resolution);
    let w = family
        .feasible_vector(s, lambda)
        .ok_or_else(|| Error::invalid("refined vector infeasible"))?;
    let sigma = sym_poly(&w, k + 1);
    let shape = if w.iter().all(|&x| x == w[0]) {
        ShapeTag::Uniform
    } else if s + 1 == k {
        ShapeTag::SEqKMinus1
    } else if s == k {
        ShapeTag::SEqK
    } else if s > k {
        ShapeTag::SGeKPlus1
    } else {
        ShapeTag::Numeric
    };
    Ok(OptSolution {
        n,
        k,
        c,
        objective: top_k_sum(&w, k),
        sigma,
        w,
        shape,
        s: Some(s),
        lambda: Some(lambda),
    })
}

fn golden_refine(family: &Family, s: usize, lambda: f64, resolution: f64) -> f64 {
    let eval = |l: f64| family.objective(s, l).unwrap_or(f64::INFINITY);
    let top = 1.0 / (s as f64 + 1.0);
    let (mut a, mut b) = ((lambda - resolution).max(0.0), (lambda + resolution).min(top));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = eval(x2);
        }
    }
    let (candidate, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if value < eval(lambda) {
        candidate
    } else {
        lambda
    }
}

/// Exhaustive search over non-increasing vectors with entries in multiples of
/// `1 / steps`. Only practical for tiny `n`; used to cross-check the solver.
pub fn opt_solve_grid(n: usize, k: usize, c: f64, steps: usize) -> Option<(f64, Vec<f64>)> {
    #[allow(clippy::too_many_arguments)]
    fn walk(
        parts: &mut Vec<usize>,
        left: usize,
        cap: usize,
        n: usize,
        k: usize,
        c: f64,
        steps: usize,
        best: &mut Option<(f64, Vec<f64>)>,
    ) {
        if parts.len() == n {
            if left == 0 {
                let w: Vec<f64> = parts.iter().map(|&p| p as f64 / steps as f64).collect();
                if sym_poly(&w, k + 1) <= c {
                    let obj = top_k_sum(&w, k);
                    if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                        *best = Some((obj, w));
                    }
                }
            }
            return;
        }
        let slots = n - parts.len();
        for p in (0..=cap.min(left)).rev() {
            if p * slots < left {
                break;
            }
            parts.push(p);
            walk(parts, left - p, p, n, k, c, steps, best);
            parts.pop();
        }
    }
    let mut best = None;
    walk(&mut Vec::new(), steps, steps, n, k, c, steps, &mut best);
    best
}
