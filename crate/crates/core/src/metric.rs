//! Weighted finite semimetric spaces and the elementary queries on them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used only by the triangle-inequality diagnostic, so that
/// distances computed in floating point from coordinates are not reported as
/// violations because of a last-bit rounding difference.
const TRIANGLE_SLACK: f64 = 1e-12;

/// A finite set of points with a symmetric, non-negative, zero-diagonal
/// distance matrix and strictly positive point masses.
///
/// The triangle inequality is diagnosed but never required.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<f64>,
    weights: Vec<f64>,
    labels: Option<Vec<String>>,
    total: f64,
    triangle_holds: bool,
}

/// Unvalidated input to [`validate_space`].
#[derive(Debug, Clone, Default)]
pub struct RawSpace {
    pub distances: Vec<Vec<f64>>,
    pub weights: Option<Vec<f64>>,
    pub labels: Option<Vec<String>>,
}

/// Checks a raw matrix and builds a space. Missing weights default to the
/// uniform (counting) measure.
pub fn validate_space(raw: RawSpace) -> Result<FiniteMetricSpace> {
    let n = raw.distances.len();
    if n == 0 {
        return Err(Error::invalid("a space needs at least one point"));
    }
    let mut dist = Vec::with_capacity(n * n);
    for row in &raw.distances {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                what: "distance matrix row",
                expected: n,
                found: row.len(),
            });
        }
        dist.extend_from_slice(row);
    }
    FiniteMetricSpace::from_flat(n, dist, raw.weights, raw.labels)
}

impl FiniteMetricSpace {
    /// Builds a space from a row-major `n * n` matrix.
    pub fn from_flat(
        n: usize,
        dist: Vec<f64>,
        weights: Option<Vec<f64>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a space needs at least one point"));
        }
        if dist.len() != n * n {
            return Err(Error::DimensionMismatch {
                what: "distance matrix",
                expected: n * n,
                found: dist.len(),
            });
        }
        let weights = weights.unwrap_or_else(|| vec![1.0; n]);
        if weights.len() != n {
            return Err(Error::DimensionMismatch {
                what: "weights",
                expected: n,
                found: weights.len(),
            });
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "labels",
                    expected: n,
                    found: labels.len(),
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let d = dist[i * n + j];
                if !d.is_finite() {
                    return Err(Error::NonFiniteDistance { i, j });
                }
                if d < 0.0 {
                    return Err(Error::NegativeDistance { i, j });
                }
            }
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(Error::NonzeroDiagonal { i });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if dist[i * n + j] != dist[j * n + i] {
                    return Err(Error::AsymmetricMatrix { i, j });
                }
            }
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonpositiveWeight { i });
            }
        }
        let total = weights.iter().sum();
        let triangle_holds = check_triangle(n, &dist);
        Ok(FiniteMetricSpace {
            n,
            dist,
            weights,
            labels,
            total,
            triangle_holds,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// `mu(X)`, the sum of all point masses.
    pub fn total_measure(&self) -> f64 {
        self.total
    }

    /// Whether every triple satisfies the triangle inequality.
    pub fn triangle_holds(&self) -> bool {
        self.triangle_holds
    }

    /// True when every point has mass exactly one.
    pub fn is_uniform(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Mass of an index set, summed in the order given.
    pub fn mass(&self, set: &[usize]) -> f64 {
        set.iter().map(|&i| self.weights[i]).sum()
    }

    /// Full matrix as nested rows.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Sub-space on the given indices, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> Result<FiniteMetricSpace> {
        self.check_indices(indices)?;
        let m = indices.len();
        let mut dist = Vec::with_capacity(m * m);
        for &i in indices {
            for &j in indices {
                dist.push(self.dist(i, j));
            }
        }
        let weights = indices.iter().map(|&i| self.weights[i]).collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i].clone()).collect());
        FiniteMetricSpace::from_flat(m, dist, Some(weights), labels)
    }

    pub(crate) fn check_indices(&self, set: &[usize]) -> Result<()> {
        match set.iter().find(|&&i| i >= self.n) {
            Some(&index) => Err(Error::IndexOutOfRange { index, n: self.n }),
            None => Ok(()),
        }
    }
}

fn check_triangle(n: usize, dist: &[f64]) -> bool {
    (0..n).into_par_iter().all(|i| {
        let ri = &dist[i * n..(i + 1) * n];
        (0..n).all(|m| {
            let rm = &dist[m * n..(m + 1) * n];
            let dim = ri[m];
            (0..n).all(|j| {
                let bound = dim + rm[j];
                ri[j] <= bound + TRIANGLE_SLACK * bound.max(1.0)
            })
        })
    })
}

/// Scale `r` and order `k` that drive every classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    pub r: f64,
    pub k: usize,
    /// Symmetric shift applied to both edge-class boundaries. Zero by default.
    pub tolerance: f64,
    /// Upper end of the medium interval in units of `r`. Certificates are only
    /// meaningful with the default of 3.
    pub medium_multiplier: f64,
}

impl ScaleParams {
    pub const CERTIFIED_MEDIUM_MULTIPLIER: f64 = 3.0;

    pub fn new(r: f64, k: usize) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::invalid(format!("r must be positive and finite, got {r}")));
        }
        if k < 2 {
            return Err(Error::invalid(format!("k must be at least 2, got {k}")));
        }
        Ok(ScaleParams {
            r,
            k,
            tolerance: 0.0,
            medium_multiplier: Self::CERTIFIED_MEDIUM_MULTIPLIER,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(Error::invalid("tolerance must be finite and non-negative"));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn with_medium_multiplier(mut self, multiplier: f64) -> Result<Self> {
        if !(multiplier.is_finite() && multiplier >= 1.0) {
            return Err(Error::invalid("medium multiplier must be at least 1"));
        }
        self.medium_multiplier = multiplier;
        Ok(self)
    }

    /// Same `r` and `k`, with the boundaries used by the certificate.
    pub fn certified(self) -> Self {
        ScaleParams {
            tolerance: 0.0,
            medium_multiplier: Self::CERTIFIED_MEDIUM_MULTIPLIER,
            ..self
        }
    }

    #[inline]
    pub(crate) fn short_limit(&self) -> f64 {
        self.r + self.tolerance
    }

    #[inline]
    pub(crate) fn medium_limit(&self) -> f64 {
        self.medium_multiplier * self.r + self.tolerance
    }

    /// True when the pair is not short, i.e. may sit together in an anticlique.
    #[inline]
    pub fn is_far(&self, d: f64) -> bool {
        d > self.short_limit()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeClass {
    Short,
    Medium,
    Long,
}

/// Short for `d <= r`, medium for `r < d <= 3r`, long above.
#[inline]
pub fn classify_edge(d: f64, params: &ScaleParams) -> EdgeClass {
    if d <= params.short_limit() {
        EdgeClass::Short
    } else if d <= params.medium_limit() {
        EdgeClass::Medium
    } else {
        EdgeClass::Long
    }
}

/// Largest pairwise distance within `set`; zero for fewer than two points.
pub fn diameter(space: &FiniteMetricSpace, set: &[usize]) -> Result<f64> {
    space.check_indices(set)?;
    let mut best = 0.0f64;
    for (a, &i) in set.iter().enumerate() {
        let row = space.row(i);
        for &j in &set[a + 1..] {
            best = best.max(row[j]);
        }
    }
    Ok(best)
}

/// Smallest distance between a point of `a` and a point of `b`.
pub fn set_distance(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    space.check_indices(a)?;
    space.check_indices(b)?;
    let mut best = f64::INFINITY;
    for &i in a {
        let row = space.row(i);
        for &j in b {
            best = best.min(row[j]);
        }
    }
    Ok(best)
}
