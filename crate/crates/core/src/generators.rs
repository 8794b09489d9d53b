//! Synthetic benchmark spaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::PointCloud;
use crate::metric::FiniteMetricSpace;

/// `clusters` groups of uniform-mass points, within-group distances in
/// `[r/2, r]` and cross-group distances in `[separation, separation + r/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub clusters: usize,
    pub points_per_cluster: usize,
    pub r: f64,
    pub separation: f64,
    pub seed: u64,
    /// Permit `r < separation <= 3r`, where medium edges appear.
    #[serde(default)]
    pub allow_weak_separation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialSpec {
    pub groups: usize,
    pub group_size: usize,
    pub r: f64,
    pub r_prime: f64,
}

/// Gaussian blobs centred at `i * separation` along the first axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobSpec {
    pub blobs: usize,
    pub points_per_blob: usize,
    pub dim: usize,
    pub spread: f64,
    pub separation: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomStyle {
    /// Points uniform in the unit square, euclidean distances.
    UniformCube,
    /// Independent uniform distances in `[0, 1)`; no triangle inequality.
    RandomSemimetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub n: usize,
    pub seed: u64,
    pub style: RandomStyle,
}

/// Everything needed to regenerate an instance; written as the provenance
/// sidecar of generated files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Model(ModelSpec),
    Adversarial(AdversarialSpec),
    Blobs(BlobSpec),
    Random(RandomSpec),
}

pub enum Generated {
    Space(FiniteMetricSpace),
    Cloud(PointCloud),
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    Ok(match spec {
        GeneratorSpec::Model(s) => Generated::Space(gen_model(s)?),
        GeneratorSpec::Adversarial(s) => {
            Generated::Space(gen_adversarial(s.groups, s.group_size, s.r, s.r_prime)?)
        }
        GeneratorSpec::Blobs(s) => Generated::Cloud(gen_blobs(s)?),
        GeneratorSpec::Random(s) => Generated::Space(gen_random(s.n, s.seed, s.style)?),
    })
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {v}")))
    }
}

pub fn gen_model(spec: &ModelSpec) -> Result<FiniteMetricSpace> {
    positive("r", spec.r)?;
    if spec.clusters == 0 || spec.points_per_cluster == 0 {
        return Err(Error::invalid("model needs at least one cluster and one point each"));
    }
    let floor = if spec.allow_weak_separation { 1.0 } else { 3.0 };
    if spec.separation.is_nan() || spec.separation <= floor * spec.r {
        return Err(Error::invalid(format!(
            "separation must exceed {floor} r (got {} with r = {})",
            spec.separation, spec.r
        )));
    }
    let per = spec.points_per_cluster;
    let n = spec.clusters * per;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = if i / per == j / per {
                spec.r * rng.random_range(0.5..=1.0)
            } else {
                spec.separation + spec.r * rng.random_range(0.0..0.5)
            };
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    FiniteMetricSpace::from_flat(n, dist, None, None)
}

/// `groups` groups of `group_size` unit-mass points at distance `2 r'` inside a
/// group and `r'` across groups. No set of diameter `<= 2r` holds more than one
/// point per group.
pub fn gen_adversarial(groups: usize, group_size: usize, r: f64, r_prime: f64) -> Result<FiniteMetricSpace> {
    positive("r", r)?;
    if !(r_prime.is_finite() && r_prime > r) {
        return Err(Error::invalid("r_prime must exceed r"));
    }
    if groups == 0 || group_size == 0 {
        return Err(Error::invalid("groups and group size must be at least 1"));
    }
    let n = groups * group_size;
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                dist[i * n + j] = if i / group_size == j / group_size {
                    2.0 * r_prime
                } else {
                    r_prime
                };
            }
        }
    }
    FiniteMetricSpace::from_flat(n, dist, None, None)
}

pub fn gen_blobs(spec: &BlobSpec) -> Result<PointCloud> {
    positive("spread", spec.spread)?;
    if spec.dim == 0 || spec.blobs == 0 || spec.points_per_blob == 0 {
        return Err(Error::invalid("dim, blobs and points per blob must be at least 1"));
    }
    if !(spec.separation.is_finite() && spec.separation >= 0.0) {
        return Err(Error::invalid("separation must be finite and non-negative"));
    }
    let noise = Normal::new(0.0, spec.spread).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut points = Vec::with_capacity(spec.blobs * spec.points_per_blob);
    for b in 0..spec.blobs {
        for _ in 0..spec.points_per_blob {
            let mut p: Vec<f64> = (0..spec.dim).map(|_| noise.sample(&mut rng)).collect();
            p[0] += b as f64 * spec.separation;
            points.push(p);
        }
    }
    Ok(PointCloud {
        header: (0..spec.dim).map(|d| format!("x{d}")).collect(),
        points,
    })
}

pub fn gen_random(n: usize, seed: u64, style: RandomStyle) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dist = vec![0.0; n * n];
    match style {
        RandomStyle::UniformCube => {
            let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = ((pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2)).sqrt();
                    dist[i * n + j] = d;
                    dist[j * n + i] = d;
                }
            }
        }
        RandomStyle::RandomSemimetric => {
            for i in 0..n {
                for j in (i + 1)..n {
                    let d: f64 = rng.random();
                    dist[i * n + j] = d;
                    dist[j * n + i] = d;
                }
            }
        }
    }
    FiniteMetricSpace::from_flat(n, dist, None, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::PointMetric;
    use crate::metric::{classify_edge, EdgeClass, ScaleParams};
    use crate::stats::{alpha_min, anticlique_measure_exact, beta_min, medium_measure};

    fn model(clusters: usize, per: usize, separation: f64, seed: u64) -> ModelSpec {
        ModelSpec {
            clusters,
            points_per_cluster: per,
            r: 1.0,
            separation,
            seed,
            allow_weak_separation: false,
        }
    }

    #[test]
    fn model_has_no_medium_edges_or_anticliques() {
        let s = gen_model(&model(3, 20, 4.0, 5)).unwrap();
        let params = ScaleParams::new(1.0, 3).unwrap();
        assert_eq!(alpha_min(&s, &params), 0.0);
        assert_eq!(beta_min(&s, &params, u64::MAX).unwrap(), 0.0);
        assert!(s.triangle_holds());
        for i in 0..s.n() {
            for j in 0..s.n() {
                assert_ne!(classify_edge(s.dist(i, j), &params), EdgeClass::Medium);
            }
        }
    }

    #[test]
    fn model_is_deterministic_and_checked() {
        let a = gen_model(&model(2, 1, 4.0, 9)).unwrap();
        assert_eq!(a.n(), 2);
        assert!(a.dist(0, 1) >= 4.0);
        assert_eq!(a, gen_model(&model(2, 1, 4.0, 9)).unwrap());
        assert!(gen_model(&model(2, 1, 3.0, 9)).is_err());
        let weak = ModelSpec {
            allow_weak_separation: true,
            ..model(2, 3, 2.0, 9)
        };
        let s = gen_model(&weak).unwrap();
        assert!(medium_measure(&s, &ScaleParams::new(1.0, 2).unwrap()) > 0.0);
    }

    #[test]
    fn adversarial_counts() {
        let (s, m) = (4usize, 5usize);
        let space = gen_adversarial(s, m, 1.0, 2.0).unwrap();
        assert_eq!(space.n(), s * m);
        let n = space.n();
        let far_pairs = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| space.dist(i, j) > 2.0)
            .count();
        assert_eq!(far_pairs, s * m * (m - 1));
        assert!(space.triangle_holds());

        let single = gen_adversarial(1, 1, 1.0, 2.0).unwrap();
        assert_eq!(single.n(), 1);
        assert!(gen_adversarial(2, 2, 1.0, 1.0).is_err());
    }

    #[test]
    fn adversarial_anticlique_count_is_binomial() {
        let space = gen_adversarial(3, 3, 1.0, 2.0).unwrap();
        let params = ScaleParams::new(1.0, 2).unwrap();
        let t = anticlique_measure_exact(&space, &params, u64::MAX).unwrap().measure;
        assert_eq!(t, 84.0); // C(9, 3)
    }

    #[test]
    fn blobs_are_deterministic() {
        let spec = BlobSpec {
            blobs: 3,
            points_per_blob: 10,
            dim: 2,
            spread: 0.1,
            separation: 10.0,
            seed: 4,
        };
        let a = gen_blobs(&spec).unwrap();
        assert_eq!(a.points.len(), 30);
        assert_eq!(a, gen_blobs(&spec).unwrap());
        let space = a.to_space(PointMetric::Euclidean).unwrap();
        assert!(space.triangle_holds());
        assert!(gen_blobs(&BlobSpec { dim: 0, ..spec }).is_err());
    }

    #[test]
    fn random_styles() {
        let one = gen_random(1, 3, RandomStyle::UniformCube).unwrap();
        assert_eq!(one.n(), 1);
        assert_eq!(
            gen_random(9, 3, RandomStyle::UniformCube).unwrap(),
            gen_random(9, 3, RandomStyle::UniformCube).unwrap()
        );
        let violations = (0..20)
            .filter(|&seed| !gen_random(10, seed, RandomStyle::RandomSemimetric).unwrap().triangle_holds())
            .count();
        assert!(violations > 0);
    }

    #[test]
    fn spec_serializes_with_kind_tag() {
        let spec = GeneratorSpec::Adversarial(AdversarialSpec {
            groups: 3,
            group_size: 2,
            r: 1.0,
            r_prime: 2.0,
        });
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"kind\":\"adversarial\""));
        assert_eq!(serde_json::from_str::<GeneratorSpec>(&text).unwrap(), spec);
    }
}
