//! Seeded instance families shared by the integration suites.
#![allow(dead_code)]

use clustercert::generators::{gen_blobs, gen_random, BlobSpec, RandomStyle};
use clustercert::io::PointMetric;
use clustercert::{FiniteMetricSpace, ScaleParams};

pub fn params(r: f64, k: usize) -> ScaleParams {
    ScaleParams::new(r, k).unwrap()
}

/// Instance `i` of the small uniform-weight suite: `n` in 4..=12, `k`
/// alternating 2 and 3, drawn from four families so that both vacuous and
/// informative bounds occur.
pub fn suite_instance(i: u64) -> (FiniteMetricSpace, ScaleParams) {
    let k = 2 + (i % 2) as usize;
    let n = 4 + (i % 9) as usize;
    match i % 4 {
        // scattered points in the unit square at several scales
        0 => {
            let r = [0.1, 0.2, 0.35, 0.5][(i / 4 % 4) as usize];
            (gen_random(n, i, RandomStyle::UniformCube).unwrap(), params(r, k))
        }
        // tight blobs, one per cluster, well apart
        1 => (blob_space(k, n, 0.05, 3.0, i), params(0.5, k)),
        // blobs with a noisier spread, some medium edges
        2 => (blob_space(k, n, 0.25, 1.2, i), params(0.5, k)),
        // semimetric: independent distances, no triangle inequality
        _ => {
            let r = [0.2, 0.4, 0.6, 0.8][(i / 4 % 4) as usize];
            (gen_random(n, i, RandomStyle::RandomSemimetric).unwrap(), params(r, k))
        }
    }
}

/// `n` points split over `blobs` planar Gaussian blobs (first blobs get the
/// remainder), euclidean distances.
pub fn blob_space(blobs: usize, n: usize, spread: f64, separation: f64, seed: u64) -> FiniteMetricSpace {
    let per = n.div_ceil(blobs);
    let mut cloud = gen_blobs(&BlobSpec {
        blobs,
        points_per_blob: per,
        dim: 2,
        spread,
        separation,
        seed,
    })
    .unwrap();
    // drop from the last blob so the count is exactly n
    cloud.points.truncate(n);
    cloud.to_space(PointMetric::Euclidean).unwrap()
}
