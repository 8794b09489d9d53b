//! Certificates of cluster structure for finite weighted semimetric spaces.
//!
//! A space is split into short (`d <= r`), medium (`r < d <= 3r`) and long
//! (`d > 3r`) edges. Two distribution parameters are computed from it:
//! `alpha`, the normalized mass of medium edges, and `beta`, the normalized
//! mass of `(k + 1)`-point anticliques (all pairwise distances `> r`). From
//! them the coverage bound
//!
//! ```text
//! psi = 1 - sqrt(alpha) (2k + 1) - (k (e + 1) + 1) beta^(1 / (k + 1))
//! ```
//!
//! lower-bounds the fraction of total mass held by the best family of `k`
//! clusters of diameter `<= 2r` that are pairwise `>= r` apart.
//!
//! The crate computes every quantity involved, extracts a greedy cluster
//! structure, and ships brute-force oracles used to cross-check them.
//!
//! ```
//! use clustercert::{generators, report, ScaleParams};
//!
//! let space = generators::gen_model(&generators::ModelSpec {
//!     clusters: 3,
//!     points_per_cluster: 5,
//!     r: 1.0,
//!     separation: 4.0,
//!     seed: 1,
//!     allow_weak_separation: false,
//! })
//! .unwrap();
//! let params = ScaleParams::new(1.0, 3).unwrap();
//! let cert = report::certify(&space, &params, &report::CertifyOptions::default()).unwrap();
//! assert!(cert.certified);
//! assert_eq!(cert.coverage_ratio, 1.0);
//! ```

// distance matrices are walked by index pair throughout
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod discretize;
pub mod error;
pub mod generators;
pub mod greedy;
pub mod io;
pub mod metric;
pub mod oracle;
pub mod report;
pub mod stats;
mod workers;

pub use bounds::{BoundReport, OptSolution, ShapeTag};
pub use error::{Error, Result};
pub use greedy::{ClusterStructure, GreedyDecomposition};
pub use metric::{EdgeClass, FiniteMetricSpace, ScaleParams};
pub use oracle::OracleResult;
pub use report::CertReport;
pub use stats::StatsReport;
pub use workers::Workers;
