//! Space JSON and point-cloud CSV formats.
//!
//! Space JSON:
//!
//! ```json
//! {"n": 3, "weights": [1, 1, 2], "labels": ["a", "b", "c"],
//!  "distances": {"condensed": [1.0, 2.0, 3.0]}}
//! ```
//!
//! `distances` is either the full `n x n` array or `{"condensed": [...]}`, the
//! strict upper triangle in row-major order. `weights` and `labels` are
//! optional.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{validate_space, FiniteMetricSpace, RawSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub distances: Distances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Distances {
    Full(Vec<Vec<f64>>),
    Condensed { condensed: Vec<f64> },
}

impl SpaceFile {
    pub fn from_space(space: &FiniteMetricSpace, condensed: bool) -> Self {
        let n = space.n();
        let distances = if condensed {
            let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
            for i in 0..n {
                upper.extend_from_slice(&space.row(i)[i + 1..]);
            }
            Distances::Condensed { condensed: upper }
        } else {
            Distances::Full(space.to_rows())
        };
        SpaceFile {
            n,
            weights: Some(space.weights().to_vec()),
            labels: space.labels().map(|l| l.to_vec()),
            distances,
        }
    }

    pub fn into_space(self) -> Result<FiniteMetricSpace> {
        let n = self.n;
        let distances = match self.distances {
            Distances::Full(rows) => {
                if rows.len() != n {
                    return Err(Error::DimensionMismatch {
                        what: "distance matrix rows",
                        expected: n,
                        found: rows.len(),
                    });
                }
                rows
            }
            Distances::Condensed { condensed } => {
                let expected = n * n.saturating_sub(1) / 2;
                if condensed.len() != expected {
                    return Err(Error::DimensionMismatch {
                        what: "condensed distances",
                        expected,
                        found: condensed.len(),
                    });
                }
                let mut rows = vec![vec![0.0; n]; n];
                let mut it = condensed.into_iter();
                for i in 0..n {
                    for j in (i + 1)..n {
                        let d = it.next().unwrap_or_default();
                        rows[i][j] = d;
                        rows[j][i] = d;
                    }
                }
                rows
            }
        };
        validate_space(RawSpace {
            distances,
            weights: self.weights,
            labels: self.labels,
        })
    }
}

/// Parses Space JSON; `source` names the input in error messages.
pub fn parse_space_json(text: &str, source: &str) -> Result<FiniteMetricSpace> {
    let file: SpaceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        context: format!("{source}:{}:{}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    file.into_space()
}

pub fn space_to_json(space: &FiniteMetricSpace, condensed: bool) -> String {
    serde_json::to_string_pretty(&SpaceFile::from_space(space, condensed))
        .expect("space file always serializes")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointMetric {
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl PointMetric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            PointMetric::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            PointMetric::Manhattan => diffs.sum(),
            PointMetric::Chebyshev => diffs.fold(0.0, f64::max),
        }
    }
}

impl std::str::FromStr for PointMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(PointMetric::Euclidean),
            "manhattan" => Ok(PointMetric::Manhattan),
            "chebyshev" => Ok(PointMetric::Chebyshev),
            other => Err(Error::invalid(format!("unknown metric {other:?}"))),
        }
    }
}

/// Points in `R^d`, one per row, with a header naming the coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub header: Vec<String>,
    pub points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn dim(&self) -> usize {
        self.header.len()
    }

    pub fn to_space(&self, metric: PointMetric) -> Result<FiniteMetricSpace> {
        let n = self.points.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = metric.distance(&self.points[i], &self.points[j]);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        FiniteMetricSpace::from_flat(n, dist, None, None)
    }
}

pub fn read_point_cloud<R: Read>(reader: R, source: &str) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_error(source, &e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.is_empty() {
        return Err(Error::Parse {
            context: format!("{source}:1"),
            message: "header row has no columns".into(),
        });
    }
    let mut points = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(source, &e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        context: format!("{source}:{line}"),
                        message: format!("column {} is not a finite number: {field:?}", col + 1),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        points.push(row);
    }
    if points.is_empty() {
        return Err(Error::Parse {
            context: source.to_owned(),
            message: "no points".into(),
        });
    }
    Ok(PointCloud { header, points })
}

pub fn write_point_cloud<W: Write>(writer: W, cloud: &PointCloud) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let io_err = |e: csv::Error| Error::Parse {
        context: "csv output".into(),
        message: e.to_string(),
    };
    wtr.write_record(&cloud.header).map_err(io_err)?;
    for p in &cloud.points {
        wtr.write_record(p.iter().map(|v| v.to_string())).map_err(io_err)?;
    }
    wtr.flush().map_err(|e| Error::Parse {
        context: "csv output".into(),
        message: e.to_string(),
    })
}

fn csv_error(source: &str, e: &csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse {
        context: format!("{source}:{line}"),
        message: e.to_string(),
    }
}
