//! JSON space files.
//!
//! Schema: `{"points": [[..],..] | null, "dist": [[..],..] | null,
//! "mass": [..], "metric": "euclidean" | "explicit" | "snowflake",
//! "epsilon": real?, "labels": [..]?}` — exactly one of `points` (with a
//! metric) or `dist` must be present; masses are required. Saved files use
//! the explicit form, so a load/save round trip reproduces the tables
//! bit for bit.

use crate::space::MetricMeasureSpace;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
struct SpaceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dist: Option<Vec<Vec<f64>>>,
    mass: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metric: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

pub fn load_space(path: impl AsRef<Path>) -> Result<MetricMeasureSpace> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: SpaceFile = serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: path.display().to_string(),
        message: e.to_string(), // serde_json reports line and column
    })?;
    space_from_file(file).map_err(|e| match e {
        Error::InvalidSpace(msg) | Error::InvalidArgument(msg) => Error::Schema {
            path: path.display().to_string(),
            message: msg,
        },
        other => other,
    })
}

fn space_from_file(file: SpaceFile) -> Result<MetricMeasureSpace> {
    match (file.points, file.dist) {
        (Some(_), Some(_)) => Err(Error::InvalidSpace(
            "exactly one of 'points' or 'dist' may be present, got both".into(),
        )),
        (None, None) => Err(Error::InvalidSpace(
            "one of 'points' or 'dist' is required".into(),
        )),
        (Some(points), None) => {
            let metric = file.metric.as_deref().unwrap_or("euclidean");
            match metric {
                "euclidean" => MetricMeasureSpace::from_points(&points, file.mass, file.labels),
                "snowflake" => {
                    let eps = file.epsilon.ok_or_else(|| {
                        Error::InvalidSpace(
                            "metric 'snowflake' requires the 'epsilon' field".into(),
                        )
                    })?;
                    MetricMeasureSpace::from_points_snowflaked(
                        &points,
                        eps,
                        file.mass,
                        file.labels,
                    )
                }
                "explicit" => Err(Error::InvalidSpace(
                    "metric 'explicit' requires a 'dist' table, not 'points'".into(),
                )),
                other => Err(Error::InvalidSpace(format!(
                    "unknown metric '{other}' (expected euclidean|explicit|snowflake)"
                ))),
            }
        }
        (None, Some(dist)) => {
            if let Some(metric) = file.metric.as_deref() {
                if metric != "explicit" {
                    return Err(Error::InvalidSpace(format!(
                        "a 'dist' table implies metric 'explicit', got '{metric}'"
                    )));
                }
            }
            MetricMeasureSpace::from_rows(dist, file.mass, file.labels)
        }
    }
}

pub fn save_space(space: &MetricMeasureSpace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let n = space.len();
    let dist: Vec<Vec<f64>> = (0..n).map(|i| space.dist_row(i).to_vec()).collect();
    let file = SpaceFile {
        points: None,
        dist: Some(dist),
        mass: space.masses().to_vec(),
        metric: Some("explicit".into()),
        epsilon: None,
        labels: space.labels().map(|l| l.to_vec()),
    };
    let text = serde_json::to_string_pretty(&file).map_err(|e| Error::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
