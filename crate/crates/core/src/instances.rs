//! Instance files and synthetic instance generators.

use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// Largest instance the generators produce.
pub const MAX_POINTS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Matrix,
    Euclidean,
}

/// Point label as it appears in an instance file: a string or a number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Text(String),
    Number(serde_json::Number),
}

impl Label {
    fn into_string(self) -> String {
        match self {
            Label::Text(s) => s,
            Label::Number(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub points: Vec<Label>,
    pub metric: MetricKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
}

impl InstanceFile {
    pub fn into_space(self) -> Result<FiniteMetricSpace<f64>> {
        let ids: Vec<String> = self.points.into_iter().map(Label::into_string).collect();
        match self.metric {
            MetricKind::Matrix => {
                let matrix = self
                    .matrix
                    .ok_or_else(|| Error::InvalidInstance("metric \"matrix\" needs a \"matrix\" field".into()))?;
                FiniteMetricSpace::with_ids(ids, &matrix)
            }
            MetricKind::Euclidean => {
                let coords = self
                    .coords
                    .ok_or_else(|| Error::InvalidInstance("metric \"euclidean\" needs a \"coords\" field".into()))?;
                if coords.len() != ids.len() {
                    return Err(Error::LabelCount { labels: ids.len(), points: coords.len() });
                }
                FiniteMetricSpace::from_coords(ids, coords)
            }
        }
    }

    pub fn from_space(space: &FiniteMetricSpace<f64>) -> Self {
        let points = space.ids().iter().cloned().map(Label::Text).collect();
        match space.coords() {
            Some(c) => Self { points, metric: MetricKind::Euclidean, matrix: None, coords: Some(c.to_vec()) },
            None => Self { points, metric: MetricKind::Matrix, matrix: Some(space.matrix()), coords: None },
        }
    }
}

pub fn load_instance(path: &Path) -> Result<FiniteMetricSpace<f64>> {
    let text = std::fs::read_to_string(path)?;
    let file: InstanceFile = serde_json::from_str(&text)?;
    file.into_space()
}

pub fn save_instance(space: &FiniteMetricSpace<f64>, path: &Path) -> Result<()> {
    crate::io::write_json(path, &InstanceFile::from_space(space))
}

/// A synthetic instance family with its size parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    /// Unit-spaced `w x h` planar grid.
    Grid { w: usize, h: usize },
    /// `{0, 1, ..., n - 1}` on the line.
    Line { n: usize },
    /// Interval endpoints after `levels` middle-thirds steps on `[0, 1]`.
    Cantor { levels: u32 },
    /// `n` uniform points in the unit square.
    Random { n: usize, seed: u64 },
}

impl InstanceKind {
    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            InstanceKind::Random { n, .. } => InstanceKind::Random { n, seed },
            other => other,
        }
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    /// `grid:W,H` (or `grid:WxH`), `line:N`, `cantor:L`, `random:N[,SEED]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadGenerator(s.to_string());
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<u64> = args
            .split([',', 'x'])
            .map(|a| a.trim().trim_start_matches("seed="))
            .map(|a| a.parse::<u64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (kind.trim(), nums.as_slice()) {
            ("grid", [w, h]) => Ok(InstanceKind::Grid { w: *w as usize, h: *h as usize }),
            ("line", [n]) => Ok(InstanceKind::Line { n: *n as usize }),
            ("cantor", [l]) => Ok(InstanceKind::Cantor { levels: u32::try_from(*l).map_err(|_| bad())? }),
            ("random", [n]) => Ok(InstanceKind::Random { n: *n as usize, seed: 0 }),
            ("random", [n, seed]) => Ok(InstanceKind::Random { n: *n as usize, seed: *seed }),
            _ => Err(bad()),
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_POINTS {
        return Err(Error::SizeOutOfRange(n));
    }
    Ok(())
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

pub fn generate_instance(kind: InstanceKind) -> Result<FiniteMetricSpace<f64>> {
    let coords: Vec<Vec<f64>> = match kind {
        InstanceKind::Grid { w, h } => {
            check_size(w.saturating_mul(h))?;
            (0..h)
                .flat_map(|y| (0..w).map(move |x| vec![x as f64, y as f64]))
                .collect()
        }
        InstanceKind::Line { n } => {
            check_size(n)?;
            (0..n).map(|i| vec![i as f64]).collect()
        }
        InstanceKind::Cantor { levels } => {
            let n = 2usize.checked_pow(levels + 1).unwrap_or(usize::MAX);
            check_size(n)?;
            // interval [a, b] as integer numerators over 3^levels
            let denom = 3u64.pow(levels);
            let mut intervals = vec![(0u64, denom)];
            for _ in 0..levels {
                intervals = intervals
                    .into_iter()
                    .flat_map(|(a, b)| {
                        let third = (b - a) / 3;
                        [(a, a + third), (b - third, b)]
                    })
                    .collect();
            }
            intervals
                .into_iter()
                .flat_map(|(a, b)| [a, b])
                .map(|p| vec![p as f64 / denom as f64])
                .collect()
        }
        InstanceKind::Random { n, seed } => {
            check_size(n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect()
        }
    };
    FiniteMetricSpace::from_coords(labels(coords.len()), coords)
}
