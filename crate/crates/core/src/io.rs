//! JSON formats for embeddings, reports, and level dumps.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::embed::{validate_params, AssignmentKey, Direction, EmbeddingMap};
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::nets::{build_ladder, build_levels, NetLevel, ScaleLadder};
use crate::verify::{DistortionReport, Violation, WorstPairs};

/// Pretty-printed JSON with a trailing newline. `f64` values are written in
/// shortest round-trip form.
pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_json<D: for<'de> Deserialize<'de>>(path: &Path) -> Result<D> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Point coordinates keyed by label, kept in point order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Coordinates(pub Vec<(String, Vec<f64>)>);

impl Serialize for Coordinates {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Coordinates {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct Ordered;
        impl<'de> Visitor<'de> for Ordered {
            type Value = Coordinates;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from point label to coordinates")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<Coordinates, A::Error> {
                let mut out = Vec::new();
                while let Some(entry) = access.next_entry::<String, Vec<f64>>()? {
                    out.push(entry);
                }
                Ok(Coordinates(out))
            }
        }
        deserializer.deserialize_map(Ordered)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentRecord {
    pub k: i32,
    pub xi: usize,
    pub j: usize,
    pub direction: Direction,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub alpha: f64,
    pub tau: f64,
    pub c0: u64,
    pub m: usize,
    pub chi: usize,
    pub dimension_n: usize,
    pub ladder: BTreeMap<i32, f64>,
    pub coordinates: Coordinates,
    pub assignments: Vec<AssignmentRecord>,
}

impl EmbeddingFile {
    pub fn from_map(map: &EmbeddingMap<f64>) -> Result<Self> {
        let p = map.params();
        let coords = map.coordinates()?;
        Ok(Self {
            alpha: p.alpha,
            tau: p.tau,
            c0: p.c0,
            m: p.m,
            chi: p.chi,
            dimension_n: map.dimension(),
            ladder: map.ladder().scales().collect(),
            coordinates: Coordinates(map.space().ids().iter().cloned().zip(coords).collect()),
            assignments: map
                .assignments()
                .into_iter()
                .map(|a| AssignmentRecord {
                    k: a.key.k,
                    xi: a.key.xi,
                    j: a.key.j,
                    direction: a.key.direction,
                    v: a.v,
                })
                .collect(),
        })
    }

    /// Rebuilds the map over `space`: ladder and levels are recomputed and
    /// must agree with the file, then the stored vectors are installed.
    pub fn to_map(&self, space: &FiniteMetricSpace<f64>) -> Result<EmbeddingMap<f64>> {
        let params = validate_params(self.alpha, self.tau, self.c0, self.m)?;
        let ladder = if space.len() < 2 { ScaleLadder::empty(self.tau) } else { build_ladder(space, self.tau)? };
        let stored: BTreeMap<i32, f64> = ladder.scales().collect();
        if stored != self.ladder {
            return Err(Error::InvalidEmbedding("scale ladder differs from the instance's".into()));
        }
        let levels = build_levels(space, &ladder);
        let mut map = EmbeddingMap::empty(space, params, ladder, levels)?;
        if map.chi() != self.chi || map.dimension() != self.dimension_n {
            return Err(Error::InvalidEmbedding(format!(
                "palette {} / dimension {} differ from recomputed {} / {}",
                self.chi,
                self.dimension_n,
                map.chi(),
                map.dimension()
            )));
        }
        for a in &self.assignments {
            let key = AssignmentKey { k: a.k, xi: a.xi, j: a.j, direction: a.direction };
            map.set_vector(key, a.v.clone())?;
        }
        Ok(map)
    }

    /// Stored coordinates in point order of `space`.
    pub fn coordinates_for(&self, space: &FiniteMetricSpace<f64>) -> Result<Vec<Vec<f64>>> {
        let by_label: BTreeMap<&str, &Vec<f64>> =
            self.coordinates.0.iter().map(|(k, v)| (k.as_str(), v)).collect();
        space
            .ids()
            .iter()
            .map(|id| {
                by_label
                    .get(id.as_str())
                    .map(|v| (*v).clone())
                    .ok_or_else(|| Error::InvalidEmbedding(format!("no coordinates for point {id:?}")))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportFile<'a> {
    pub lower_ratio: Option<f64>,
    pub upper_ratio: Option<f64>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub pass: bool,
    pub worst_pairs: &'a WorstPairs,
    pub pair_scales: &'a BTreeMap<i32, usize>,
    pub violations: &'a [Violation],
}

impl<'a> From<&'a DistortionReport> for ReportFile<'a> {
    fn from(r: &'a DistortionReport) -> Self {
        Self {
            lower_ratio: r.lower_ratio,
            upper_ratio: r.upper_ratio,
            lower_bound: r.lower_bound,
            upper_bound: r.upper_bound,
            pass: r.pass(),
            worst_pairs: &r.worst_pairs,
            pair_scales: &r.pair_scales,
            violations: &r.violations,
        }
    }
}

pub fn write_report(path: &Path, report: &DistortionReport) -> Result<()> {
    write_json(path, &ReportFile::from(report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub k: i32,
    pub radius: f64,
    pub net: Vec<usize>,
    pub colors: Vec<usize>,
}

/// Diagnostic dump of every level's net and coloring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDump {
    pub levels: Vec<LevelRecord>,
}

impl LevelDump {
    pub fn new(levels: &[NetLevel<f64>]) -> Self {
        Self {
            levels: levels
                .iter()
                .map(|l| LevelRecord { k: l.k, radius: l.radius, net: l.net.clone(), colors: l.color.clone() })
                .collect(),
        }
    }
}
