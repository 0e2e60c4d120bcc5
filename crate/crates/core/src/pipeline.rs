//! End-to-end run: instance, doubling constant, parameters, build, verify.

use std::path::PathBuf;

use crate::embed::{build_embedding, validate_params, EmbeddingMap, Params};
use crate::error::{Error, Result};
use crate::instances::{generate_instance, load_instance, InstanceKind};
use crate::io::{write_json, write_report, EmbeddingFile, LevelDump};
use crate::metric::{estimate_doubling_constant, DoublingEstimate, FiniteMetricSpace, ProbePolicy};
use crate::nets::{build_ladder, build_levels, ScaleLadder};
use crate::verify::{verify_all, DistortionReport};

pub const DEFAULT_ALPHA: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    File(PathBuf),
    Generate(InstanceKind),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    /// Derived with [`auto_tau`] when absent.
    pub tau: Option<f64>,
    pub c0_override: Option<u64>,
    /// Derived with [`auto_m`] when absent.
    pub m_override: Option<usize>,
    pub source: InstanceSource,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub levels_out: Option<PathBuf>,
    pub verify: bool,
}

impl RunConfig {
    pub fn new(source: InstanceSource) -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            tau: None,
            c0_override: None,
            m_override: None,
            source,
            out: None,
            report: None,
            levels_out: None,
            verify: true,
        }
    }
}

/// Smallest dimension with `m > 8 log2(c0)`.
pub fn auto_m(c0: u64) -> usize {
    (8.0 * (c0 as f64).log2()).floor() as usize + 1
}

/// Candidate scale parameters, largest first: 0.1, 0.05, 0.02, 0.01, 0.005, ...
pub fn tau_candidates() -> impl Iterator<Item = f64> {
    // integer mantissa over an exact power of ten rounds to the decimal literal
    (1..=12).flat_map(|e| [10.0, 5.0, 2.0].map(|mant| mant / 10f64.powi(e + 1)))
}

/// Largest candidate `tau` passing every parameter inequality.
pub fn auto_tau(alpha: f64, c0: u64, m: usize) -> Result<Params<f64>> {
    let mut last = None;
    for tau in tau_candidates() {
        match validate_params(alpha, tau, c0, m) {
            Ok(p) => return Ok(p),
            Err(e @ Error::TauTooLarge { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one candidate"))
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub space: FiniteMetricSpace<f64>,
    /// Absent when `c0` was supplied or the space has fewer than two points.
    pub estimate: Option<DoublingEstimate<f64>>,
    pub c0: u64,
    pub map: EmbeddingMap<f64>,
    pub report: Option<DistortionReport>,
}

impl PipelineOutcome {
    /// 0 when verification passed or was skipped, 5 when it failed.
    pub fn exit_code(&self) -> i32 {
        match &self.report {
            Some(r) if !r.pass() => 5,
            _ => 0,
        }
    }
}

pub fn load_space(source: &InstanceSource) -> Result<FiniteMetricSpace<f64>> {
    match source {
        InstanceSource::File(path) => load_instance(path),
        InstanceSource::Generate(kind) => generate_instance(*kind),
    }
}

/// Builds (and optionally verifies) the embedding for `config`, writing
/// whichever output files it names.
pub fn run_pipeline(config: &RunConfig) -> Result<PipelineOutcome> {
    let space = load_space(&config.source)?;
    let degenerate = space.len() < 2;

    let (c0, estimate) = match config.c0_override {
        Some(c0) => (c0, None),
        None if degenerate => (1, None),
        None => {
            let est = estimate_doubling_constant(&space, &ProbePolicy::Exhaustive)?;
            (est.c0, Some(est))
        }
    };
    let m = config.m_override.unwrap_or_else(|| auto_m(c0));
    let params = match config.tau {
        Some(tau) => validate_params(config.alpha, tau, c0, m)?,
        None => auto_tau(config.alpha, c0, m)?,
    };

    let ladder = if degenerate { ScaleLadder::empty(params.tau) } else { build_ladder(&space, params.tau)? };
    let levels = build_levels(&space, &ladder);
    if let Some(path) = &config.levels_out {
        write_json(path, &LevelDump::new(&levels))?;
    }
    let map = build_embedding(&space, params, ladder, levels)?;
    if let Some(path) = &config.out {
        write_json(path, &EmbeddingFile::from_map(&map)?)?;
    }

    let report = if config.verify {
        let report = verify_all(&space, &map, c0)?;
        if let Some(path) = &config.report {
            write_report(path, &report)?;
        }
        Some(report)
    } else {
        None
    };
    Ok(PipelineOutcome { space, estimate, c0, map, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_ladder_values() {
        let t: Vec<f64> = tau_candidates().take(7).collect();
        assert_eq!(t, vec![0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001]);
    }

    #[test]
    fn auto_tau_for_default_alpha() {
        // tau^0.6 <= 1/8 needs tau <= 2^-5, so 0.02 is the first to pass
        assert_eq!(auto_tau(0.8, 4, 17).unwrap().tau, 0.02);
        assert!(matches!(auto_tau(0.5, 4, 17), Err(Error::AlphaOutOfRange(_))));
        assert!(matches!(auto_tau(0.8, 4, 3), Err(Error::DimensionTooSmall { .. })));
    }

    #[test]
    fn auto_m_values() {
        assert_eq!(auto_m(1), 1);
        assert_eq!(auto_m(2), 9);
        assert_eq!(auto_m(4), 17);
        assert_eq!(auto_m(3), 13);
    }

    #[test]
    fn two_points_pass() {
        let out = run_pipeline(&RunConfig::new(InstanceSource::Generate(InstanceKind::Line { n: 2 }))).unwrap();
        assert_eq!(out.c0, 2);
        assert_eq!(out.exit_code(), 0);
        assert!(out.report.unwrap().pass());
    }

    #[test]
    fn forced_large_tau_is_rejected() {
        let mut cfg = RunConfig::new(InstanceSource::Generate(InstanceKind::Line { n: 2 }));
        cfg.tau = Some(0.2);
        let err = run_pipeline(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn single_point_is_trivial() {
        let out = run_pipeline(&RunConfig::new(InstanceSource::Generate(InstanceKind::Line { n: 1 }))).unwrap();
        assert_eq!(out.map.dimension(), 0);
        assert!(out.map.evaluate(0).unwrap().is_empty());
        let report = out.report.unwrap();
        assert!(report.pass());
        assert_eq!(report.lower_ratio, None);
    }
}
