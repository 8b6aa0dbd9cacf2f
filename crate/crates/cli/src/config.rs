//! Run configurations. TOML is the primary format; JSON is accepted when the file
//! extension is `.json`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qlm_core::mass_bounds::AnalysisInput;
use qlm_core::metric_paths::PathFamily;
use qlm_core::sphere_metrics::{AxisymMetricSpec, HorizonSpec, MeanCurvatureSpec, MetricFile};
use qlm_core::{Grid, Pipeline};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Parses TOML or JSON depending on the extension.
pub fn parse_file<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    } else {
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// The metric, either inline or as a path relative to the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSource {
    File(PathBuf),
    Inline(MetricFile),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PipelineKind {
    #[default]
    Flat,
    Hyperbolic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub metric: MetricSource,
    /// Mean curvature `H_o`; exactly one of `h_o` and `tau` is required.
    pub h_o: Option<f64>,
    /// Normalized mean curvature `r_o H_o / 2`.
    pub tau: Option<f64>,
    #[serde(default)]
    pub pipeline: PipelineKind,
    pub kappa: Option<f64>,
    /// Horizon area radius.
    pub r_h: Option<f64>,
    #[serde(default)]
    pub paths: PathFamily,
    pub grid: Option<Grid>,
    /// A known Bartnik mass value for the positivity criterion.
    pub bartnik_mass: Option<f64>,
    #[serde(default)]
    pub brown_york: bool,
    /// Collar mass parameter.
    pub m: Option<f64>,
    /// Mass sequence for a limit study; `"default"` is `-10^j`, `j = 2..8`.
    pub m_sequence: Option<MassSequence>,
    /// Fixed collar length, overriding `A_o`.
    pub a: Option<f64>,
    /// Collar length as a multiple of `A_o`.
    pub a_scale: Option<f64>,
    /// Keep the full scalar curvature field in the collar report.
    #[serde(default)]
    pub keep_field: bool,
    pub out: Option<PathBuf>,
    /// Tolerance for the curvature floor certificate.
    pub floor_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MassSequence {
    Named(DefaultTag),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefaultTag {
    Default,
}

impl MassSequence {
    pub fn values(&self) -> Vec<f64> {
        match self {
            MassSequence::Named(DefaultTag::Default) => qlm_core::collar::default_mass_sequence(),
            MassSequence::Values(v) => v.clone(),
        }
    }
}

/// A configuration resolved against its location and the command line.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub metric: AxisymMetricSpec,
    pub mean_curvature: MeanCurvatureSpec,
    pub pipeline: Pipeline,
    pub horizon: Option<HorizonSpec>,
    pub grid: Grid,
}

impl Resolved {
    pub fn analysis_input(&self) -> AnalysisInput {
        AnalysisInput {
            metric: self.metric.clone(),
            mean_curvature: self.mean_curvature,
            pipeline: self.pipeline,
            horizon: self.horizon,
            family: self.config.paths,
            grid: self.grid,
            bartnik_mass: self.config.bartnik_mass,
            brown_york: self.config.brown_york,
        }
    }

    pub fn tau(&self) -> f64 {
        self.mean_curvature.tau(&self.metric)
    }
}

fn positive(name: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => bail!("{name} must be positive, got {x}"),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        parse_file(path)
    }

    /// Validates field combinations and loads the metric. `grid` overrides the config value.
    pub fn resolve(self, base: &Path, grid: Option<Grid>) -> Result<Resolved> {
        let file = match &self.metric {
            MetricSource::Inline(f) => f.clone(),
            MetricSource::File(p) => {
                let p = if p.is_absolute() { p.clone() } else { base.join(p) };
                parse_file::<MetricFile>(&p)?
            }
        };
        let metric = AxisymMetricSpec::try_from(&file).context("metric")?;

        let pipeline = match (self.pipeline, self.kappa) {
            (PipelineKind::Flat, None) => Pipeline::Flat,
            (PipelineKind::Flat, Some(_)) => bail!("kappa is only allowed with pipeline = \"hyperbolic\""),
            (PipelineKind::Hyperbolic, None) => bail!("pipeline = \"hyperbolic\" requires kappa"),
            (PipelineKind::Hyperbolic, Some(k)) => {
                positive("kappa", Some(k))?;
                Pipeline::Hyperbolic { kappa: k }
            }
        };

        let mean_curvature = match (self.h_o, self.tau) {
            (Some(h), None) => MeanCurvatureSpec::new(h)?,
            (None, Some(t)) => MeanCurvatureSpec::from_tau(t, metric.r_o())?,
            _ => bail!("exactly one of h_o and tau must be given"),
        };

        positive("r_h", self.r_h)?;
        positive("bartnik_mass", self.bartnik_mass)?;
        positive("a", self.a)?;
        positive("a_scale", self.a_scale)?;
        positive("floor_tol", self.floor_tol)?;
        if self.a.is_some() && self.a_scale.is_some() {
            bail!("a and a_scale are mutually exclusive");
        }
        if self.m.is_some() && self.m_sequence.is_some() {
            bail!("m and m_sequence are mutually exclusive");
        }
        if let Some(m) = self.m {
            if !m.is_finite() {
                bail!("m must be finite, got {m}");
            }
        }
        let horizon = self.r_h.map(HorizonSpec::new).transpose()?;
        let grid = grid.or(self.grid).unwrap_or_default();
        let grid = Grid::new(grid.t_samples, grid.x_intervals)?;

        Ok(Resolved { config: self, metric, mean_curvature, pipeline, horizon, grid })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Resolved> {
        let c: RunConfig = toml::from_str(s)?;
        c.resolve(Path::new("."), None)
    }

    #[test]
    fn inline_round_metric() {
        let r = parse(
            r#"
            tau = 0.5
            metric = { type = "round", r_o = 2.0 }
            "#,
        )
        .unwrap();
        assert_eq!(r.pipeline, Pipeline::Flat);
        assert!((r.tau() - 0.5).abs() < 1e-15);
        assert_eq!(r.config.paths, PathFamily::linear());
    }

    #[test]
    fn kappa_required_iff_hyperbolic() {
        let base = "tau = 0.5\nmetric = { type = \"round\", r_o = 1.0 }\n";
        assert!(parse(&format!("{base}pipeline = \"hyperbolic\"")).is_err());
        assert!(parse(&format!("{base}kappa = 1.0")).is_err());
        let r = parse(&format!("{base}pipeline = \"hyperbolic\"\nkappa = 0.5")).unwrap();
        assert_eq!(r.pipeline, Pipeline::Hyperbolic { kappa: 0.5 });
    }

    #[test]
    fn family_and_sequence_forms() {
        let r = parse(
            r#"
            h_o = 1.0
            paths = { reparam_grid = 9 }
            m_sequence = "default"
            metric = { type = "axisym", r_o = 1.0, w = { basis = "poly", data = [1.1, 0.0, -0.1] } }
            "#,
        )
        .unwrap();
        assert_eq!(r.config.paths, PathFamily::reparam(9));
        assert_eq!(r.config.m_sequence.unwrap().values().len(), 7);
    }

    #[test]
    fn rejects_conflicting_fields() {
        let base = "metric = { type = \"round\", r_o = 1.0 }\n";
        assert!(parse(&format!("{base}tau = 0.5\nh_o = 1.0")).is_err());
        assert!(parse(base).is_err());
        assert!(parse(&format!("{base}tau = 0.5\na = 1.0\na_scale = 0.5")).is_err());
        assert!(parse(&format!("{base}tau = 0.5\nr_h = -1.0")).is_err());
        assert!(parse(&format!("{base}tau = 0.5\nbogus = 1")).is_err());
    }
}
