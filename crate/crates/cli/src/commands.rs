use std::path::Path;

use anyhow::{bail, Result};
use qlm_core::acceptance::{self, Outcome};
use qlm_core::collar::{limit_study, AChoice, CollarMetric, CurvatureField, LimitStudy, SliceReport};
use qlm_core::mass_bounds::{mass_report, xi_over_family, MassReport, SCHEMA_VERSION, VERDICT_TOL};
use qlm_core::metric_paths::{reparametrized_path, zeta_upper_bound, PathConstants};
use qlm_core::roots::X_TOL;
use qlm_core::warp_odes::ODE_TOL;
use qlm_core::{Grid, Pipeline};
use serde::Serialize;

use crate::config::Resolved;

/// Default tolerance for the scalar curvature floor certificate.
pub const FLOOR_TOL: f64 = 1e-10;

/// Outcome of a command that completed and produced output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A collar violated its curvature floor.
    Breach,
    /// At least one acceptance criterion failed.
    SelftestFailed,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub verdict: f64,
    pub root_x: f64,
    pub ode: f64,
    pub floor: f64,
}

impl Tolerances {
    pub fn new(floor: f64) -> Self {
        Self { verdict: VERDICT_TOL, root_x: X_TOL, ode: ODE_TOL, floor }
    }
}

#[derive(Debug, Serialize)]
pub struct AnalyzeOutput {
    pub command: &'static str,
    pub tolerances: Tolerances,
    pub family: String,
    #[serde(flatten)]
    pub report: MassReport,
}

pub fn analyze(cfg: &Resolved, tol: Tolerances) -> Result<AnalyzeOutput> {
    let report = mass_report(&cfg.analysis_input())?;
    Ok(AnalyzeOutput { command: "analyze", tolerances: tol, family: cfg.config.paths.describe(), report })
}

#[derive(Debug, Serialize)]
pub struct PathChoice {
    pub family: String,
    pub speed: f64,
    pub constants: PathConstants,
}

#[derive(Debug, Serialize)]
pub struct CollarRun {
    pub m: f64,
    pub k: f64,
    pub a: f64,
    /// `"a_o"`, `"override"` or `"scaled"`.
    pub a_source: &'static str,
    /// Solution of the `A_o` equation, when its preconditions hold.
    pub a_choice: Option<AChoice>,
    pub certificate: CurvatureField,
    pub respects_floor: bool,
    /// Flat pipeline only: the interior minimum is strictly positive.
    pub interior_positive: Option<bool>,
    pub max_slice_mass_discrepancy: f64,
    pub slices: Vec<SliceReport>,
}

#[derive(Debug, Serialize)]
pub struct CollarOutput {
    pub schema_version: u32,
    pub command: &'static str,
    pub tolerances: Tolerances,
    pub pipeline: Pipeline,
    pub r_o: f64,
    pub tau: f64,
    pub grid: Grid,
    pub path: PathChoice,
    pub runs: Vec<CollarRun>,
    pub limit_study: Option<LimitStudy>,
    pub limit_deviations_nonincreasing: Option<bool>,
    pub certified: bool,
}

fn choose_path(cfg: &Resolved) -> Result<PathChoice> {
    let family = cfg.config.paths;
    let est = match cfg.pipeline {
        Pipeline::Flat => zeta_upper_bound(&cfg.metric, family, cfg.grid)?,
        Pipeline::Hyperbolic { kappa } => xi_over_family(&cfg.metric, cfg.tau(), kappa, family, cfg.grid)?.1,
    };
    Ok(PathChoice { family: family.describe(), speed: est.best_speed, constants: est.constants })
}

pub fn collar(cfg: &Resolved, tol: Tolerances) -> Result<(CollarOutput, Status)> {
    let c = &cfg.config;
    let ms = match (c.m, &c.m_sequence) {
        (Some(m), None) => vec![m],
        (None, Some(seq)) => seq.values(),
        _ => bail!("collar needs m or m_sequence"),
    };
    if ms.is_empty() {
        bail!("m_sequence is empty");
    }
    let tau = cfg.tau();
    let choice = choose_path(cfg)?;
    let path = reparametrized_path(&cfg.metric, choice.speed, cfg.grid);

    let mut runs = Vec::with_capacity(ms.len());
    for &m in &ms {
        let mut col = CollarMetric::new(path.clone(), choice.constants, m, tau, cfg.pipeline, c.a)?;
        let mut a_source = if c.a.is_some() { "override" } else { "a_o" };
        if let Some(s) = c.a_scale {
            let a_o = col.a();
            col = CollarMetric::new(path.clone(), choice.constants, m, tau, cfg.pipeline, Some(s * a_o))?;
            a_source = "scaled";
        }
        let field = col.scalar_curvature_field(cfg.grid, c.keep_field)?;
        let slices = cfg
            .grid
            .t_nodes()
            .into_iter()
            .map(|t| col.slice_report(t))
            .collect::<qlm_core::Result<Vec<_>>>()?;
        let max_disc = slices.iter().map(SliceReport::mass_discrepancy).fold(0.0, f64::max);
        runs.push(CollarRun {
            m,
            k: col.k(),
            a: col.a(),
            a_source,
            a_choice: col.a_choice(),
            respects_floor: field.respects_floor(tol.floor),
            interior_positive: matches!(cfg.pipeline, Pipeline::Flat).then_some(field.min_interior > 0.0),
            certificate: field,
            max_slice_mass_discrepancy: max_disc,
            slices,
        });
    }

    let study = if c.m_sequence.is_some() && ms.iter().all(|&m| m < 0.0) {
        Some(limit_study(&choice.constants, tau, cfg.metric.r_o(), cfg.pipeline, &ms)?)
    } else {
        None
    };
    let certified = runs.iter().all(|r| r.respects_floor);
    let out = CollarOutput {
        schema_version: SCHEMA_VERSION,
        command: "collar",
        tolerances: tol,
        pipeline: cfg.pipeline,
        r_o: cfg.metric.r_o(),
        tau,
        grid: cfg.grid,
        path: choice,
        runs,
        limit_deviations_nonincreasing: study.as_ref().map(|s| s.deviations_nonincreasing(0.0)),
        limit_study: study,
        certified,
    };
    Ok((out, if certified { Status::Ok } else { Status::Breach }))
}

#[derive(Debug, Serialize)]
pub struct SelftestOutput {
    pub schema_version: u32,
    pub command: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub criteria: Vec<Outcome>,
}

pub fn selftest() -> (SelftestOutput, Status) {
    let criteria = acceptance::run_all();
    let failed = criteria.iter().filter(|o| !o.passed).count();
    for o in &criteria {
        eprintln!("{o}");
    }
    let status = if failed == 0 { Status::Ok } else { Status::SelftestFailed };
    let out = SelftestOutput {
        schema_version: SCHEMA_VERSION,
        command: "selftest",
        passed: criteria.len() - failed,
        failed,
        criteria,
    };
    (out, status)
}

/// Directory against which relative paths inside a config file are resolved.
pub fn base_dir(config: &Path) -> &Path {
    match config.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}
