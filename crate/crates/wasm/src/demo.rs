//! The three demo computations, all on the unit-radius bump `w = 1 + eps (1 - x^2)`.

use qlm_core::collar::{collar_limits, CollarMetric};
use qlm_core::mass_bounds::{ccmm_comparison, flat_bounds};
use qlm_core::metric_paths::{linear_path, path_constants, PathConstants};
use qlm_core::sphere_metrics::{brown_york_mass, embed_revolution, AxisymMetricSpec, BrownYorkMass, MeanCurvatureSpec};
use qlm_core::{Error, Grid, Pipeline, Result};
use serde::Serialize;

const MAX_SAMPLES: usize = 2001;

fn bump(eps: f64) -> Result<AxisymMetricSpec> {
    AxisymMetricSpec::bump(1.0, eps)
}

fn pipeline(kappa: f64) -> Result<Pipeline> {
    if kappa == 0.0 {
        Ok(Pipeline::Flat)
    } else if kappa > 0.0 && kappa.is_finite() {
        Ok(Pipeline::Hyperbolic { kappa })
    } else {
        Err(Error::InvalidInput(format!("kappa must be nonnegative, got {kappa}")))
    }
}

#[derive(Debug, Serialize)]
pub struct BoundCurve {
    pub constants: PathConstants,
    pub zeta: f64,
    pub tau: Vec<f64>,
    pub theta: Vec<f64>,
    pub hawking_mass: Vec<f64>,
    pub bartnik_bound: Vec<f64>,
    pub weak_bound: Vec<f64>,
    /// `null` where the earlier bound is undefined.
    pub ccmm_bound: Vec<Option<f64>>,
}

pub fn bound_curve(eps: f64, tau_max: f64, samples: usize) -> Result<BoundCurve> {
    if !(2..=MAX_SAMPLES).contains(&samples) || !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need 2 <= samples <= {MAX_SAMPLES} and tau_max > 0, got {samples}, {tau_max}"
        )));
    }
    let c = path_constants(&linear_path(&bump(eps)?), Pipeline::Flat)?;
    let zeta = c.zeta();
    let mut out = BoundCurve {
        constants: c,
        zeta,
        tau: Vec::with_capacity(samples),
        theta: Vec::with_capacity(samples),
        hawking_mass: Vec::with_capacity(samples),
        bartnik_bound: Vec::with_capacity(samples),
        weak_bound: Vec::with_capacity(samples),
        ccmm_bound: Vec::with_capacity(samples),
    };
    for i in 0..samples {
        let tau = tau_max * i as f64 / (samples - 1) as f64;
        let m_h = 0.5 * (1.0 - tau * tau);
        let b = flat_bounds(1.0, tau, m_h, zeta, None)?;
        out.tau.push(tau);
        out.theta.push(b.theta.theta);
        out.hawking_mass.push(m_h);
        out.bartnik_bound.push(b.bartnik_upper_bound);
        out.weak_bound.push(b.weak_bound);
        out.ccmm_bound.push(ccmm_comparison(c.alpha, c.beta, tau, m_h).map(|x| x.ccmm_bound));
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct CollarProfile {
    pub m: f64,
    pub a: f64,
    pub k: f64,
    pub floor: f64,
    pub min_scalar_curvature: f64,
    pub argmin: (f64, f64),
    pub certified: bool,
    /// Area radius the end slice approaches as `m -> -inf`.
    pub u_limit: f64,
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub hawking_mass: Vec<f64>,
    pub slice_min_r: Vec<f64>,
}

pub fn collar_profile(eps: f64, tau: f64, log_m: f64, kappa: f64) -> Result<CollarProfile> {
    if !(0.0..=12.0).contains(&log_m) {
        return Err(Error::InvalidInput(format!("log10 |m| must lie in [0, 12], got {log_m}")));
    }
    let pipeline = pipeline(kappa)?;
    let m = -(10f64.powf(log_m));
    let path = linear_path(&bump(eps)?);
    let c = path_constants(&path, pipeline)?;
    let grid = Grid::new(51, 64)?;
    let col = CollarMetric::new(path, c, m, tau, pipeline, None)?;
    let field = col.scalar_curvature_field(grid, false)?;
    let limits = collar_limits(&c, tau, 1.0, pipeline)?;
    let mut out = CollarProfile {
        m,
        a: col.a(),
        k: col.k(),
        floor: field.floor,
        min_scalar_curvature: field.min,
        argmin: field.argmin,
        certified: field.respects_floor(1e-10),
        u_limit: limits.u_end,
        t: Vec::new(),
        u: Vec::new(),
        hawking_mass: Vec::new(),
        slice_min_r: Vec::new(),
    };
    for t in grid.t_nodes() {
        let s = col.slice_report(t)?;
        out.t.push(t);
        out.u.push(s.u);
        out.hawking_mass.push(s.hawking_mass);
        out.slice_min_r.push(s.min_scalar_curvature);
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct Embedding {
    pub rho: Vec<f64>,
    pub z: Vec<f64>,
    /// `r_o^2 K` along the meridian.
    pub curvature: Vec<f64>,
    pub brown_york: BrownYorkMass,
}

pub fn embedding(eps: f64, tau: f64) -> Result<Embedding> {
    let g = bump(eps)?;
    let h = MeanCurvatureSpec::from_tau(tau, 1.0)?;
    let emb = embed_revolution(&g, 128)?;
    Ok(Embedding {
        rho: emb.rho,
        z: emb.z,
        curvature: emb.normalized_curvature,
        brown_york: brown_york_mass(&g, &h, 128)?,
    })
}
