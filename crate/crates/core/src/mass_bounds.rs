//! Bartnik mass upper bounds, Hawking mass lower bounds and positivity verdicts.
//!
//! Every roundness input `zeta` is an upper bound for the true infimum. All bounds
//! increase with `zeta` and every positivity threshold is of the form
//! `zeta < threshold`, so substituting an upper bound keeps upper bounds valid and
//! positive verdicts sound.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric_paths::{admissible_paths, zeta_upper_bound, PathFamily, ZetaEstimate, ZetaKind};
use crate::roots::{theta_root, xi_root, ThetaResult, XiResult};
use crate::sphere_metrics::{
    brown_york_mass, hawking_mass, hyperbolic_hawking_mass, surface_data, AxisymMetricSpec,
    BrownYorkMass, HorizonSpec, MeanCurvatureSpec, SurfaceData,
};
use crate::{Grid, Pipeline};

/// Absolute slack used when deciding inequalities between computed quantities.
pub const VERDICT_TOL: f64 = 1e-12;

/// Version of the serialized report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// An inequality `lhs <= rhs` evaluated on the inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    /// `rhs - lhs`; negative values beyond the tolerance mean a violation.
    pub slack: f64,
}

impl Verdict {
    fn le(lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        Self { holds: slack >= -VERDICT_TOL * lhs.abs().max(rhs.abs()).max(1.0), slack }
    }
}

/// Bounds when the scalar curvature is nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatBounds {
    pub tau: f64,
    pub zeta: f64,
    pub theta: ThetaResult,
    pub hawking_mass: f64,
    /// `(r_o / 2)(theta^2 - tau^2)`.
    pub bartnik_upper_bound: f64,
    /// Same bound written through the Hawking mass.
    pub bartnik_bound_from_hawking_mass: f64,
    /// `(3/2) r_o (1 + 3 tau zeta / 4) tau zeta + m_H`.
    pub weak_bound: f64,
    /// `tau <= theta`, equivalently `m_H >= (r_o/2)(1 - theta^2)`.
    pub tau_le_theta: Verdict,
    pub hawking_lower_bound: f64,
    /// `tau^2 + r_h / r_o <= theta^2`, when a horizon is present.
    pub horizon_inequality: Option<Verdict>,
    pub hawking_lower_bound_with_horizon: Option<f64>,
}

/// Bounds for the Euclidean pipeline from a roundness estimate `zeta`.
pub fn flat_mass_bounds(
    g: &AxisymMetricSpec,
    h: &MeanCurvatureSpec,
    zeta: f64,
    horizon: Option<&HorizonSpec>,
) -> Result<FlatBounds> {
    flat_bounds(g.r_o(), h.tau(g), hawking_mass(g, h), zeta, horizon.map(HorizonSpec::r_h))
}

/// The flat bounds from scalar data: area radius, `tau`, Hawking mass, `zeta` and an
/// optional horizon radius. `tau = 0` is allowed here.
pub fn flat_bounds(r_o: f64, tau: f64, m_h: f64, zeta: f64, r_h: Option<f64>) -> Result<FlatBounds> {
    if !(r_o > 0.0 && r_o.is_finite() && m_h.is_finite()) {
        return Err(Error::InvalidInput(format!("need r_o > 0 and finite m_H, got {r_o}, {m_h}")));
    }
    let theta = theta_root(tau, zeta)?;
    let th2 = theta.theta * theta.theta;
    let bound = 0.5 * r_o * (th2 - tau * tau);
    let from_hawking = if (1.0 - tau * tau).abs() > 1e-8 {
        m_h * (th2 - tau * tau) / (1.0 - tau * tau)
    } else {
        m_h + 0.5 * r_o * (th2 - 1.0)
    };
    let tz = tau * zeta;
    let (horizon_inequality, lower_h) = match r_h {
        Some(r_h) => {
            let ratio = r_h / r_o;
            (
                Some(Verdict::le(tau * tau + ratio, th2)),
                Some(0.5 * r_o * (1.0 + ratio - th2)),
            )
        }
        None => (None, None),
    };
    Ok(FlatBounds {
        tau,
        zeta,
        theta,
        hawking_mass: m_h,
        bartnik_upper_bound: bound,
        bartnik_bound_from_hawking_mass: from_hawking,
        weak_bound: 1.5 * r_o * (1.0 + 0.75 * tz) * tz + m_h,
        tau_le_theta: Verdict::le(tau, theta.theta),
        hawking_lower_bound: 0.5 * r_o * (1.0 - th2),
        horizon_inequality,
        hawking_lower_bound_with_horizon: lower_h,
    })
}

/// Horizon-ratio positivity criterion: `zeta < (sqrt 2 / 3) r_h / r_o` forces `m_H > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HorizonPositivity {
    pub ratio: f64,
    pub threshold: f64,
    pub holds: bool,
}

pub fn horizon_criterion(zeta: f64, r_h: f64, r_o: f64) -> Result<HorizonPositivity> {
    if !(zeta >= 0.0 && r_h > 0.0 && r_o > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need zeta >= 0, r_h > 0, r_o > 0; got {zeta}, {r_h}, {r_o}"
        )));
    }
    if r_h > r_o {
        return Err(Error::Admissibility {
            reason: "horizon_larger_than_surface",
            detail: format!("r_h = {r_h} exceeds r_o = {r_o}; the criterion assumes r_h <= r_o"),
        });
    }
    let ratio = r_h / r_o;
    let threshold = SQRT_2 / 3.0 * ratio;
    Ok(HorizonPositivity { ratio, threshold, holds: zeta < threshold })
}

/// Bartnik-mass positivity criterion with `lambda = 2 m_B / r_o`.
///
/// The two thresholds differ by the power of `1 + lambda`; `holds` uses the smaller
/// one, `holds_weaker` the larger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BartnikPositivity {
    pub lambda: f64,
    /// `(sqrt 2 / 3)(1 + lambda)^{-1} min(lambda, 1)`.
    pub threshold: f64,
    /// `(sqrt 2 / 3)(1 + lambda)^{-1/2} min(lambda, 1)`.
    pub weaker_threshold: f64,
    pub holds: bool,
    pub holds_weaker: bool,
}

pub fn bartnik_criterion(zeta: f64, bartnik_bound: f64, r_o: f64) -> Result<BartnikPositivity> {
    if !(bartnik_bound > 0.0 && bartnik_bound.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "Bartnik mass value must be positive, got {bartnik_bound}"
        )));
    }
    if !(zeta >= 0.0 && r_o > 0.0) {
        return Err(Error::InvalidInput(format!("need zeta >= 0, r_o > 0; got {zeta}, {r_o}")));
    }
    let lambda = 2.0 * bartnik_bound / r_o;
    let c = SQRT_2 / 3.0 * lambda.min(1.0);
    let threshold = c / (1.0 + lambda);
    let weaker_threshold = c / (1.0 + lambda).sqrt();
    Ok(BartnikPositivity {
        lambda,
        threshold,
        weaker_threshold,
        holds: zeta < threshold,
        holds_weaker: zeta < weaker_threshold,
    })
}

/// Bounds when the scalar curvature is at least `-6 kappa^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicBounds {
    pub kappa: f64,
    pub tau: f64,
    pub xi: XiResult,
    pub hawking_mass: f64,
    /// `(r_o/2)[k^2 r^2 (1 + 3 tau xi/2)^2 + (1 + 3 tau xi/2)^{2/3} - k^2 r^2 - 1] + m_H^H`.
    pub bartnik_upper_bound: f64,
    /// `(r_o/2)(3 k^2 r^2 + 1)(1 + 3 tau xi / 4) tau xi + m_H^H`.
    pub weak_bound: f64,
    pub exact_le_weak: Verdict,
    /// `theta_kappa <= theta` (only when `beta > 0`).
    pub theta_kappa_le_theta: Option<Verdict>,
    /// The exact bound is nonnegative.
    pub bound_nonnegative: Verdict,
    /// The exact bound is at least `r_h / 2` (horizon of mean curvature `2 kappa`).
    pub horizon_test: Option<Verdict>,
}

pub fn hyperbolic_mass_bounds(
    g: &AxisymMetricSpec,
    h: &MeanCurvatureSpec,
    kappa: f64,
    xi: &XiResult,
    horizon: Option<&HorizonSpec>,
) -> Result<HyperbolicBounds> {
    let m_h = hyperbolic_hawking_mass(g, h, kappa)?;
    hyperbolic_bounds(g.r_o(), h.tau(g), m_h, kappa, xi, horizon.map(HorizonSpec::r_h))
}

/// The hyperbolic bounds from scalar data; `m_h` is the hyperbolic Hawking mass.
pub fn hyperbolic_bounds(
    r_o: f64,
    tau: f64,
    m_h: f64,
    kappa: f64,
    xi: &XiResult,
    r_h: Option<f64>,
) -> Result<HyperbolicBounds> {
    if !(r_o > 0.0 && kappa > 0.0 && m_h.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "need r_o > 0, kappa > 0, tau >= 0, finite m_H; got {r_o}, {kappa}, {tau}, {m_h}"
        )));
    }
    let kr2 = kappa * kappa * r_o * r_o;
    let tx = tau * xi.xi;
    let base = 1.0 + 1.5 * tx;
    let bound = 0.5 * r_o * (kr2 * base * base + base.powf(2.0 / 3.0) - kr2 - 1.0) + m_h;
    let weak = 0.5 * r_o * (3.0 * kr2 + 1.0) * (1.0 + 0.75 * tx) * tx + m_h;
    let theta_kappa_le_theta = match (xi.theta_kappa, xi.theta) {
        (Some(tk), Some(th)) => Some(Verdict::le(tk, th)),
        _ => None,
    };
    Ok(HyperbolicBounds {
        kappa,
        tau,
        xi: *xi,
        hawking_mass: m_h,
        bartnik_upper_bound: bound,
        weak_bound: weak,
        exact_le_weak: Verdict::le(bound, weak),
        theta_kappa_le_theta,
        bound_nonnegative: Verdict::le(0.0, bound),
        horizon_test: r_h.map(|r_h| Verdict::le(0.5 * r_h, bound)),
    })
}

/// Comparison with the earlier bound `sqrt(alpha / (beta - (1 + alpha) tau^2)) tau m_H + m_H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CcmmComparison {
    pub ccmm_bound: f64,
    pub theta_bound: f64,
    /// The `theta` bound is the smaller of the two.
    pub theta_bound_smaller: bool,
}

/// `None` unless `tau^2 < beta / (1 + alpha)`.
pub fn ccmm_comparison(alpha: f64, beta: f64, tau: f64, m_h: f64) -> Option<CcmmComparison> {
    let denom = beta - (1.0 + alpha) * tau * tau;
    if !(denom > 0.0 && alpha >= 0.0 && beta > 0.0) {
        return None;
    }
    let ccmm = (alpha / denom).sqrt() * tau * m_h + m_h;
    let theta = theta_root(tau, (alpha / (2.0 * beta)).sqrt()).ok()?.theta;
    // tau < 1 here, so m_H (theta^2 - tau^2)/(1 - tau^2) is the theta bound
    let theta_bound = m_h * (theta * theta - tau * tau) / (1.0 - tau * tau);
    Some(CcmmComparison { ccmm_bound: ccmm, theta_bound, theta_bound_smaller: theta_bound <= ccmm })
}

/// Hyperbolic `xi`: the smallest root over the admissible members of the family.
pub fn xi_over_family(
    g: &AxisymMetricSpec,
    tau: f64,
    kappa: f64,
    family: PathFamily,
    grid: Grid,
) -> Result<(XiResult, ZetaEstimate)> {
    let cands = admissible_paths(g, family, grid, Pipeline::Hyperbolic { kappa })?;
    let r_o = g.r_o();
    let mut best: Option<(XiResult, usize)> = None;
    for (i, c) in cands.iter().enumerate() {
        let xi = xi_root(c.constants.alpha, c.constants.beta, tau, kappa, r_o)?;
        if best.as_ref().is_none_or(|(b, _)| xi.xi < b.xi) {
            best = Some((xi, i));
        }
    }
    let (xi, i) = best.expect("admissible_paths is nonempty");
    let zeta_k = cands
        .iter()
        .map(|c| c.constants.zeta_kappa(kappa, r_o))
        .fold(f64::INFINITY, f64::min);
    Ok((
        xi,
        ZetaEstimate {
            value: zeta_k,
            kind: ZetaKind::Hyperbolic { kappa },
            family: family.describe(),
            upper_bound: true,
            best_speed: cands[i].path.speed(),
            constants: cands[i].constants,
        },
    ))
}

/// Everything the analysis needs besides the metric.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisInput {
    pub metric: AxisymMetricSpec,
    pub mean_curvature: MeanCurvatureSpec,
    pub pipeline: Pipeline,
    pub horizon: Option<HorizonSpec>,
    pub family: PathFamily,
    pub grid: Grid,
    /// A known value (or upper bound) of the Bartnik mass, for the positivity criterion.
    pub bartnik_mass: Option<f64>,
    pub brown_york: bool,
}

impl AnalysisInput {
    pub fn new(metric: AxisymMetricSpec, mean_curvature: MeanCurvatureSpec, pipeline: Pipeline) -> Self {
        Self {
            metric,
            mean_curvature,
            pipeline,
            horizon: None,
            family: PathFamily::default(),
            grid: Grid::default(),
            bartnik_mass: None,
            brown_york: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassReport {
    pub schema_version: u32,
    /// Length power of every dimensionful field, keyed by dotted path.
    pub units: BTreeMap<&'static str, &'static str>,
    pub pipeline: Pipeline,
    pub r_o: f64,
    pub h_o: f64,
    pub tau: f64,
    pub r_h: Option<f64>,
    pub surface: SurfaceData,
    pub grid: Grid,
    /// Roundness estimate used for the flat bounds (always an upper bound).
    pub zeta: Option<ZetaEstimate>,
    pub hawking_mass: f64,
    pub flat: Option<FlatBounds>,
    pub horizon_positivity: Option<HorizonPositivity>,
    pub bartnik_positivity: Option<BartnikPositivity>,
    /// Roundness estimate `zeta_{g,kappa}` and the path realising the smallest `xi`.
    pub zeta_kappa: Option<ZetaEstimate>,
    pub hyperbolic: Option<HyperbolicBounds>,
    pub ccmm: Option<CcmmComparison>,
    pub brown_york: Option<BrownYorkMass>,
}

fn units_table(pipeline: Pipeline) -> BTreeMap<&'static str, &'static str> {
    let mut u = BTreeMap::from([
        ("r_o", "length"),
        ("h_o", "length^-1"),
        ("r_h", "length"),
        ("hawking_mass", "length"),
        ("surface.area", "length^2"),
        ("surface.r_o", "length"),
        ("surface.k_min", "length^-2"),
        ("surface.k_max", "length^-2"),
        ("flat.hawking_mass", "length"),
        ("flat.bartnik_upper_bound", "length"),
        ("flat.bartnik_bound_from_hawking_mass", "length"),
        ("flat.weak_bound", "length"),
        ("flat.hawking_lower_bound", "length"),
        ("flat.hawking_lower_bound_with_horizon", "length"),
        ("ccmm.ccmm_bound", "length"),
        ("ccmm.theta_bound", "length"),
        ("brown_york.mass", "length"),
        ("brown_york.hawking_mass", "length"),
        ("brown_york.minkowski_excess", "length"),
        ("brown_york.mean_curvature_defect", "length"),
        ("brown_york.total_mean_curvature", "length"),
        ("brown_york.decomposition_residual", "length"),
    ]);
    if let Pipeline::Hyperbolic { .. } = pipeline {
        u.extend([
            ("pipeline.kappa", "length^-1"),
            ("hyperbolic.kappa", "length^-1"),
            ("hyperbolic.hawking_mass", "length"),
            ("hyperbolic.bartnik_upper_bound", "length"),
            ("hyperbolic.weak_bound", "length"),
            ("hyperbolic.horizon_test.slack", "length"),
            ("hyperbolic.bound_nonnegative.slack", "length"),
        ]);
    }
    u
}

/// Runs metric checks, path search, root solves and bounds for one configuration.
pub fn mass_report(input: &AnalysisInput) -> Result<MassReport> {
    let g = &input.metric;
    let h = &input.mean_curvature;
    let r_o = g.r_o();
    let tau = h.tau(g);
    let surface = surface_data(g, input.grid.x_intervals)?;
    let m_h = hawking_mass(g, h);
    let horizon = input.horizon.as_ref();

    let mut report = MassReport {
        schema_version: SCHEMA_VERSION,
        units: units_table(input.pipeline),
        pipeline: input.pipeline,
        r_o,
        h_o: h.h_o(),
        tau,
        r_h: horizon.map(HorizonSpec::r_h),
        surface,
        grid: input.grid,
        zeta: None,
        hawking_mass: m_h,
        flat: None,
        horizon_positivity: None,
        bartnik_positivity: None,
        zeta_kappa: None,
        hyperbolic: None,
        ccmm: None,
        brown_york: None,
    };

    match input.pipeline {
        Pipeline::Flat => {
            let zeta = zeta_upper_bound(g, input.family, input.grid)?;
            let flat = flat_mass_bounds(g, h, zeta.value, horizon)?;
            if let Some(hz) = horizon {
                report.horizon_positivity = Some(horizon_criterion(zeta.value, hz.r_h(), r_o)?);
            }
            if let Some(mb) = input.bartnik_mass {
                report.bartnik_positivity = Some(bartnik_criterion(zeta.value, mb, r_o)?);
            }
            let c = zeta.constants;
            report.ccmm = ccmm_comparison(c.alpha, c.beta, tau, m_h);
            report.flat = Some(flat);
            report.zeta = Some(zeta);
        }
        Pipeline::Hyperbolic { kappa } => {
            let (xi, zk) = xi_over_family(g, tau, kappa, input.family, input.grid)?;
            report.hyperbolic = Some(hyperbolic_mass_bounds(g, h, kappa, &xi, horizon)?);
            report.zeta_kappa = Some(zk);
        }
    }
    if input.brown_york {
        report.brown_york = Some(brown_york_mass(g, h, input.grid.x_intervals)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round(r_o: f64) -> AxisymMetricSpec {
        AxisymMetricSpec::round(r_o).unwrap()
    }

    #[test]
    fn round_bound_equals_hawking_mass() {
        let g = round(2.0);
        let h = MeanCurvatureSpec::from_tau(0.5, 2.0).unwrap();
        let b = flat_mass_bounds(&g, &h, 0.0, None).unwrap();
        assert_eq!(b.theta.theta, 1.0);
        assert!((b.bartnik_upper_bound - 0.75).abs() < 1e-15);
        assert!((b.bartnik_upper_bound - b.hawking_mass).abs() < 1e-15);
        assert!(b.tau_le_theta.holds);
    }

    #[test]
    fn schwarzschild_sphere_saturates_horizon_inequality() {
        let g = round(4.0);
        let h = MeanCurvatureSpec::from_tau(0.5f64.sqrt(), 4.0).unwrap();
        let b = flat_mass_bounds(&g, &h, 0.0, Some(&HorizonSpec::new(2.0).unwrap())).unwrap();
        let v = b.horizon_inequality.unwrap();
        assert!(v.holds);
        assert!(v.slack.abs() < 1e-14);
        assert!((b.hawking_mass - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bound_uses_theta_root() {
        let g = round(1.0);
        let h = MeanCurvatureSpec::from_tau(0.9, 1.0).unwrap();
        let zeta = 2.0 / 3.0 / 0.9;
        let b = flat_mass_bounds(&g, &h, zeta, None).unwrap();
        let th = 1.465_571_231_876_768f64;
        assert!((b.theta.theta - th).abs() < 1e-12);
        assert!((b.bartnik_upper_bound - 0.5 * (th * th - 0.81)).abs() < 1e-12);
        assert!((b.bartnik_bound_from_hawking_mass - b.bartnik_upper_bound).abs() < 1e-12);
        assert!(b.weak_bound >= b.bartnik_upper_bound);
    }

    #[test]
    fn horizon_criterion_thresholds() {
        assert!(horizon_criterion(0.0, 0.3, 1.0).unwrap().holds);
        let v = horizon_criterion(0.4, 0.5, 1.0).unwrap();
        assert!((v.threshold - SQRT_2 / 6.0).abs() < 1e-15);
        assert!(!v.holds);
        assert_eq!(horizon_criterion(0.1, 2.0, 1.0).unwrap_err().reason(), "horizon_larger_than_surface");
    }

    #[test]
    fn bartnik_criterion_thresholds() {
        let v = bartnik_criterion(0.0, 0.5, 1.0).unwrap();
        assert!(v.holds && v.holds_weaker);
        assert!((v.threshold - SQRT_2 / 6.0).abs() < 1e-15);
        assert!((v.weaker_threshold - 1.0 / 3.0).abs() < 1e-15);
        assert!(bartnik_criterion(0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn ccmm_is_absent_outside_domain_and_equal_at_zero_tau() {
        assert!(ccmm_comparison(0.005, 0.6, 0.8, 0.1).is_none());
        let c = ccmm_comparison(0.005, 0.6, 0.0, 0.5).unwrap();
        assert_eq!(c.ccmm_bound, 0.5);
        assert_eq!(c.theta_bound, 0.5);
        let small = ccmm_comparison(0.005, 0.6, 1e-3, 0.5).unwrap();
        assert!(small.theta_bound < small.ccmm_bound);
        assert!(small.theta_bound_smaller);
    }

    #[test]
    fn round_hyperbolic_bound_is_hawking_mass() {
        let g = round(1.0);
        let h = MeanCurvatureSpec::from_tau(0.7, 1.0).unwrap();
        let xi = xi_root(0.0, 1.0, 0.7, 0.5, 1.0).unwrap();
        let b = hyperbolic_mass_bounds(&g, &h, 0.5, &xi, None).unwrap();
        assert_eq!(b.bartnik_upper_bound, b.hawking_mass);
        assert!(b.exact_le_weak.holds);
    }

    #[test]
    fn report_for_round_flat_input() {
        let input = AnalysisInput::new(round(1.0), MeanCurvatureSpec::from_tau(0.5, 1.0).unwrap(), Pipeline::Flat);
        let r = mass_report(&input).unwrap();
        assert_eq!(r.zeta.as_ref().unwrap().value, 0.0);
        let f = r.flat.unwrap();
        assert_eq!(f.theta.theta, 1.0);
        assert!((f.bartnik_upper_bound - 0.375).abs() < 1e-15);
        assert_eq!(r.units["flat.bartnik_upper_bound"], "length");
    }

    #[test]
    fn report_rejects_sign_changing_curvature() {
        let g = AxisymMetricSpec::bump(1.0, 0.4).unwrap();
        let input = AnalysisInput::new(g, MeanCurvatureSpec::from_tau(0.5, 1.0).unwrap(), Pipeline::Flat);
        assert_eq!(mass_report(&input).unwrap_err().reason(), "beta_nonpositive");
    }
}
