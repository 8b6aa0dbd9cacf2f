//! The collar extension
//!
//! ```text
//! gamma = A^2 dt^2 + r_o^{-2} u(A k t)^2 g(t),   t in [0, 1],
//! ```
//!
//! glued to a sphere with metric `g` and constant mean curvature `H_o`. The slices
//! `t = const` are CMC spheres, and for `A = A_o` the scalar curvature respects the
//! floor of the pipeline (`0` flat, `-6 kappa^2` hyperbolic).

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric_paths::{PathConstants, TraceFreePath};
use crate::roots::{bisect, theta_root, xi_root, X_TOL};
use crate::warp_odes::{implicit_flat_inverse, integrate_warp, Warp, WarpFunction};
use crate::{Grid, Pipeline};

/// `k = tau (1 - 2m/r_o + kappa^2 r_o^2)^{-1/2}`.
pub fn collar_k(tau: f64, warp: &WarpFunction) -> f64 {
    tau / warp.radicand(warp.r_o).sqrt()
}

/// `u(s)` evaluated from scratch, for root searches that probe many `s`.
fn u_at(warp: &WarpFunction, s: f64) -> Result<f64> {
    if warp.kappa == 0.0 && warp.m == 0.0 {
        Ok(warp.r_o + s)
    } else if warp.kappa == 0.0 && warp.m < 0.0 {
        implicit_flat_inverse(warp.m, warp.r_o, s)
    } else {
        let t = integrate_warp(warp, s)?;
        t.eval(s).map(|(u, _)| u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ABranch {
    /// `alpha = 0`: the path is constant and every `A > 0` works; `A = r_o` by convention.
    Unconstrained,
    Flat,
    HyperbolicBetaPositive,
    HyperbolicBetaNonpositive,
}

/// The collar length parameter and its certificates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AChoice {
    pub a_o: f64,
    pub branch: ABranch,
    /// Relative residual of the defining equation.
    pub residual: f64,
    /// Lower bound the root must respect.
    pub lower_bound: f64,
    /// Upper bound (hyperbolic, `beta > 0` only).
    pub upper_bound: Option<f64>,
    pub bracket_ok: bool,
}

fn unconstrained(r_o: f64) -> AChoice {
    AChoice {
        a_o: r_o,
        branch: ABranch::Unconstrained,
        residual: 0.0,
        lower_bound: 0.0,
        upper_bound: None,
        bracket_ok: true,
    }
}

/// Smallest `A > 0` with `beta - k^2 - (alpha/2) A^{-2} u(Ak)^2 = 0`.
///
/// Solved as `u(s)/s = k^{-1} sqrt(2 (beta - k^2) / alpha)` for `s = A k`; `u(s)/s`
/// decreases from `+inf` to `1` when `m <= 0`, so the solution is unique there.
pub fn choose_a_flat(c: &PathConstants, warp: &WarpFunction, k: f64) -> Result<AChoice> {
    let (alpha, beta, r_o) = (c.alpha, c.beta, warp.r_o);
    if warp.kappa != 0.0 {
        return Err(Error::InvalidInput("choose_a_flat needs kappa = 0".into()));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
    }
    let margin = beta - (1.0 + 0.5 * alpha) * k * k;
    if !(margin > 0.0) {
        return Err(Error::Precondition {
            name: "beta_exceeds_k2_margin",
            detail: format!(
                "need beta > (1 + alpha/2) k^2; beta = {beta}, (1 + alpha/2) k^2 = {}",
                (1.0 + 0.5 * alpha) * k * k
            ),
        });
    }
    if alpha == 0.0 {
        return Ok(unconstrained(r_o));
    }
    let target = (2.0 * (beta - k * k) / alpha).sqrt() / k;
    let g = |s: f64| u_at(warp, s).map(|u| u - target * s).unwrap_or(f64::NAN);
    // u >= r_o gives g > 0 on (0, r_o / target]; expand until the sign flips.
    let mut lo = r_o / target;
    let mut hi = 2.0 * lo;
    while g(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 * r_o {
            return Err(Error::RootFinding("no root of u(s) = target s below 1e12 r_o".into()));
        }
    }
    let s = bisect(g, lo, hi, X_TOL * 1e-2)?;
    let a_o = s / k;
    let u = u_at(warp, s)?;
    let residual = (beta - k * k - 0.5 * alpha * u * u / (a_o * a_o)).abs() / beta.abs().max(k * k);
    let lower_bound = r_o * (0.5 * alpha / (beta - k * k)).sqrt();
    Ok(AChoice {
        a_o,
        branch: ABranch::Flat,
        residual,
        lower_bound,
        upper_bound: None,
        bracket_ok: a_o >= lower_bound * (1.0 - 1e-12),
    })
}

/// `A_o` for the AdS-Schwarzschild collar.
///
/// `beta > 0`: the unique root of
/// `(beta - k^2) + (3 kappa^2 (1 - k^2) - (alpha/2) A^{-2}) u(Ak)^2`, which increases in `A`.
/// `beta <= 0`: the closed form making the scalar curvature floor sharp at `t = 0`.
pub fn choose_a_hyperbolic(c: &PathConstants, warp: &WarpFunction, k: f64) -> Result<AChoice> {
    let (alpha, beta, r_o, kappa) = (c.alpha, c.beta, warp.r_o, warp.kappa);
    if !(kappa > 0.0) {
        return Err(Error::InvalidInput("choose_a_hyperbolic needs kappa > 0".into()));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
    }
    let k2 = k * k;
    let kr2 = kappa * kappa * r_o * r_o;
    if beta > 0.0 {
        if !(k2 < beta) {
            return Err(Error::Precondition {
                name: "hyperbolic_beta_positive_k_bound",
                detail: format!("need k^2 < beta; k^2 = {k2}, beta = {beta}"),
            });
        }
        if alpha == 0.0 {
            return Ok(unconstrained(r_o));
        }
        let lower_bound = (alpha * r_o * r_o / (2.0 * (beta - k2) + 6.0 * kr2 * (1.0 - k2))).sqrt();
        let upper_bound = (alpha / (6.0 * kappa * kappa * (1.0 - k2))).sqrt();
        let f = |a: f64| {
            u_at(warp, a * k)
                .map(|u| (beta - k2) + (3.0 * kappa * kappa * (1.0 - k2) - 0.5 * alpha / (a * a)) * u * u)
                .unwrap_or(f64::NAN)
        };
        let a_o = bisect(f, lower_bound, upper_bound, X_TOL * 1e-2)?;
        let u = u_at(warp, a_o * k)?;
        let bracket_term = 3.0 * kappa * kappa * (1.0 - k2) - 0.5 * alpha / (a_o * a_o);
        let scale = (beta - k2).abs() + (3.0 * kappa * kappa * (1.0 - k2) + 0.5 * alpha / (a_o * a_o)) * u * u;
        Ok(AChoice {
            a_o,
            branch: ABranch::HyperbolicBetaPositive,
            residual: f(a_o).abs() / scale,
            lower_bound,
            upper_bound: Some(upper_bound),
            bracket_ok: bracket_term <= 0.0
                && a_o >= lower_bound * (1.0 - 1e-12)
                && a_o <= upper_bound * (1.0 + 1e-12),
        })
    } else {
        let denom = beta + 3.0 * kr2 - (1.0 + 3.0 * kr2) * k2;
        if !(denom > 0.0) {
            return Err(Error::Precondition {
                name: "hyperbolic_beta_nonpositive_k_bound",
                detail: format!(
                    "need beta + 3 kappa^2 r_o^2 - (1 + 3 kappa^2 r_o^2) k^2 > 0, got {denom}"
                ),
            });
        }
        let a_o = r_o * (0.5 * alpha / denom).sqrt();
        Ok(AChoice {
            a_o,
            branch: ABranch::HyperbolicBetaNonpositive,
            residual: 0.0,
            lower_bound: a_o,
            upper_bound: None,
            bracket_ok: true,
        })
    }
}

/// Dispatches on the pipeline.
pub fn choose_a(c: &PathConstants, warp: &WarpFunction, k: f64) -> Result<AChoice> {
    if warp.kappa == 0.0 {
        choose_a_flat(c, warp, k)
    } else {
        choose_a_hyperbolic(c, warp, k)
    }
}

/// An assembled collar.
#[derive(Debug, Clone)]
pub struct CollarMetric {
    path: TraceFreePath,
    constants: PathConstants,
    warp: Warp,
    a: f64,
    k: f64,
    tau: f64,
    pipeline: Pipeline,
    a_choice: Option<AChoice>,
}

impl CollarMetric {
    /// Builds the collar for mass parameter `m`. With `a = None` the length is `A_o`.
    pub fn new(
        path: TraceFreePath,
        constants: PathConstants,
        m: f64,
        tau: f64,
        pipeline: Pipeline,
        a: Option<f64>,
    ) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
        }
        let r_o = path.metric().r_o();
        let wf = WarpFunction::new(m, pipeline.kappa(), r_o)?;
        let k = collar_k(tau, &wf);
        let a_choice = choose_a(&constants, &wf, k);
        let (a, a_choice) = match a {
            Some(a) if a > 0.0 && a.is_finite() => (a, a_choice.ok()),
            Some(a) => return Err(Error::InvalidInput(format!("A must be positive, got {a}"))),
            None => {
                let c = a_choice?;
                (c.a_o, Some(c))
            }
        };
        let warp = Warp::new(wf, a * k)?;
        Ok(Self { path, constants, warp, a, k, tau, pipeline, a_choice })
    }

    pub fn path(&self) -> &TraceFreePath {
        &self.path
    }

    pub fn constants(&self) -> PathConstants {
        self.constants
    }

    pub fn warp(&self) -> &Warp {
        &self.warp
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn pipeline(&self) -> Pipeline {
        self.pipeline
    }

    pub fn r_o(&self) -> f64 {
        self.path.metric().r_o()
    }

    /// `A_o` and its certificates, when the defining equation is solvable.
    pub fn a_choice(&self) -> Option<AChoice> {
        self.a_choice
    }

    /// `(u(Akt), u'(Akt))`.
    pub fn radius(&self, t: f64) -> Result<(f64, f64)> {
        self.warp.u_and_slope((self.a * self.k * t).min(self.warp.s_max()))
    }

    /// Scalar curvature at `(t, x)` given `u = u(Akt)`.
    fn scalar_curvature_with(&self, u: f64, t: f64, x: f64) -> f64 {
        let kk = self.k * self.k;
        let kg = self.path.normalized_curvature(t, x);
        let v2 = self.path.velocity_norm_sq(t, x);
        let a2 = self.a * self.a;
        match self.pipeline {
            Pipeline::Flat => 2.0 / (u * u) * (kg - kk - 0.125 * v2 * u * u / a2),
            Pipeline::Hyperbolic { kappa } => {
                2.0 / (u * u) * (kg - kk) - 0.25 * v2 / a2 - 6.0 * kk * kappa * kappa
            }
        }
    }

    pub fn scalar_curvature(&self, t: f64, x: f64) -> Result<f64> {
        let (u, _) = self.radius(t)?;
        Ok(self.scalar_curvature_with(u, t, x))
    }

    /// Scalar curvature on the grid, with the minimum over all nodes and over nodes
    /// with `0 < t < 1`, `-1 < x < 1`.
    pub fn scalar_curvature_field(&self, grid: Grid, keep_values: bool) -> Result<CurvatureField> {
        let ts = grid.t_nodes();
        let xs = grid.x_nodes();
        let mut field = CurvatureField {
            floor: self.pipeline.scalar_curvature_floor(),
            min: f64::INFINITY,
            argmin: (0.0, 0.0),
            min_interior: f64::INFINITY,
            t: if keep_values { ts.clone() } else { Vec::new() },
            x: if keep_values { xs.clone() } else { Vec::new() },
            values: Vec::new(),
        };
        for (i, &t) in ts.iter().enumerate() {
            let (u, _) = self.radius(t)?;
            let mut row = Vec::with_capacity(if keep_values { xs.len() } else { 0 });
            for (j, &x) in xs.iter().enumerate() {
                let r = self.scalar_curvature_with(u, t, x);
                if !r.is_finite() {
                    return Err(Error::NonFinite { what: "scalar curvature", x });
                }
                if r < field.min {
                    field.min = r;
                    field.argmin = (t, x);
                }
                let interior = i > 0 && i + 1 < ts.len() && j > 0 && j + 1 < xs.len();
                if interior && r < field.min_interior {
                    field.min_interior = r;
                }
                if keep_values {
                    row.push(r);
                }
            }
            if keep_values {
                field.values.push(row);
            }
        }
        Ok(field)
    }

    /// Area, mean curvature and Hawking mass of the slice `Sigma_t`.
    pub fn slice_report(&self, t: f64) -> Result<SliceReport> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidInput(format!("t = {t} outside [0, 1]")));
        }
        let (u, du) = self.radius(t)?;
        let (k, r_o, tau) = (self.k, self.r_o(), self.tau);
        let kk = k * k;
        let area = 4.0 * PI * u * u;
        let h = 2.0 * k * du / u;
        let kappa = self.pipeline.kappa();
        let kap2 = kappa * kappa;
        // Hawking mass from (area, H) and the closed form along the collar
        let radius = (area / (4.0 * PI)).sqrt();
        let direct = 0.5 * radius * (1.0 + kap2 * radius * radius - h * h * radius * radius / 4.0);
        let m_sigma = 0.5 * r_o * (1.0 + kap2 * r_o * r_o - tau * tau);
        let formula = 0.5 * (u - r_o) * (1.0 - kk) + 0.5 * kap2 * (1.0 - kk) * (u.powi(3) - r_o.powi(3)) + m_sigma;
        let (tt, xs) = (t, self.path.grid().x_nodes());
        let min_r = xs
            .iter()
            .map(|&x| self.scalar_curvature_with(u, tt, x))
            .fold(f64::INFINITY, f64::min);
        Ok(SliceReport {
            t,
            u,
            area,
            mean_curvature: h,
            hawking_mass: direct,
            hawking_mass_formula: formula,
            min_scalar_curvature: min_r,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureField {
    pub floor: f64,
    pub min: f64,
    pub argmin: (f64, f64),
    pub min_interior: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub t: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<Vec<f64>>,
}

impl CurvatureField {
    pub fn respects_floor(&self, tol: f64) -> bool {
        self.min >= self.floor - tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceReport {
    pub t: f64,
    /// Area radius of the slice.
    pub u: f64,
    pub area: f64,
    pub mean_curvature: f64,
    /// Hawking mass (hyperbolic Hawking mass when `kappa > 0`) from area and mean curvature.
    pub hawking_mass: f64,
    /// The same mass from the closed form along the collar.
    pub hawking_mass_formula: f64,
    pub min_scalar_curvature: f64,
}

impl SliceReport {
    pub fn mass_discrepancy(&self) -> f64 {
        (self.hawking_mass - self.hawking_mass_formula).abs()
    }
}

/// Predicted `m -> -inf` limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollarLimits {
    /// `theta` (flat) or `(1 + 3 tau xi / 2)^{1/3}` (hyperbolic), so that `u -> r_o root^2`.
    pub root: f64,
    pub u_end: f64,
    pub a_o: f64,
    pub hawking_mass_end: f64,
}

/// The limits of `u(A_o k)`, `A_o` and the end-slice Hawking mass as `m -> -inf`.
pub fn collar_limits(c: &PathConstants, tau: f64, r_o: f64, pipeline: Pipeline) -> Result<CollarLimits> {
    match pipeline {
        Pipeline::Flat => {
            let ratio = c.zeta();
            let theta = theta_root(tau, ratio)?.theta;
            let th2 = theta * theta;
            Ok(CollarLimits {
                root: theta,
                u_end: r_o * th2,
                a_o: r_o * th2 * ratio,
                hawking_mass_end: 0.5 * r_o * (th2 - tau * tau),
            })
        }
        Pipeline::Hyperbolic { kappa } => {
            let xi = xi_root(c.alpha, c.beta, tau, kappa, r_o)?.xi;
            let base = 1.0 + 1.5 * tau * xi;
            let kr2 = kappa * kappa * r_o * r_o;
            let m_h = 0.5 * r_o * (1.0 + kr2 - tau * tau);
            Ok(CollarLimits {
                root: base.cbrt(),
                u_end: r_o * base.powf(2.0 / 3.0),
                a_o: r_o * xi,
                hawking_mass_end: 0.5 * r_o * (kr2 * base * base + base.powf(2.0 / 3.0) - kr2 - 1.0) + m_h,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRow {
    pub m: f64,
    pub k: f64,
    pub a_o: f64,
    pub u_end: f64,
    pub hawking_mass_end: f64,
    /// `|u_end / limit - 1|`.
    pub dev_u: f64,
    pub dev_a: f64,
    pub dev_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitStudy {
    pub limits: CollarLimits,
    pub rows: Vec<LimitRow>,
}

impl LimitStudy {
    /// Whether each deviation column is nonincreasing down the table, up to `slack`.
    pub fn deviations_nonincreasing(&self, slack: f64) -> bool {
        self.rows.windows(2).all(|w| {
            w[1].dev_u <= w[0].dev_u + slack
                && w[1].dev_a <= w[0].dev_a + slack
                && w[1].dev_mass <= w[0].dev_mass + slack
        })
    }
}

/// The default mass sequence `m = -10^j`, `j = 2..=8`.
pub fn default_mass_sequence() -> Vec<f64> {
    (2..=8).map(|j| -(10f64.powi(j))).collect()
}

fn rel_dev(v: f64, limit: f64) -> f64 {
    if limit == 0.0 {
        v.abs()
    } else {
        (v / limit - 1.0).abs()
    }
}

/// Runs `A_o` selection along `ms` and compares with the `m -> -inf` limits.
pub fn limit_study(
    c: &PathConstants,
    tau: f64,
    r_o: f64,
    pipeline: Pipeline,
    ms: &[f64],
) -> Result<LimitStudy> {
    let limits = collar_limits(c, tau, r_o, pipeline)?;
    let kap2 = pipeline.kappa().powi(2);
    let mut rows = Vec::with_capacity(ms.len());
    for &m in ms {
        if !(m < 0.0) {
            return Err(Error::InvalidInput(format!("limit study needs m < 0, got {m}")));
        }
        let wf = WarpFunction::new(m, pipeline.kappa(), r_o)?;
        let k = collar_k(tau, &wf);
        let choice = choose_a(c, &wf, k)?;
        let u = u_at(&wf, choice.a_o * k)?;
        let kk = k * k;
        let mass = 0.5 * u * (1.0 - kk) + m * kk + 0.5 * kap2 * u.powi(3) * (1.0 - kk);
        rows.push(LimitRow {
            m,
            k,
            a_o: choice.a_o,
            u_end: u,
            hawking_mass_end: mass,
            dev_u: rel_dev(u, limits.u_end),
            dev_a: rel_dev(choice.a_o, limits.a_o),
            dev_mass: rel_dev(mass, limits.hawking_mass_end),
        });
    }
    Ok(LimitStudy { limits, rows })
}
