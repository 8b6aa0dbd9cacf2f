//! Trace-free paths from an axisymmetric metric to the round metric.
//!
//! Every path here interpolates the profile, `w(t, x) = (1 - s) w(x) + s` with
//! `s = sigma(t)` a monotone reparametrization of [0, 1]. Because the area form
//! `r_o^2 dx dphi` does not depend on `w`, each `g(t)` has the same area form and
//! `tr_{g(t)} g'(t) = 0` holds identically.
//!
//! The path constants are
//!
//! ```text
//! alpha = 1/4 max |g'(t)|^2_{g(t)} = 1/2 max (dw/dt / w)^2
//! beta  = min r_o^2 K_{g(t)}       = min (-P_t'' / 2)
//! ```
//!
//! Estimates of the roundness deficit are minima over a finite family of paths, so
//! they are upper bounds for the infimum over all admissible paths. Every mass bound
//! downstream is monotone in the deficit, which keeps them valid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere_metrics::{p_jet, AxisymMetricSpec, Jet};
use crate::spectral::lobatto_nodes;
use crate::{Grid, Pipeline};

/// Which paths are searched when estimating the roundness deficit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathFamily {
    /// Only the linear profile path (`"linear"`).
    Linear(LinearTag),
    /// The linear path together with `sigma(t) = t + c t (1 - t)` for `reparam_grid`
    /// speeds `c = u^3`, `u` evenly spaced in [-1, 1] (`{"reparam_grid": N}`).
    /// Cubic spacing clusters speeds near the linear path, where the optimum
    /// usually sits; grids with `N = 2^k + 1` are nested.
    Reparam { reparam_grid: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearTag {
    Linear,
}

impl Default for PathFamily {
    fn default() -> Self {
        PathFamily::Linear(LinearTag::Linear)
    }
}

impl PathFamily {
    pub fn linear() -> Self {
        Self::default()
    }

    pub fn reparam(grid: usize) -> Self {
        PathFamily::Reparam { reparam_grid: grid }
    }

    /// Speed parameters of the family members; always contains 0 (the linear path).
    pub fn speeds(&self) -> Vec<f64> {
        match *self {
            PathFamily::Linear(_) => vec![0.0],
            PathFamily::Reparam { reparam_grid } => {
                let mut c: Vec<f64> = match reparam_grid {
                    0 | 1 => vec![],
                    n => (0..n)
                        .map(|i| {
                            let u = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
                            u * u * u
                        })
                        .collect(),
                };
                if !c.contains(&0.0) {
                    c.push(0.0);
                }
                c.sort_by(f64::total_cmp);
                c
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PathFamily::Linear(_) => "linear".to_string(),
            PathFamily::Reparam { reparam_grid } => format!("reparam_grid:{reparam_grid}"),
        }
    }
}

/// A path `g(t)`, `t in [0, 1]`, from the input metric to the round metric.
#[derive(Debug, Clone)]
pub struct TraceFreePath {
    metric: AxisymMetricSpec,
    speed: f64,
    grid: Grid,
}

impl TraceFreePath {
    pub fn metric(&self) -> &AxisymMetricSpec {
        &self.metric
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn is_constant(&self) -> bool {
        self.metric.is_round()
    }

    /// `(sigma(t), sigma'(t))`.
    pub fn sigma(&self, t: f64) -> (f64, f64) {
        let c = self.speed;
        (t + c * t * (1.0 - t), 1.0 + c * (1.0 - 2.0 * t))
    }

    /// x-jet of `w(t, .)` at `x`.
    pub fn w_jet(&self, t: f64, x: f64) -> Jet {
        let (s, _) = self.sigma(t);
        if s == 1.0 {
            return Jet { value: 1.0, d1: 0.0, d2: 0.0 };
        }
        let w = self.metric.w_jet(x);
        Jet {
            value: (1.0 - s) * w.value + s,
            d1: (1.0 - s) * w.d1,
            d2: (1.0 - s) * w.d2,
        }
    }

    /// `dw/dt`.
    pub fn w_dot(&self, t: f64, x: f64) -> f64 {
        let (_, ds) = self.sigma(t);
        ds * (1.0 - self.metric.w_jet(x).value)
    }

    pub fn p_jet(&self, t: f64, x: f64) -> Jet {
        p_jet(x, self.w_jet(t, x))
    }

    /// `dP/dt = (1 - x^2) dw/dt`.
    pub fn p_dot(&self, t: f64, x: f64) -> f64 {
        (1.0 - x * x) * self.w_dot(t, x)
    }

    /// `r_o^2 K_{g(t)}(x)`.
    pub fn normalized_curvature(&self, t: f64, x: f64) -> f64 {
        -0.5 * self.p_jet(t, x).d2
    }

    /// `dP/dt / P`, written through `w` so it stays finite at the poles.
    pub fn velocity_ratio(&self, t: f64, x: f64) -> f64 {
        self.w_dot(t, x) / self.w_jet(t, x).value
    }

    /// `|g'(t)|^2_{g(t)} = 2 (dP/dt / P)^2`.
    pub fn velocity_norm_sq(&self, t: f64, x: f64) -> f64 {
        let r = self.velocity_ratio(t, x);
        2.0 * r * r
    }

    /// `g^{ab} g'_{ab}` evaluated from the chart components
    /// `g = r_o^2 diag(1/P, P)`, `g' = r_o^2 diag(-P_dot/P^2, P_dot)`.
    pub fn trace_of_velocity(&self, t: f64, x: f64) -> f64 {
        let r2 = self.metric.r_o() * self.metric.r_o();
        let p = self.p_jet(t, x).value;
        if p == 0.0 {
            // pole: the two diagonal terms are -w_dot/w and +w_dot/w
            let r = self.velocity_ratio(t, x);
            return -r + r;
        }
        let pd = self.p_dot(t, x);
        let g_xx_inv = p / r2;
        let g_pp_inv = 1.0 / (r2 * p);
        let dg_xx = -r2 * pd / (p * p);
        let dg_pp = r2 * pd;
        g_xx_inv * dg_xx + g_pp_inv * dg_pp
    }
}

/// The linear profile path `w(t, x) = (1 - t) w(x) + t`.
pub fn linear_path(g: &AxisymMetricSpec) -> TraceFreePath {
    reparametrized_path(g, 0.0, Grid::default())
}

/// `w(sigma(t), x)` with `sigma(t) = t + c t (1 - t)`, `c in [-1, 1]`.
pub fn reparametrized_path(g: &AxisymMetricSpec, speed: f64, grid: Grid) -> TraceFreePath {
    assert!((-1.0..=1.0).contains(&speed), "speed must lie in [-1, 1] for a monotone path");
    TraceFreePath { metric: g.clone(), speed, grid }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathConstants {
    pub alpha: f64,
    pub beta: f64,
}

impl PathConstants {
    /// `sqrt(alpha / (2 beta))`.
    pub fn zeta(&self) -> f64 {
        (self.alpha / (2.0 * self.beta)).sqrt()
    }

    /// `sqrt(alpha / (2 beta + 6 kappa^2 r_o^2))`.
    pub fn zeta_kappa(&self, kappa: f64, r_o: f64) -> f64 {
        (self.alpha / (2.0 * self.beta + 6.0 * kappa * kappa * r_o * r_o)).sqrt()
    }
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximum of `f` on [0,1] x [-1,1]: dense evaluation on the grid, then coordinate-wise
/// golden-section refinement inside the cells adjacent to the best node.
pub(crate) fn grid_maximum<F: Fn(f64, f64) -> f64>(f: F, grid: Grid) -> (f64, f64, f64) {
    let ts: Vec<f64> = grid.t_nodes();
    let xs = lobatto_nodes(grid.x_intervals);
    let (mut bi, mut bj, mut best) = (0, 0, f64::NEG_INFINITY);
    for (i, &t) in ts.iter().enumerate() {
        for (j, &x) in xs.iter().enumerate() {
            let v = f(t, x);
            if v > best {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }
    let t_lo = ts[bi.saturating_sub(1)];
    let t_hi = ts[(bi + 1).min(ts.len() - 1)];
    let x_lo = xs[bj.saturating_sub(1)];
    let x_hi = xs[(bj + 1).min(xs.len() - 1)];
    let (mut t, mut x) = (ts[bi], xs[bj]);
    for _ in 0..4 {
        let (tn, vt) = golden_section(|s| f(s, x), t_lo, t_hi, 60);
        if vt > best {
            best = vt;
            t = tn;
        }
        let (xn, vx) = golden_section(|y| f(t, y), x_lo, x_hi, 60);
        if vx > best {
            best = vx;
            x = xn;
        }
    }
    (best, t, x)
}

/// `alpha` and `beta` for a path, with the curvature floor of the pipeline enforced.
pub fn path_constants(path: &TraceFreePath, pipeline: Pipeline) -> Result<PathConstants> {
    let grid = path.grid;
    let (alpha, beta) = if path.is_constant() {
        (0.0, 1.0)
    } else {
        let (amax, _, _) = grid_maximum(|t, x| 0.5 * path.velocity_ratio(t, x).powi(2), grid);
        let (neg_beta, _, _) = grid_maximum(|t, x| -path.normalized_curvature(t, x), grid);
        (amax, -neg_beta)
    };
    if !(alpha.is_finite() && beta.is_finite()) {
        return Err(Error::NonFinite { what: "path constants", x: f64::NAN });
    }
    check_floor(beta, path.metric.r_o(), pipeline)?;
    Ok(PathConstants { alpha, beta })
}

fn check_floor(beta: f64, r_o: f64, pipeline: Pipeline) -> Result<()> {
    match pipeline {
        Pipeline::Flat if beta <= 0.0 => Err(Error::Admissibility {
            reason: "beta_nonpositive",
            detail: format!("min r_o^2 K along the path is {beta}; positive curvature is required"),
        }),
        Pipeline::Hyperbolic { kappa } if beta <= -3.0 * kappa * kappa * r_o * r_o => {
            Err(Error::Admissibility {
                reason: "beta_below_hyperbolic_floor",
                detail: format!(
                    "min r_o^2 K along the path is {beta}; must exceed -3 kappa^2 r_o^2 = {}",
                    -3.0 * kappa * kappa * r_o * r_o
                ),
            })
        }
        _ => Ok(()),
    }
}

/// A path family member with its constants.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub path: TraceFreePath,
    pub constants: PathConstants,
}

/// Admissible members of the family, in order of increasing speed parameter.
pub fn admissible_paths(
    g: &AxisymMetricSpec,
    family: PathFamily,
    grid: Grid,
    pipeline: Pipeline,
) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    let mut last_err = None;
    for c in family.speeds() {
        let path = reparametrized_path(g, c, grid);
        match path_constants(&path, pipeline) {
            Ok(constants) => out.push(Candidate { path, constants }),
            Err(e @ Error::Admissibility { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    if out.is_empty() {
        return Err(last_err.unwrap_or_else(|| Error::Admissibility {
            reason: "empty_path_family",
            detail: "no admissible path in the family".into(),
        }));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ZetaKind {
    Flat,
    Hyperbolic { kappa: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaEstimate {
    pub value: f64,
    pub kind: ZetaKind,
    pub family: String,
    /// Always true: the value is a minimum over a finite family.
    pub upper_bound: bool,
    /// Speed parameter of the minimizing path.
    pub best_speed: f64,
    pub constants: PathConstants,
}

fn best_of<F: Fn(&PathConstants) -> f64>(cands: &[Candidate], score: F) -> (f64, &Candidate) {
    let mut best = (f64::INFINITY, &cands[0]);
    for c in cands {
        let v = score(&c.constants);
        if v < best.0 {
            best = (v, c);
        }
    }
    best
}

/// Upper bound for the flat roundness deficit: `min sqrt(alpha / (2 beta))` over the family.
pub fn zeta_upper_bound(g: &AxisymMetricSpec, family: PathFamily, grid: Grid) -> Result<ZetaEstimate> {
    let cands = admissible_paths(g, family, grid, Pipeline::Flat)?;
    let (value, c) = best_of(&cands, PathConstants::zeta);
    Ok(ZetaEstimate {
        value,
        kind: ZetaKind::Flat,
        family: family.describe(),
        upper_bound: true,
        best_speed: c.path.speed,
        constants: c.constants,
    })
}

/// Upper bound for the hyperbolic deficit: `min sqrt(alpha / (2 beta + 6 kappa^2 r_o^2))`.
pub fn zeta_kappa_upper_bound(
    g: &AxisymMetricSpec,
    kappa: f64,
    family: PathFamily,
    grid: Grid,
) -> Result<ZetaEstimate> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidInput(format!("kappa must be positive, got {kappa}")));
    }
    let cands = admissible_paths(g, family, grid, Pipeline::Hyperbolic { kappa })?;
    let r_o = g.r_o();
    let (value, c) = best_of(&cands, |pc| pc.zeta_kappa(kappa, r_o));
    Ok(ZetaEstimate {
        value,
        kind: ZetaKind::Hyperbolic { kappa },
        family: family.describe(),
        upper_bound: true,
        best_speed: c.path.speed,
        constants: c.constants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(eps: f64) -> AxisymMetricSpec {
        AxisymMetricSpec::bump(1.0, eps).unwrap()
    }

    #[test]
    fn round_path_is_constant() {
        let p = linear_path(&AxisymMetricSpec::round(2.0).unwrap());
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(p.w_dot(t, 0.2), 0.0);
            assert_eq!(p.velocity_norm_sq(t, 0.2), 0.0);
        }
        let pc = path_constants(&p, Pipeline::Flat).unwrap();
        assert_eq!(pc, PathConstants { alpha: 0.0, beta: 1.0 });
    }

    #[test]
    fn linear_path_interpolates_profile() {
        let p = linear_path(&bump(0.1));
        for x in [-0.8, 0.0, 0.5] {
            let expect = 1.0 + 0.05 * (1.0 - x * x);
            assert!((p.w_jet(0.5, x).value - expect).abs() < 1e-15);
        }
        assert_eq!(p.w_jet(1.0, 0.3).value, 1.0);
        assert!((p.w_jet(0.0, 0.0).value - 1.1).abs() < 1e-15);
    }

    #[test]
    fn trace_vanishes_on_full_grid() {
        for c in [-1.0, 0.0, 0.6] {
            let p = reparametrized_path(&bump(0.2), c, Grid::default());
            for t in p.grid.t_nodes() {
                for x in lobatto_nodes(p.grid.x_intervals) {
                    assert!(p.trace_of_velocity(t, x).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn bump_constants_match_closed_form() {
        // (1 - w)/w_t = -eps q / (1 + (1 - t) eps q) is largest at t = 1, x = 0
        let pc = path_constants(&linear_path(&bump(0.1)), Pipeline::Flat).unwrap();
        assert!((pc.alpha - 0.005).abs() < 1e-14);
        assert!((pc.beta - 0.6).abs() < 1e-14);
        assert!(pc.beta <= 1.0);
    }

    #[test]
    fn constants_refine_consistently_with_doubled_grid() {
        // eps < 0 puts the alpha maximum in the interior of t
        let g = bump(-0.3);
        let a = path_constants(&reparametrized_path(&g, 0.3, Grid::default()), Pipeline::Flat).unwrap();
        let b = path_constants(&reparametrized_path(&g, 0.3, Grid::default().doubled()), Pipeline::Flat)
            .unwrap();
        assert!((a.alpha - b.alpha).abs() < 1e-12 * a.alpha.max(1.0));
        assert!((a.beta - b.beta).abs() < 1e-12);
    }

    #[test]
    fn flat_pipeline_rejects_sign_changing_curvature() {
        let err = path_constants(&linear_path(&bump(0.4)), Pipeline::Flat).unwrap_err();
        assert_eq!(err.reason(), "beta_nonpositive");
        // same metric is admissible for a hyperbolic floor with kappa r_o = 1
        assert!(path_constants(&linear_path(&bump(0.4)), Pipeline::Hyperbolic { kappa: 1.0 }).is_ok());
    }

    #[test]
    fn zeta_round_and_scaling() {
        let round = AxisymMetricSpec::round(1.0).unwrap();
        assert_eq!(zeta_upper_bound(&round, PathFamily::linear(), Grid::default()).unwrap().value, 0.0);
        let g = bump(0.1);
        let z1 = zeta_upper_bound(&g, PathFamily::reparam(5), Grid::default()).unwrap();
        let z3 = zeta_upper_bound(&g.scaled(3.0).unwrap(), PathFamily::reparam(5), Grid::default()).unwrap();
        assert_eq!(z1.value, z3.value);
        assert!(z1.upper_bound);
        assert!(z1.value > 0.0);
    }

    #[test]
    fn enlarging_family_never_increases_zeta() {
        let g = bump(0.1);
        let mut prev = f64::INFINITY;
        for fam in [PathFamily::linear(), PathFamily::reparam(3), PathFamily::reparam(5), PathFamily::reparam(9)] {
            let z = zeta_upper_bound(&g, fam, Grid::default()).unwrap().value;
            assert!(z <= prev);
            prev = z;
        }
        let lin = zeta_upper_bound(&g, PathFamily::linear(), Grid::default()).unwrap().value;
        assert!(prev < lin, "reparametrization should help for this profile");
    }

    #[test]
    fn zeta_kappa_limits() {
        let g = bump(0.1);
        let round = AxisymMetricSpec::round(1.0).unwrap();
        assert_eq!(zeta_kappa_upper_bound(&round, 0.5, PathFamily::linear(), Grid::default()).unwrap().value, 0.0);
        let big = zeta_kappa_upper_bound(&g, 1e6, PathFamily::linear(), Grid::default()).unwrap();
        assert!(big.value < 1e-6);
        let pc = path_constants(&linear_path(&g), Pipeline::Flat).unwrap();
        assert_eq!(pc.zeta_kappa(0.0, 1.0), pc.zeta());
        assert!(zeta_kappa_upper_bound(&g, 0.0, PathFamily::linear(), Grid::default()).is_err());
    }

    #[test]
    fn family_descriptor_serde() {
        let f: PathFamily = serde_json::from_str(r#""linear""#).unwrap();
        assert_eq!(f, PathFamily::linear());
        let f: PathFamily = serde_json::from_str(r#"{"reparam_grid": 7}"#).unwrap();
        assert_eq!(f, PathFamily::reparam(7));
        assert_eq!(f.speeds().len(), 7);
        assert_eq!(PathFamily::reparam(4).speeds().len(), 5);
    }
}
