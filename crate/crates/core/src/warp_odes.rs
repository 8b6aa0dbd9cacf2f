//! Radial profiles of the spatial Schwarzschild (`kappa = 0`) and AdS-Schwarzschild
//! metrics written as `ds^2 + u(s)^2 g_*`:
//!
//! ```text
//! u(0) = r_o,   u'(s)^2 = 1 - 2m/u + kappa^2 u^2.
//! ```
//!
//! The integrator works on the second-order form `u'' = m/u^2 + kappa^2 u`, so the
//! first-order relation above is a conserved quantity that checks the solution.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::bracketed_newton;

/// Default relative and absolute tolerance of the integrator.
pub const ODE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WarpFunction {
    pub m: f64,
    pub kappa: f64,
    pub r_o: f64,
}

impl WarpFunction {
    /// Requires `1 - 2m/r_o + kappa^2 r_o^2 > 0`.
    pub fn new(m: f64, kappa: f64, r_o: f64) -> Result<Self> {
        if !(m.is_finite() && kappa.is_finite() && kappa >= 0.0 && r_o.is_finite() && r_o > 0.0) {
            return Err(Error::InvalidInput(format!(
                "invalid warp parameters m = {m}, kappa = {kappa}, r_o = {r_o}"
            )));
        }
        let w = Self { m, kappa, r_o };
        if !(w.radicand(r_o) > 0.0) {
            return Err(Error::InvalidInput(format!(
                "radicand 1 - 2m/r_o + kappa^2 r_o^2 = {} is not positive",
                w.radicand(r_o)
            )));
        }
        Ok(w)
    }

    /// `1 - 2m/u + kappa^2 u^2`.
    pub fn radicand(&self, u: f64) -> f64 {
        1.0 - 2.0 * self.m / u + self.kappa * self.kappa * u * u
    }

    /// `u'` as a function of `u`.
    pub fn slope(&self, u: f64) -> f64 {
        self.radicand(u).sqrt()
    }

    fn accel(&self, u: f64) -> f64 {
        self.m / (u * u) + self.kappa * self.kappa * u
    }
}

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes c_i are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type State = [f64; 2];

fn rhs(w: &WarpFunction, y: State) -> State {
    [y[1], w.accel(y[0])]
}

fn axpy(y: State, h: f64, terms: &[(f64, State)]) -> State {
    let mut out = y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// One Dormand–Prince step; returns the 5th-order solution and the scaled error norm.
fn dp_step(w: &WarpFunction, y: State, h: f64, tol: f64) -> (State, f64) {
    let k1 = rhs(w, y);
    let k2 = rhs(w, axpy(y, h, &[(A21, k1)]));
    let k3 = rhs(w, axpy(y, h, &[(A31, k1), (A32, k2)]));
    let k4 = rhs(w, axpy(y, h, &[(A41, k1), (A42, k2), (A43, k3)]));
    let k5 = rhs(w, axpy(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]));
    let k6 = rhs(w, axpy(y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]));
    let y_new = axpy(y, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
    let k7 = rhs(w, y_new);
    let mut err = 0.0f64;
    for i in 0..2 {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = tol + tol * y[i].abs().max(y_new[i].abs());
        err = err.max((e / sc).abs());
    }
    (y_new, err)
}

/// Adaptive integration from `s0` to `s1`, recording accepted steps into `sink`.
fn integrate_segment(
    w: &WarpFunction,
    y0: State,
    s0: f64,
    s1: f64,
    tol: f64,
    mut sink: impl FnMut(f64, State),
) -> Result<State> {
    let span = s1 - s0;
    if span <= 0.0 {
        return Ok(y0);
    }
    let mut h = span.min(0.05 * y0[0] / y0[1].abs().max(1e-300)).max(span * 1e-12);
    let (mut s, mut y) = (s0, y0);
    let mut steps = 0usize;
    while s < s1 {
        if s + h >= s1 {
            h = s1 - s;
        }
        let (y_new, err) = dp_step(w, y, h, tol);
        if !(y_new[0].is_finite() && y_new[1].is_finite() && err.is_finite()) {
            h *= 0.2;
        } else if err <= 1.0 {
            s = if s + h >= s1 { s1 } else { s + h };
            y = y_new;
            sink(s, y);
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= if err <= 1.0 { fac } else { fac.min(1.0) };
        steps += 1;
        if steps > 2_000_000 || h < span * 1e-15 {
            return Err(Error::Integration(format!("step size collapse at s = {s}")));
        }
    }
    Ok(y)
}

/// Tabulated solution on `[0, s_max]` with accepted-step nodes.
#[derive(Debug, Clone)]
pub struct WarpTable {
    warp: WarpFunction,
    tol: f64,
    s: Vec<f64>,
    y: Vec<State>,
}

impl WarpTable {
    pub fn warp(&self) -> &WarpFunction {
        &self.warp
    }

    pub fn s_max(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.s.iter().zip(&self.y).map(|(&s, y)| (s, y[0], y[1]))
    }

    /// `(u(s), u'(s))`, re-integrating from the nearest stored node at or below `s`.
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        if !(s >= 0.0 && s <= self.s_max() * (1.0 + 1e-14)) {
            return Err(Error::InvalidInput(format!(
                "s = {s} outside tabulated range [0, {}]",
                self.s_max()
            )));
        }
        let i = match self.s.binary_search_by(|v| v.total_cmp(&s)) {
            Ok(i) => return Ok((self.y[i][0], self.y[i][1])),
            Err(i) => i - 1,
        };
        let y = integrate_segment(&self.warp, self.y[i], self.s[i], s, self.tol, |_, _| {})?;
        Ok((y[0], y[1]))
    }

    /// Largest `|u'^2 - (1 - 2m/u + kappa^2 u^2)| / (1 - 2m/u + kappa^2 u^2)` over the nodes.
    pub fn max_energy_defect(&self) -> f64 {
        self.y
            .iter()
            .map(|y| {
                let rad = self.warp.radicand(y[0]);
                (y[1] * y[1] - rad).abs() / rad
            })
            .fold(0.0, f64::max)
    }
}

/// Integrates the warp ODE on `[0, s_max]` with tolerance [`ODE_TOL`].
pub fn integrate_warp(w: &WarpFunction, s_max: f64) -> Result<WarpTable> {
    integrate_warp_with_tol(w, s_max, ODE_TOL)
}

pub fn integrate_warp_with_tol(w: &WarpFunction, s_max: f64, tol: f64) -> Result<WarpTable> {
    if !(s_max.is_finite() && s_max >= 0.0) {
        return Err(Error::InvalidInput(format!("s_max = {s_max} must be finite and nonnegative")));
    }
    let y0 = [w.r_o, w.slope(w.r_o)];
    let mut s = vec![0.0];
    let mut y = vec![y0];
    integrate_segment(w, y0, 0.0, s_max, tol, |si, yi| {
        s.push(si);
        y.push(yi);
    })?;
    Ok(WarpTable { warp: *w, tol, s, y })
}

/// `asinh(a) - a sqrt(1 + a^2)`, with a series near zero where the two terms cancel.
fn flat_potential(a: f64) -> f64 {
    if a < 0.25 {
        // -2 int_0^a t^2 (1 + t^2)^{-1/2} dt = -2 sum binom(-1/2, n) a^{2n+3} / (2n+3)
        let a2 = a * a;
        let mut term = a2 * a;
        let mut coef = 1.0;
        let mut sum = 0.0;
        for n in 0..60 {
            let add = coef * term / (2 * n + 3) as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
            coef *= -((2 * n + 1) as f64) / ((2 * n + 2) as f64);
            term *= a2;
        }
        -2.0 * sum
    } else {
        a.asinh() - a * (1.0 + a * a).sqrt()
    }
}

/// Arc length `s` at which the flat profile with `m < 0` reaches `u >= r_o`:
///
/// ```text
/// s = 2m [ ln(a + b) - a b ]_{u = r_o}^{u},   a = sqrt(-u/2m),  b = sqrt(1 - u/2m).
/// ```
pub fn implicit_flat_solution(m: f64, r_o: f64, u: f64) -> Result<f64> {
    if !(m < 0.0 && m.is_finite()) {
        return Err(Error::InvalidInput(format!("implicit solution needs m < 0, got {m}")));
    }
    if !(u >= r_o) {
        return Err(Error::InvalidInput(format!("u = {u} below r_o = {r_o}")));
    }
    let a = |v: f64| (-v / (2.0 * m)).sqrt();
    Ok(2.0 * m * (flat_potential(a(u)) - flat_potential(a(r_o))))
}

/// Inverse of [`implicit_flat_solution`]: `u(s)` for `kappa = 0`, `m < 0`.
pub fn implicit_flat_inverse(m: f64, r_o: f64, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::InvalidInput(format!("s = {s} must be nonnegative")));
    }
    if s == 0.0 {
        return Ok(r_o);
    }
    // 1 <= u' <= sqrt(1 - 2m/r_o)
    let lo = r_o + s;
    let hi = r_o + s * (1.0 - 2.0 * m / r_o).sqrt();
    if hi <= lo {
        return Ok(lo);
    }
    bracketed_newton(
        |u| {
            let v = implicit_flat_solution(m, r_o, u).unwrap_or(f64::NAN) - s;
            (v, 1.0 / (1.0 - 2.0 * m / u).sqrt())
        },
        lo,
        hi,
        1e-15,
    )
}

/// Evaluator for `u(s)` on `[0, s_max]`, choosing the exact representation when one exists.
#[derive(Debug, Clone)]
pub enum Warp {
    /// `m = 0, kappa = 0`: `u = r_o + s`.
    Linear(WarpFunction),
    /// `kappa = 0, m < 0`: implicit closed form.
    ImplicitFlat(WarpFunction),
    /// Everything else: tabulated integration.
    Table(WarpTable),
}

impl Warp {
    pub fn new(w: WarpFunction, s_max: f64) -> Result<Self> {
        Ok(if w.kappa == 0.0 && w.m == 0.0 {
            Warp::Linear(w)
        } else if w.kappa == 0.0 && w.m < 0.0 {
            Warp::ImplicitFlat(w)
        } else {
            Warp::Table(integrate_warp(&w, s_max)?)
        })
    }

    pub fn function(&self) -> &WarpFunction {
        match self {
            Warp::Linear(w) | Warp::ImplicitFlat(w) => w,
            Warp::Table(t) => t.warp(),
        }
    }

    /// Largest `s` the evaluator accepts.
    pub fn s_max(&self) -> f64 {
        match self {
            Warp::Table(t) => t.s_max(),
            _ => f64::INFINITY,
        }
    }

    pub fn u(&self, s: f64) -> Result<f64> {
        match self {
            Warp::Linear(w) => Ok(w.r_o + s),
            Warp::ImplicitFlat(w) => implicit_flat_inverse(w.m, w.r_o, s),
            Warp::Table(t) => t.eval(s).map(|(u, _)| u),
        }
    }

    /// `(u(s), u'(s))` with `u'` taken from the first-order relation.
    pub fn u_and_slope(&self, s: f64) -> Result<(f64, f64)> {
        let u = self.u(s)?;
        Ok((u, self.function().slope(u)))
    }
}

/// Comparison bounds for the AdS-Schwarzschild profile at `s = A k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicSandwich {
    /// Solution of the comparison equation with `1 - 2m/r_o` frozen.
    pub u_star: f64,
    /// Lower bound for `u(Ak)^{3/2}`.
    pub lower: f64,
    /// Upper bound for `u(Ak)^{3/2}`.
    pub upper: f64,
}

impl HyperbolicSandwich {
    pub fn contains(&self, u: f64) -> bool {
        let p = u.powf(1.5);
        p >= self.lower * (1.0 - 1e-13) && p <= self.upper * (1.0 + 1e-13) && u <= self.u_star * (1.0 + 1e-13)
    }
}

/// `u_m^*` and the two-sided bound on `u_m^{3/2}(A k)` for `m < 0`, `kappa > 0`.
pub fn warp_upper_bounds_hyperbolic(w: &WarpFunction, a: f64, k: f64) -> Result<HyperbolicSandwich> {
    if !(w.m < 0.0 && w.kappa > 0.0) {
        return Err(Error::InvalidInput(format!(
            "sandwich bounds need m < 0 and kappa > 0, got m = {}, kappa = {}",
            w.m, w.kappa
        )));
    }
    let s = a * k;
    let (r, kap, m) = (w.r_o, w.kappa, w.m);
    let root = w.radicand(r).sqrt();
    let u_star = r * (kap * s).cosh() + root * (kap * s).sinh() / kap;
    let r32 = r * r.sqrt();
    Ok(HyperbolicSandwich {
        u_star,
        lower: r32 + 1.5 * s * (-2.0 * m).sqrt(),
        upper: r32 + 1.5 * s * (u_star - 2.0 * m + kap * kap * u_star.powi(3)).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn massless_flat_profile_is_linear() {
        let w = WarpFunction::new(0.0, 0.0, 1.3).unwrap();
        let t = integrate_warp(&w, 5.0).unwrap();
        for (s, u, v) in t.nodes() {
            assert!((u - (1.3 + s)).abs() < 1e-13);
            assert!((v - 1.0).abs() < 1e-13);
        }
        assert!((Warp::new(w, 5.0).unwrap().u(2.0).unwrap() - 3.3).abs() < 1e-15);
    }

    #[test]
    fn massless_hyperbolic_profile_matches_closed_form() {
        let (kap, r) = (0.7, 1.2);
        let w = WarpFunction::new(0.0, kap, r).unwrap();
        let t = integrate_warp(&w, 3.0).unwrap();
        let exact = |s: f64| r * (kap * s).cosh() + (1.0 + kap * kap * r * r).sqrt() / kap * (kap * s).sinh();
        for s in [0.0, 0.1, 0.77, 1.5, 3.0] {
            let u = t.eval(s).unwrap().0;
            assert!((u - exact(s)).abs() < 1e-10 * exact(s), "s = {s}");
        }
        assert!(t.max_energy_defect() < 1e-10);
    }

    #[test]
    fn implicit_solution_round_trip() {
        let (m, r) = (-1.0, 1.0);
        assert_eq!(implicit_flat_solution(m, r, r).unwrap(), 0.0);
        let s = implicit_flat_solution(m, r, 2.0).unwrap();
        let t = integrate_warp(&WarpFunction::new(m, 0.0, r).unwrap(), s).unwrap();
        assert!((t.eval(s).unwrap().0 - 2.0).abs() < 1e-9);
        assert!((implicit_flat_inverse(m, r, s).unwrap() - 2.0).abs() < 1e-13);
        assert!(implicit_flat_solution(m, r, 0.5).is_err());
        assert!(implicit_flat_solution(1.0, r, 2.0).is_err());
    }

    #[test]
    fn implicit_solution_matches_series_for_huge_mass() {
        let (m, r, u) = (-1e8, 1.0, 2.0);
        let s = implicit_flat_solution(m, r, u).unwrap();
        // leading order: s = (2/3)(u^{3/2} - r^{3/2}) / sqrt(-2m), relative correction O(u/|m|)
        let lead = 2.0 / 3.0 * (u.powf(1.5) - r.powf(1.5)) / (-2.0 * m).sqrt();
        assert!(s.is_finite());
        assert!((s / lead - 1.0).abs() < 1e-7);
    }

    #[test]
    fn flat_potential_branches_agree() {
        for a in [0.2499f64, 0.25, 0.2501] {
            let direct = a.asinh() - a * (1.0 + a * a).sqrt();
            assert!((flat_potential(a) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn warp_rejects_nonpositive_radicand() {
        assert!(WarpFunction::new(0.6, 0.0, 1.0).is_err());
        assert!(WarpFunction::new(0.4, 0.0, 1.0).is_ok());
        assert!(WarpFunction::new(-1.0, -0.1, 1.0).is_err());
    }

    #[test]
    fn sandwich_collapses_at_zero() {
        let w = WarpFunction::new(-10.0, 0.5, 1.0).unwrap();
        let b = warp_upper_bounds_hyperbolic(&w, 0.0, 0.3).unwrap();
        assert_eq!(b.lower, 1.0);
        assert_eq!(b.upper, 1.0);
        assert_eq!(b.u_star, 1.0);
        assert!(warp_upper_bounds_hyperbolic(&WarpFunction::new(-1.0, 0.0, 1.0).unwrap(), 1.0, 0.1).is_err());
    }

    #[test]
    fn sandwich_contains_integrated_value() {
        let w = WarpFunction::new(-10.0, 0.5, 1.0).unwrap();
        let t = integrate_warp(&w, 0.2).unwrap();
        let u = t.eval(0.2).unwrap().0;
        let b = warp_upper_bounds_hyperbolic(&w, 1.0, 0.2).unwrap();
        assert!(b.contains(u), "{b:?} vs {u}");
    }

    #[test]
    fn positive_mass_uses_integrator() {
        let w = WarpFunction::new(0.2, 0.0, 1.0).unwrap();
        let warp = Warp::new(w, 2.0).unwrap();
        assert!(matches!(warp, Warp::Table(_)));
        // u'' = m/u^2 > 0: convex, u' increases from sqrt(0.6)
        let (u, du) = warp.u_and_slope(2.0).unwrap();
        assert!(u > 1.0 + 2.0 * 0.6f64.sqrt());
        assert!(du > 0.6f64.sqrt());
        assert!(warp.u(2.5).is_err());
    }
}
