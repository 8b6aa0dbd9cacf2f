//! Scalar equations of the construction: the cubic for `theta`, the criterion
//! function `Phi`, and the hyperbolic root `xi` with its rescaling `theta_kappa`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on the independent variable for every bracketed solve.
pub const X_TOL: f64 = 1e-13;

/// Root of `f` on `[lo, hi]` by bisection, accelerated with Newton steps that
/// stay inside the current bracket. `f` returns the value and derivative.
///
/// The bracket must have `f(lo)` and `f(hi)` of opposite sign (or one zero).
pub fn bracketed_newton<F>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (mut f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::RootFinding(format!(
            "no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
        )));
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..400 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        if (hi - lo).abs() <= x_tol * x.abs().max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
        let newton = x - fx / dfx;
        x = if dfx != 0.0 && newton.is_finite() && newton > lo.min(hi) && newton < lo.max(hi) {
            // a Newton step that barely moves is converged to working precision
            if (newton - x).abs() <= 0.25 * x_tol * x.abs().max(1.0) {
                return Ok(newton);
            }
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::RootFinding(format!("no convergence on [{lo}, {hi}]")))
}

/// Bisection only, for functions without a cheap derivative.
pub fn bisect<F>(f: F, lo: f64, hi: f64, x_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::RootFinding(format!(
            "no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= x_tol * mid.abs().max(1.0) || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The cubic `x^3 - (3 zeta tau / 2) x^2 - 1`.
pub fn theta_cubic(x: f64, tau: f64, zeta: f64) -> f64 {
    let c = 1.5 * zeta * tau;
    x * x * (x - c) - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaResult {
    pub theta: f64,
    /// `|1 - c/theta - theta^-3|`, the cubic divided by `theta^3`.
    pub residual: f64,
    pub tau: f64,
    pub zeta: f64,
}

/// Unique positive root of `theta^3 - (3 zeta tau / 2) theta^2 - 1 = 0`,
/// which lies in `[1, 1 + (3/2) tau zeta]`.
pub fn theta_root(tau: f64, zeta: f64) -> Result<ThetaResult> {
    if !(tau.is_finite() && zeta.is_finite()) || tau < 0.0 || zeta < 0.0 {
        return Err(Error::InvalidInput(format!(
            "theta_root needs finite nonnegative inputs, got tau = {tau}, zeta = {zeta}"
        )));
    }
    let c = 1.5 * zeta * tau;
    let theta = if c == 0.0 {
        1.0
    } else {
        // theta^-3 scaled form: 1 - c/x - x^-3, increasing in x > 0
        bracketed_newton(
            |x| {
                let v = 1.0 - c / x - 1.0 / (x * x * x);
                let d = c / (x * x) + 3.0 / (x * x * x * x);
                (v, d)
            },
            1.0,
            1.0 + c,
            X_TOL * 1e-2,
        )?
    };
    Ok(ThetaResult {
        theta,
        residual: (1.0 - c / theta - 1.0 / (theta * theta * theta)).abs(),
        tau,
        zeta,
    })
}

/// `f(x) <= 0` for the cubic; equivalent to `x <= theta(tau, zeta)` for `x > 0`.
pub fn theta_sign_equivalence(x: f64, tau: f64, zeta: f64) -> bool {
    theta_cubic(x, tau, zeta) <= 0.0
}

/// `Phi(tau) = (tau^2 + lambda)^{3/2} - b tau (tau^2 + lambda) - 1`.
pub fn phi(tau: f64, b: f64, lambda: f64) -> f64 {
    let s = tau * tau + lambda;
    s * s.sqrt() - b * tau * s - 1.0
}

/// `b < min(lambda, 1) / sqrt(1 + lambda)`; when true, `Phi > 0` on `[1, inf)`.
pub fn phi_criterion(b: f64, lambda: f64) -> Result<bool> {
    if !(b > 0.0 && lambda > 0.0 && b.is_finite() && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "criterion needs b > 0 and lambda > 0, got b = {b}, lambda = {lambda}"
        )));
    }
    Ok(b < lambda.min(1.0) / (1.0 + lambda).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum XiBranch {
    BetaNonpositiveClosedForm,
    BetaPositivePsiRoot,
    /// `alpha = 0`: the path is constant and `xi = 0`.
    Round,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiResult {
    pub xi: f64,
    pub residual: f64,
    pub branch: XiBranch,
    /// `sqrt(alpha / (2 beta + 6 kappa^2 r_o^2))`, a lower bound for the psi root.
    pub lower_bound: f64,
    /// `xi = sqrt(alpha / 2 beta) theta_kappa^2`, positive-beta branch only.
    pub theta_kappa: Option<f64>,
    /// The flat root for the same path constants, positive-beta branch only.
    pub theta: Option<f64>,
}

/// `Psi(x) = beta + (3 kappa^2 r_o^2 - alpha / (2 x^2)) (1 + 3 tau x / 2)^{4/3}` and `Psi'(x)`.
pub fn psi(x: f64, alpha: f64, beta: f64, tau: f64, kr2: f64) -> (f64, f64) {
    let base = 1.0 + 1.5 * tau * x;
    let cbrt = base.cbrt();
    let p43 = base * cbrt;
    let value = beta + (3.0 * kr2 - 0.5 * alpha / (x * x)) * p43;
    let deriv = (6.0 * kr2 * tau + alpha / (x * x * x) + 0.5 * alpha * tau / (x * x)) * cbrt;
    (value, deriv)
}

/// The hyperbolic constant `xi` for path constants `(alpha, beta)`.
pub fn xi_root(alpha: f64, beta: f64, tau: f64, kappa: f64, r_o: f64) -> Result<XiResult> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidInput(format!("kappa must be positive, got {kappa}")));
    }
    if !(alpha >= 0.0 && alpha.is_finite() && beta.is_finite() && tau >= 0.0 && r_o > 0.0) {
        return Err(Error::InvalidInput(format!(
            "invalid xi inputs alpha = {alpha}, beta = {beta}, tau = {tau}, r_o = {r_o}"
        )));
    }
    let kr2 = kappa * kappa * r_o * r_o;
    if !(beta + 3.0 * kr2 > 0.0) {
        return Err(Error::Admissibility {
            reason: "beta_below_hyperbolic_floor",
            detail: format!("beta + 3 kappa^2 r_o^2 = {} must be positive", beta + 3.0 * kr2),
        });
    }
    let lower_bound = (alpha / (2.0 * beta + 6.0 * kr2)).sqrt();
    if alpha == 0.0 {
        return Ok(XiResult {
            xi: 0.0,
            residual: 0.0,
            branch: XiBranch::Round,
            lower_bound,
            theta_kappa: None,
            theta: None,
        });
    }
    if beta <= 0.0 {
        return Ok(XiResult {
            xi: lower_bound,
            residual: 0.0,
            branch: XiBranch::BetaNonpositiveClosedForm,
            lower_bound,
            theta_kappa: None,
            theta: None,
        });
    }
    // Psi(lower_bound) = beta (1 - (1 + 3 tau lb / 2)^{4/3}) <= 0, zero at tau = 0;
    // a nonnegative value can only come from rounding, so the bound is the root.
    let xi = if psi(lower_bound, alpha, beta, tau, kr2).0 >= 0.0 {
        lower_bound
    } else {
        psi_root(alpha, beta, tau, kr2, lower_bound)?
    };
    let (value, _) = psi(xi, alpha, beta, tau, kr2);
    let scale = beta.abs() + (3.0 * kr2 + 0.5 * alpha / (xi * xi)) * (1.0 + 1.5 * tau * xi).powf(4.0 / 3.0);
    let ratio = (alpha / (2.0 * beta)).sqrt();
    Ok(XiResult {
        xi,
        residual: value.abs() / scale,
        branch: XiBranch::BetaPositivePsiRoot,
        lower_bound,
        theta_kappa: Some((xi / ratio).sqrt()),
        theta: Some(theta_root(tau, ratio)?.theta),
    })
}

fn psi_root(alpha: f64, beta: f64, tau: f64, kr2: f64, lower_bound: f64) -> Result<f64> {
    let mut hi = lower_bound.max(f64::MIN_POSITIVE) * 2.0;
    while psi(hi, alpha, beta, tau, kr2).0 <= 0.0 {
        hi *= 2.0;
        if hi > 1e6 * lower_bound {
            return Err(Error::RootFinding("psi bracket expansion exceeded 1e6 x lower bound".into()));
        }
    }
    bracketed_newton(|x| psi(x, alpha, beta, tau, kr2), lower_bound, hi, X_TOL * 1e-2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_equals_lower_bound_without_mean_curvature() {
        for i in 1..=40 {
            let zeta = 0.0125 * i as f64;
            let (beta, kappa) = (0.6f64, 0.5f64);
            let r = xi_root(2.0 * beta * zeta * zeta, beta, 0.0, kappa, 1.0).unwrap();
            assert!((r.xi - r.lower_bound).abs() <= 1e-15 * r.lower_bound, "zeta = {zeta}");
        }
    }

    #[test]
    fn theta_degenerates_to_one() {
        for tau in [0.0, 0.3, 5.0] {
            let r = theta_root(tau, 0.0).unwrap();
            assert_eq!(r.theta, 1.0);
            assert_eq!(r.residual, 0.0);
        }
    }

    #[test]
    fn theta_for_unit_coefficient_matches_bisection_oracle() {
        // independent bisection on theta^3 - theta^2 - 1 over [1, 2]
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if mid * mid * mid - mid * mid - 1.0 <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = theta_root(1.0, 2.0 / 3.0).unwrap();
        assert!((r.theta - lo).abs() < 1e-14);
        assert!((r.theta - 1.465_571_231_876_768).abs() < 1e-14);
        assert!(r.residual < 1e-15);
    }

    #[test]
    fn theta_large_coefficient_stays_in_bracket() {
        let r = theta_root(1.0, 10.0).unwrap();
        assert!(r.theta >= 1.0 && r.theta <= 16.0);
        assert!(r.residual < 1e-12);
        assert!(theta_root(f64::NAN, 1.0).is_err());
        assert!(theta_root(-1.0, 1.0).is_err());
    }

    #[test]
    fn sign_equivalence_examples() {
        assert!(theta_sign_equivalence(1.0, 0.7, 0.0));
        let th = theta_root(0.8, 0.4).unwrap().theta;
        assert!(!theta_sign_equivalence(th + 1e-6, 0.8, 0.4));
        assert!(theta_sign_equivalence(th - 1e-6, 0.8, 0.4));
    }

    #[test]
    fn phi_examples() {
        assert!((phi(1.0, 0.0, 1.0) - (2f64.powf(1.5) - 1.0)).abs() < 1e-15);
        assert!(phi_criterion(0.3, 1.0).unwrap());
        assert!(!phi_criterion(0.8, 1.0).unwrap());
        assert!(phi_criterion(0.0, 1.0).is_err());
        assert!(phi_criterion(0.1, -1.0).is_err());
        // dense sampling on [1, 100] for (0.3, 1)
        for i in 0..=10_000 {
            let tau = 1.0 + 99.0 * i as f64 / 10_000.0;
            assert!(phi(tau, 0.3, 1.0) > 0.0);
        }
    }

    #[test]
    fn xi_closed_form_branch() {
        // kappa^2 r_o^2 = 0.1
        let kappa = 0.1f64.sqrt();
        let r = xi_root(0.02, -0.1, 0.5, kappa, 1.0).unwrap();
        assert_eq!(r.branch, XiBranch::BetaNonpositiveClosedForm);
        assert!((r.xi - (0.01f64 / 0.2).sqrt()).abs() < 1e-15);
        assert!((r.xi - 0.223_606_797_749_979).abs() < 1e-12);
    }

    #[test]
    fn xi_small_kappa_recovers_flat_root() {
        let (alpha, beta, tau) = (0.005f64, 0.6f64, 0.5f64);
        let ratio = (alpha / (2.0 * beta)).sqrt();
        let th = theta_root(tau, ratio).unwrap().theta;
        let r = xi_root(alpha, beta, tau, 1e-3, 1.0).unwrap();
        assert_eq!(r.branch, XiBranch::BetaPositivePsiRoot);
        assert!((r.xi / (ratio * th * th) - 1.0).abs() < 1e-4);
        assert!(r.residual < 1e-12);
        assert!(r.theta_kappa.unwrap() <= th);
    }

    #[test]
    fn xi_rejects_bad_inputs() {
        assert!(xi_root(0.1, 0.5, 0.5, 0.0, 1.0).is_err());
        assert!(matches!(
            xi_root(0.1, -2.0, 0.5, 0.5, 1.0),
            Err(Error::Admissibility { .. })
        ));
        assert_eq!(xi_root(0.0, 0.5, 0.5, 0.5, 1.0).unwrap().xi, 0.0);
    }
}
