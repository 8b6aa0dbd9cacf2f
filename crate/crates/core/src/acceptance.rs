//! The acceptance suite: twelve numbered criteria, each reduced to pass/fail with a
//! one-line summary of the measured quantities. Shared by the test target and the
//! `selftest` command.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::collar::{default_mass_sequence, limit_study, CollarMetric};
use crate::error::Result;
use crate::mass_bounds::{mass_report, AnalysisInput};
use crate::metric_paths::{linear_path, path_constants, PathConstants, PathFamily};
use crate::roots::{phi, phi_criterion, theta_root, theta_sign_equivalence, xi_root};
use crate::sphere_metrics::{
    brown_york_mass, hyperbolic_hawking_mass, surface_data, AxisymMetricSpec, HorizonSpec,
    MeanCurvatureSpec, Profile,
};
use crate::warp_odes::{implicit_flat_solution, integrate_warp, warp_upper_bounds_hyperbolic, WarpFunction};
use crate::{Grid, Pipeline};

const SEED: u64 = 0x51a7_e5ca_1ab1_e000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<28} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

type Check = fn() -> Result<(bool, String)>;

const CRITERIA: [(u8, &str, Check); 12] = [
    (1, "round identity", round_identity),
    (2, "schwarzschild saturation", schwarzschild_saturation),
    (3, "ads-schwarzschild identity", ads_schwarzschild_identity),
    (4, "cubic suite", cubic_suite),
    (5, "collar certificate", collar_certificate),
    (6, "slice-mass consistency", slice_mass_consistency),
    (7, "limit study", limit_study_flat),
    (8, "kappa -> 0 degeneration", kappa_degeneration),
    (9, "criterion function suite", criterion_suite),
    (10, "warp ode cross-checks", warp_cross_checks),
    (11, "brown-york decomposition", brown_york_decomposition),
    (12, "gauss-bonnet", gauss_bonnet),
];

/// Criterion ids in order.
pub fn ids() -> impl Iterator<Item = u8> {
    CRITERIA.iter().map(|c| c.0)
}

/// Runs one criterion; `None` for an unknown id.
pub fn run(id: u8) -> Option<Outcome> {
    let (id, name, check) = *CRITERIA.iter().find(|c| c.0 == id)?;
    let (passed, detail) = match check() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(Outcome { id, name, passed, detail })
}

pub fn run_all() -> Vec<Outcome> {
    ids().filter_map(run).collect()
}

fn bump(eps: f64) -> AxisymMetricSpec {
    AxisymMetricSpec::bump(1.0, eps).expect("bump with |eps| < 1/2 is valid")
}

/// `w = 1 + (1 - x^2)(a + b x)` in monomial form.
fn tilted(a: f64, b: f64) -> Result<AxisymMetricSpec> {
    AxisymMetricSpec::new(1.0, Profile::Poly(vec![1.0 + a, b, -a, -b]))
}

fn round_identity() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for r_o in [0.5, 1.0, 3.0] {
        for tau in [0.05, 0.3, 0.5, 0.8, 0.999] {
            for family in [PathFamily::linear(), PathFamily::reparam(9)] {
                let mut input = AnalysisInput::new(
                    AxisymMetricSpec::round(r_o)?,
                    MeanCurvatureSpec::from_tau(tau, r_o)?,
                    Pipeline::Flat,
                );
                input.family = family;
                let rep = mass_report(&input)?;
                let flat = rep.flat.expect("flat pipeline");
                let expected = 0.5 * r_o * (1.0 - tau * tau);
                let err = (flat.bartnik_upper_bound - expected)
                    .abs()
                    .max((flat.hawking_mass - expected).abs());
                worst = worst.max(err);
                ok &= rep.zeta.map(|z| z.value) == Some(0.0) && flat.theta.theta == 1.0 && err <= 1e-14;
            }
        }
    }
    Ok((ok, format!("zeta = 0, theta = 1 on 30 cases; max |bound - m_H| = {worst:.1e} (tol 1e-14)")))
}

fn schwarzschild_saturation() -> Result<(bool, String)> {
    let (r_o, mass, r_h) = (4.0f64, 1.0f64, 2.0f64);
    let tau = (1.0 - 2.0 * mass / r_o).sqrt();
    let mut input = AnalysisInput::new(
        AxisymMetricSpec::round(r_o)?,
        MeanCurvatureSpec::from_tau(tau, r_o)?,
        Pipeline::Flat,
    );
    input.horizon = Some(HorizonSpec::new(r_h)?);
    let rep = mass_report(&input)?;
    let flat = rep.flat.expect("flat pipeline");
    let th2 = flat.theta.theta.powi(2);
    let lhs = rep.tau * rep.tau + r_h / r_o;
    let v = flat.horizon_inequality.expect("horizon given");
    let ok = (lhs - 1.0).abs() <= 1e-14 && (th2 - 1.0).abs() <= 1e-14 && v.holds && v.slack.abs() <= 1e-14;
    Ok((ok, format!("tau^2 + r_h/r_o - 1 = {:.1e}, theta^2 - 1 = {:.1e}, slack = {:.1e}", lhs - 1.0, th2 - 1.0, v.slack)))
}

fn ads_schwarzschild_identity() -> Result<(bool, String)> {
    let cases = [
        (1.0, 1.0, 3.0),
        (0.5, 0.2, 2.0),
        (-1.0, 0.5, 1.0),
        (0.0, 2.0, 1.5),
        (0.1, 0.01, 5.0),
        (-10.0, 1.0, 0.7),
        (2.0, 0.3, 10.0),
        (0.25, 3.0, 0.6),
        (-0.3, 0.05, 4.0),
        (1e-3, 1.0, 1e-2 + 2e-3 + 1e-4),
    ];
    let mut worst: f64 = 0.0;
    for (m, kappa, r_o) in cases {
        let rad: f64 = 1.0 - 2.0 * m / r_o + kappa * kappa * r_o * r_o;
        let h = MeanCurvatureSpec::new(2.0 / r_o * rad.sqrt())?;
        let mh = hyperbolic_hawking_mass(&AxisymMetricSpec::round(r_o)?, &h, kappa)?;
        worst = worst.max((mh - m).abs() / m.abs().max(1.0));
    }
    Ok((worst <= 1e-12, format!("10 coordinate spheres, max |m_H^H - m| = {worst:.1e} (tol 1e-12)")))
}

/// Bisection on the raw cubic, kept independent of the production solver.
fn cubic_oracle(tau: f64, zeta: f64) -> f64 {
    let c = 1.5 * tau * zeta;
    let f = |x: f64| x * x * x - c * x * x - 1.0;
    let (mut lo, mut hi) = (1.0f64, 1.0 + c);
    if f(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn cubic_suite() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut worst_res, mut worst_oracle, mut bracket_fail, mut sign_fail) = (0.0f64, 0.0f64, 0, 0);
    for _ in 0..1000 {
        let tau = rng.gen_range(0.0..10.0);
        let zeta = rng.gen_range(0.0..5.0);
        let r = theta_root(tau, zeta)?;
        worst_res = worst_res.max(r.residual);
        worst_oracle = worst_oracle.max((r.theta / cubic_oracle(tau, zeta) - 1.0).abs());
        if !(r.theta >= 1.0 && r.theta <= 1.0 + 1.5 * tau * zeta) {
            bracket_fail += 1;
        }
        let x = rng.gen_range(0.5..(2.0 + 1.5 * tau * zeta));
        if theta_sign_equivalence(x, tau, zeta) != (x <= r.theta) {
            sign_fail += 1;
        }
    }
    let ok = worst_res < 1e-12 && worst_oracle < 1e-12 && bracket_fail == 0 && sign_fail == 0;
    Ok((
        ok,
        format!(
            "1000 trials: max residual {worst_res:.1e}, max oracle deviation {worst_oracle:.1e}, bracket failures {bracket_fail}, sign mismatches {sign_fail}"
        ),
    ))
}

fn collar_pair(pipeline: Pipeline) -> Result<(f64, f64, f64)> {
    let p = linear_path(&bump(0.1));
    let c = path_constants(&p, pipeline)?;
    let col = CollarMetric::new(p, c, -100.0, 0.8, pipeline, None)?;
    let base = col.scalar_curvature_field(Grid::default(), false)?;
    let doubled = col.scalar_curvature_field(Grid::default().doubled(), false)?;
    Ok((base.floor, base.min, doubled.min))
}

fn collar_certificate() -> Result<(bool, String)> {
    let (f0, m0, d0) = collar_pair(Pipeline::Flat)?;
    let (f1, m1, d1) = collar_pair(Pipeline::Hyperbolic { kappa: 0.5 })?;
    let ok = m0 >= f0 - 1e-10 && d0 >= f0 - 1e-10 && m1 >= f1 - 1e-10 && d1 >= f1 - 1e-10;
    Ok((
        ok,
        format!(
            "flat min R = {m0:.3e} / doubled {d0:.3e} (floor 0); hyperbolic min R + 6 kappa^2 = {:.3e} / doubled {:.3e}",
            m1 - f1,
            d1 - f1
        ),
    ))
}

fn slice_mass_consistency() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for pipeline in [Pipeline::Flat, Pipeline::Hyperbolic { kappa: 0.5 }] {
        for (eps, m, tau) in [(0.1, -100.0, 0.8), (0.05, -1.0, 0.3), (-0.2, -1e4, 1.2)] {
            let p = linear_path(&bump(eps));
            let c = path_constants(&p, pipeline)?;
            let col = CollarMetric::new(p, c, m, tau, pipeline, None)?;
            for t in Grid::default().t_nodes() {
                worst = worst.max(col.slice_report(t)?.mass_discrepancy());
            }
        }
    }
    Ok((worst < 1e-9, format!("6 collars x 101 slices, max mass discrepancy {worst:.1e} (tol 1e-9)")))
}

fn limit_study_flat() -> Result<(bool, String)> {
    let c = path_constants(&linear_path(&bump(0.1)), Pipeline::Flat)?;
    let study = limit_study(&c, 0.8, 1.0, Pipeline::Flat, &default_mass_sequence())?;
    let last = study.rows.last().expect("nonempty sequence");
    let monotone = study.deviations_nonincreasing(0.0);
    let ok = monotone && last.dev_u < 1e-4 && last.dev_mass < 1e-4;
    Ok((
        ok,
        format!(
            "m = -1e2..-1e8: dev_u {:.1e} -> {:.1e}, dev_mass -> {:.1e}, monotone = {monotone}",
            study.rows[0].dev_u, last.dev_u, last.dev_mass
        ),
    ))
}

fn kappa_degeneration() -> Result<(bool, String)> {
    let (alpha, beta, tau) = (0.005, 0.6, 0.5);
    let c = PathConstants { alpha, beta };
    let theta = theta_root(tau, c.zeta())?.theta;
    let devs: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&k| xi_root(alpha, beta, tau, k, 1.0).map(|x| (x.xi * (2.0 * beta / alpha).sqrt() / (theta * theta) - 1.0).abs()))
        .collect::<Result<_>>()?;
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    let ok = devs[2] < 1e-4 && decreasing;
    let shown: Vec<String> = devs.iter().map(|d| format!("{d:.1e}")).collect();
    Ok((ok, format!("deviation at kappa r_o = 1e-1..1e-4: [{}]; decreasing = {decreasing}", shown.join(", "))))
}

fn criterion_suite() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let taus: Vec<f64> = (0..400).map(|i| 10f64.powf(2.0 * i as f64 / 399.0)).collect();
    let (mut cases, mut violations, mut min_phi) = (0, 0, f64::INFINITY);
    while cases < 1000 {
        let lambda = 10f64.powf(rng.gen_range(-3.0..1.0));
        let b = rng.gen_range(0.0..1.0) * lambda.min(1.0) / (1.0 + lambda).sqrt();
        if !(b > 0.0) || !phi_criterion(b, lambda)? {
            continue;
        }
        cases += 1;
        for &t in &taus {
            let v = phi(t, b, lambda);
            min_phi = min_phi.min(v);
            if !(v > 0.0) {
                violations += 1;
            }
        }
    }
    Ok((violations == 0, format!("1000 (b, lambda) x 400 tau in [1, 100]: {violations} violations, min Phi = {min_phi:.2e}")))
}

fn warp_cross_checks() -> Result<(bool, String)> {
    let mut worst_rt: f64 = 0.0;
    let mut worst_energy: f64 = 0.0;
    for j in 0..=20 {
        let m = -(10f64.powf(-2.0 + 0.5 * j as f64));
        for u in [1.001, 1.5, 3.0] {
            let s = implicit_flat_solution(m, 1.0, u)?;
            let t = integrate_warp(&WarpFunction::new(m, 0.0, 1.0)?, s)?;
            worst_rt = worst_rt.max((t.eval(s)?.0 / u - 1.0).abs());
            worst_energy = worst_energy.max(t.max_energy_defect());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let mut outside = 0;
    for _ in 0..100 {
        let m = -(10f64.powf(rng.gen_range(-2.0..4.0)));
        let kappa = 10f64.powf(rng.gen_range(-2.0..0.5));
        let r_o = rng.gen_range(0.5..2.0);
        let s = rng.gen_range(0.0..1.0);
        let w = WarpFunction::new(m, kappa, r_o)?;
        let t = integrate_warp(&w, s)?;
        worst_energy = worst_energy.max(t.max_energy_defect());
        if !warp_upper_bounds_hyperbolic(&w, s, 1.0)?.contains(t.eval(s)?.0) {
            outside += 1;
        }
    }
    let ok = worst_rt < 1e-9 && outside == 0 && worst_energy < 1e-10;
    Ok((
        ok,
        format!(
            "flat round trip over m in [-1e8, -1e-2]: {worst_rt:.1e}; sandwich misses {outside}/100; max energy defect {worst_energy:.1e}"
        ),
    ))
}

/// Seeded convex samples `w = 1 + (1 - x^2)(a + b x)`.
fn convex_samples(n: usize) -> Result<Vec<AxisymMetricSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 11);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = rng.gen_range(-0.4..0.2);
        let b = rng.gen_range(-0.3..0.3);
        let Ok(g) = tilted(a, b) else { continue };
        if surface_data(&g, 64)?.k_min > 1e-3 {
            out.push(g);
        }
    }
    Ok(out)
}

fn brown_york_decomposition() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 12);
    let (mut worst, mut min_middle) = (0.0f64, f64::INFINITY);
    for g in convex_samples(20)? {
        let tau = rng.gen_range(0.1..1.5);
        let by = brown_york_mass(&g, &MeanCurvatureSpec::from_tau(tau, g.r_o())?, Grid::default().x_intervals)?;
        worst = worst.max(by.decomposition_residual);
        min_middle = min_middle.min(by.minkowski_excess);
    }
    Ok((
        worst < 1e-8 && min_middle >= -1e-10,
        format!("20 convex samples: max identity residual {worst:.1e}, min Minkowski term {min_middle:.2e}"),
    ))
}

fn gauss_bonnet() -> Result<(bool, String)> {
    let mut samples = convex_samples(20)?;
    samples.push(bump(0.1));
    samples.push(bump(-0.45));
    samples.push(bump(0.45));
    samples.push(tilted(0.3, -0.2)?);
    let n = Grid::default().x_intervals;
    let (mut worst, mut worse_doubled) = (0.0f64, 0);
    for g in &samples {
        let base = surface_data(g, n)?.gauss_bonnet_residual;
        let doubled = surface_data(g, 2 * n)?.gauss_bonnet_residual;
        worst = worst.max(base);
        if doubled > base + 1e-13 {
            worse_doubled += 1;
        }
    }
    Ok((
        worst < 1e-8 && worse_doubled == 0,
        format!("{} metrics: max residual {worst:.1e} (tol 1e-8); doubling worse in {worse_doubled}", samples.len()),
    ))
}
