//! Worked examples for each module, with oracles computed independently of the
//! production code path.

use qlm_core::collar::{choose_a_flat, choose_a_hyperbolic, collar_k, collar_limits, limit_study, CollarMetric};
use qlm_core::mass_bounds::{flat_mass_bounds, hyperbolic_mass_bounds};
use qlm_core::metric_paths::{linear_path, path_constants, PathConstants};
use qlm_core::roots::{theta_root, xi_root};
use qlm_core::sphere_metrics::{embed_revolution, gauss_curvature, AxisymMetricSpec, MeanCurvatureSpec};
use qlm_core::warp_odes::{warp_upper_bounds_hyperbolic, WarpFunction};
use qlm_core::{Grid, Pipeline};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn bump_curvature_matches_symbolic_derivative() {
    // P = (1 - x^2)(1.1 - 0.1 x^2) = 1.1 - 1.2 x^2 + 0.1 x^4, P''(0) = -2.4
    let g = AxisymMetricSpec::bump(1.0, 0.1).unwrap();
    assert!((gauss_curvature(&g, 0.0).unwrap() - 1.2).abs() < 1e-14);
    let x = 0.37f64;
    let p2 = -2.4 + 1.2 * x * x;
    assert!((gauss_curvature(&g, x).unwrap() + p2 / 2.0).abs() < 1e-14);
}

#[test]
fn embedding_reproduces_first_fundamental_form() {
    let g = AxisymMetricSpec::bump(1.0, 0.05).unwrap();
    let prof = embed_revolution(&g, 256).unwrap();
    let h = 1e-5;
    for x in [-0.9, -0.5, -0.1, 0.2, 0.6, 0.95] {
        let p = g.p_jet(x).value;
        let rho = |y: f64| (g.p_jet(y).value).sqrt();
        let drho = (rho(x + h) - rho(x - h)) / (2.0 * h);
        let dz = (prof.z_at(x + h) - prof.z_at(x - h)) / (2.0 * h);
        // meridian: rho'^2 + z'^2 = r_o^2 / P; parallel: rho^2 = r_o^2 P
        let res = ((drho * drho + dz * dz) * p - 1.0).abs();
        assert!(res < 1e-8, "x = {x}: residual {res}");
    }
    for (j, &x) in prof.x.iter().enumerate() {
        assert!((prof.rho[j].powi(2) - g.p_jet(x).value).abs() < 1e-14);
    }
}

#[test]
fn alpha_beta_refine_with_doubled_grid() {
    let g = AxisymMetricSpec::bump(1.0, 0.1).unwrap();
    let coarse = path_constants(&linear_path(&g), Pipeline::Flat).unwrap();
    let fine_path = qlm_core::metric_paths::reparametrized_path(&g, 0.0, Grid::default().doubled());
    let fine = path_constants(&fine_path, Pipeline::Flat).unwrap();
    assert!((coarse.alpha - fine.alpha).abs() < 1e-12);
    assert!((coarse.beta - fine.beta).abs() < 1e-12);
    // closed form for this path: alpha = eps^2 / 2, beta = 1 - 4 eps
    assert!((coarse.alpha - 0.005).abs() < 1e-12);
    assert!((coarse.beta - 0.6).abs() < 1e-12);
}

#[test]
fn flat_a_o_tends_to_theta_limit() {
    let c = PathConstants { alpha: 0.005, beta: 0.6 };
    let theta = theta_root(0.8, c.zeta()).unwrap().theta;
    let limit = theta * theta * c.zeta();
    let w = WarpFunction::new(-1e8, 0.0, 1.0).unwrap();
    let a = choose_a_flat(&c, &w, collar_k(0.8, &w)).unwrap();
    assert!((a.a_o / limit - 1.0).abs() < 1e-6);
}

#[test]
fn hyperbolic_a_o_tends_to_r_xi() {
    let c = PathConstants { alpha: 0.005, beta: 0.6 };
    let (kappa, r_o) = (0.5, 2.0);
    let xi = xi_root(c.alpha, c.beta, 0.8, kappa, r_o).unwrap().xi;
    let w = WarpFunction::new(-1e8, kappa, r_o).unwrap();
    let a = choose_a_hyperbolic(&c, &w, collar_k(0.8, &w)).unwrap();
    assert!((a.a_o / (r_o * xi) - 1.0).abs() < 1e-6);
}

#[test]
fn hyperbolic_a_o_random_trials() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..50 {
        let c = PathConstants { alpha: rng.gen_range(1e-3..0.2), beta: rng.gen_range(0.05..1.0) };
        let kappa = rng.gen_range(0.05..2.0);
        let r_o = rng.gen_range(0.5..2.0);
        let m = -(10f64.powf(rng.gen_range(0.0..4.0)));
        let w = WarpFunction::new(m, kappa, r_o).unwrap();
        let k = collar_k(rng.gen_range(0.05..1.5), &w);
        match choose_a_hyperbolic(&c, &w, k) {
            Ok(a) => {
                assert!(a.residual < 1e-10, "{a:?}");
                assert!(a.bracket_ok, "{a:?}");
            }
            Err(e) => assert_eq!(e.reason(), "hyperbolic_beta_positive_k_bound"),
        }
    }
}

#[test]
fn hyperbolic_limit_matches_flat_for_small_kappa() {
    let c = PathConstants { alpha: 0.005, beta: 0.6 };
    let flat = collar_limits(&c, 0.8, 1.0, Pipeline::Flat).unwrap();
    let hyp = limit_study(&c, 0.8, 1.0, Pipeline::Hyperbolic { kappa: 1e-3 }, &[-1e6]).unwrap();
    assert!((hyp.rows[0].u_end / flat.u_end - 1.0).abs() < 1e-3);
    assert!((hyp.limits.hawking_mass_end / flat.hawking_mass_end - 1.0).abs() < 1e-3);
}

#[test]
fn hyperbolic_limit_study_converges_monotonically() {
    let c = PathConstants { alpha: 0.005, beta: 0.6 };
    let s = limit_study(&c, 0.8, 1.0, Pipeline::Hyperbolic { kappa: 0.5 }, &[-1e2, -1e4, -1e6, -1e8]).unwrap();
    assert!(s.deviations_nonincreasing(0.0));
    assert!(s.rows.last().unwrap().dev_u < 1e-8);
}

#[test]
fn sandwich_bounds_converge_for_huge_mass() {
    // A k = c / sqrt(-2m): lower bound -> r^{3/2} + 3c/2, upper bound -> the same
    let (r_o, kappa, c) = (1.0f64, 0.5, 0.3);
    let mut gaps = Vec::new();
    for j in [2, 4, 6, 8] {
        let m = -(10f64.powi(j));
        let w = WarpFunction::new(m, kappa, r_o).unwrap();
        let s = c / (-2.0 * m).sqrt();
        let b = warp_upper_bounds_hyperbolic(&w, s, 1.0).unwrap();
        assert!((b.lower - (1.0 + 1.5 * c)).abs() < 1e-12);
        gaps.push(b.upper / b.lower - 1.0);
    }
    assert!(gaps.windows(2).all(|g| g[1] < g[0]), "{gaps:?}");
    assert!(gaps[3] < 1e-6);
}

#[test]
fn collar_a_o_certifies_and_half_breaches() {
    let p = linear_path(&AxisymMetricSpec::bump(1.0, 0.1).unwrap());
    let c = path_constants(&p, Pipeline::Flat).unwrap();
    let col = CollarMetric::new(p.clone(), c, -100.0, 0.8, Pipeline::Flat, None).unwrap();
    let ch = col.a_choice().unwrap();
    assert!(ch.residual < 1e-10 && ch.bracket_ok);
    assert!(col.scalar_curvature_field(Grid::default(), false).unwrap().min >= -1e-10);
    let half = CollarMetric::new(p, c, -100.0, 0.8, Pipeline::Flat, Some(col.a() / 2.0)).unwrap();
    let f = half.scalar_curvature_field(Grid::default(), false).unwrap();
    assert!(f.min < 0.0);
    assert_eq!(f.argmin.0, 1.0);
}

#[test]
fn slices_grow_with_positive_mean_curvature() {
    let p = linear_path(&AxisymMetricSpec::bump(1.0, 0.1).unwrap());
    let c = path_constants(&p, Pipeline::Flat).unwrap();
    let col = CollarMetric::new(p, c, -100.0, 0.8, Pipeline::Flat, None).unwrap();
    let reps: Vec<_> = Grid::default().t_nodes().iter().map(|&t| col.slice_report(t).unwrap()).collect();
    assert!(reps.windows(2).all(|w| w[1].area > w[0].area));
    assert!(reps.iter().all(|r| r.mean_curvature > 0.0));
    assert!(reps.last().unwrap().hawking_mass > reps[0].hawking_mass);
}

#[test]
fn hyperbolic_bound_degenerates_to_flat_bound() {
    let g = AxisymMetricSpec::round(1.0).unwrap();
    let h = MeanCurvatureSpec::from_tau(0.5, 1.0).unwrap();
    let c = PathConstants { alpha: 0.005, beta: 0.6 };
    let flat = flat_mass_bounds(&g, &h, c.zeta(), None).unwrap();
    let mut prev = f64::INFINITY;
    for kappa in [1e-2, 1e-3, 1e-4] {
        let xi = xi_root(c.alpha, c.beta, 0.5, kappa, 1.0).unwrap();
        let hyp = hyperbolic_mass_bounds(&g, &h, kappa, &xi, None).unwrap();
        let d = (hyp.bartnik_upper_bound - flat.bartnik_upper_bound).abs();
        assert!(d < prev);
        prev = d;
    }
    assert!(prev < 1e-6);
}
