use qlm_wasm::demo::{bound_curve, collar_profile, embedding};

#[test]
fn round_bound_curve_is_hawking_mass() {
    let c = bound_curve(0.0, 1.0, 11).unwrap();
    assert_eq!(c.zeta, 0.0);
    assert!(c.theta.iter().all(|&t| t == 1.0));
    for (b, m) in c.bartnik_bound.iter().zip(&c.hawking_mass) {
        assert!((b - m).abs() < 1e-15);
    }
}

#[test]
fn bump_bound_curve_dominates_hawking_mass() {
    let c = bound_curve(0.1, 1.2, 25).unwrap();
    assert!((c.constants.alpha - 0.005).abs() < 1e-12);
    for i in 0..c.tau.len() {
        assert!(c.bartnik_bound[i] >= c.hawking_mass[i]);
        assert!(c.weak_bound[i] >= c.bartnik_bound[i] - 1e-15);
    }
    // tau^2 >= beta / (1 + alpha) has no earlier bound
    assert!(c.ccmm_bound.last().unwrap().is_none());
    assert!(c.ccmm_bound[1].is_some());
    assert!(bound_curve(0.1, 1.0, 1).is_err());
}

#[test]
fn collar_profile_is_certified_and_monotone() {
    let p = collar_profile(0.1, 0.8, 4.0, 0.0).unwrap();
    assert!(p.certified);
    assert_eq!(p.t.len(), 51);
    assert!(p.u.windows(2).all(|w| w[1] > w[0]));
    assert!((p.u.last().unwrap() / p.u_limit - 1.0).abs() < 1e-3);
    let h = collar_profile(0.1, 0.8, 4.0, 0.5).unwrap();
    assert!(h.certified);
    assert_eq!(h.floor, -1.5);
    assert!(collar_profile(0.1, 0.8, 4.0, -1.0).is_err());
}

#[test]
fn embedding_closes_at_poles() {
    let e = embedding(0.1, 0.5).unwrap();
    assert!(e.rho[0].abs() < 1e-12 && e.rho.last().unwrap().abs() < 1e-12);
    assert!(e.brown_york.minkowski_excess >= 0.0);
    assert!(e.brown_york.decomposition_residual < 1e-12);
    // r_o^2 K = 1.2 - 0.6 x^2 for this bump; the middle node is the equator
    assert!((e.curvature[64] - 1.2).abs() < 1e-12);
    assert!(embedding(0.1, -1.0).is_err());
}
