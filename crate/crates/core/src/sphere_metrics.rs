//! Axisymmetric metrics on the 2-sphere in the fixed-area-form chart
//!
//! ```text
//! g = r_o^2 [ P(x)^-1 dx^2 + P(x) dphi^2 ],   P(x) = (1 - x^2) w(x),   x in [-1, 1]
//! ```
//!
//! The area form is `r_o^2 dx dphi`, so the total area is `4 pi r_o^2` for every
//! profile `w`, and the Gauss curvature is `K = -P''/(2 r_o^2)`. Poles are free
//! of conical singularities exactly when `w(-1) = w(1) = 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{clenshaw_curtis_weights, lobatto_nodes, ChebSeries};

/// Number of Lobatto intervals in the default x grid (257 nodes).
pub const DEFAULT_X_INTERVALS: usize = 256;

/// Tolerance on `|w(+-1) - 1|`.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Relative size below which trailing Chebyshev coefficients of sampled data are dropped.
const SAMPLE_CHOP: f64 = 4e-16;

/// Value and first two derivatives of a function of x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

/// The profile function `w` of an axisymmetric metric.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `w = 1`.
    Round,
    /// Monomial coefficients, `w(x) = sum_i c_i x^i`.
    Poly(Vec<f64>),
    /// Samples on the ascending Lobatto nodes, held as the Chebyshev interpolant.
    Samples {
        series: ChebSeries,
        d1: ChebSeries,
        d2: ChebSeries,
    },
}

impl Profile {
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::InvalidInput(
                "sampled profile needs at least 3 Lobatto samples".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite profile sample {v}")));
        }
        let series = ChebSeries::from_lobatto_samples(values).chopped(SAMPLE_CHOP);
        let d1 = series.derivative();
        let d2 = d1.derivative();
        Ok(Profile::Samples { series, d1, d2 })
    }

    pub fn jet(&self, x: f64) -> Jet {
        match self {
            Profile::Round => Jet { value: 1.0, d1: 0.0, d2: 0.0 },
            Profile::Poly(c) => {
                let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
                for &ci in c.iter().rev() {
                    d2 = d2 * x + 2.0 * d1;
                    d1 = d1 * x + v;
                    v = v * x + ci;
                }
                Jet { value: v, d1, d2 }
            }
            Profile::Samples { series, d1, d2 } => Jet {
                value: series.eval(x),
                d1: d1.eval(x),
                d2: d2.eval(x),
            },
        }
    }

    pub fn is_round(&self) -> bool {
        match self {
            Profile::Round => true,
            Profile::Poly(c) => c.first() == Some(&1.0) && c.iter().skip(1).all(|&v| v == 0.0),
            Profile::Samples { series, .. } => {
                let c = series.coeffs();
                c[0] == 1.0 && c.iter().skip(1).all(|&v| v == 0.0)
            }
        }
    }
}

/// `P = (1 - x^2) w` and its x-derivatives, given the jet of `w`.
pub fn p_jet(x: f64, w: Jet) -> Jet {
    let q = 1.0 - x * x;
    Jet {
        value: q * w.value,
        d1: -2.0 * x * w.value + q * w.d1,
        d2: -2.0 * w.value - 4.0 * x * w.d1 + q * w.d2,
    }
}

/// An area-normalized axisymmetric metric on S^2.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisymMetricSpec {
    r_o: f64,
    profile: Profile,
}

impl AxisymMetricSpec {
    /// Validates positivity of `r_o`, pole regularity, and positivity of `w`
    /// on a dense check grid.
    pub fn new(r_o: f64, profile: Profile) -> Result<Self> {
        if !(r_o.is_finite() && r_o > 0.0) {
            return Err(Error::InvalidInput(format!("area radius must be positive, got {r_o}")));
        }
        for pole in [-1.0, 1.0] {
            let value = profile.jet(pole).value;
            if !((value - 1.0).abs() <= POLE_TOLERANCE) {
                return Err(Error::PoleRegularity { pole, value });
            }
        }
        for x in lobatto_nodes(4 * DEFAULT_X_INTERVALS) {
            let jet = profile.jet(x);
            if !jet.is_finite() {
                return Err(Error::NonFinite { what: "profile", x });
            }
            if jet.value <= 0.0 {
                return Err(Error::NonPositiveProfile { x, value: jet.value });
            }
        }
        Ok(Self { r_o, profile })
    }

    pub fn round(r_o: f64) -> Result<Self> {
        Self::new(r_o, Profile::Round)
    }

    /// `w = 1 + eps (1 - x^2)`, the one-parameter family used throughout the tests.
    pub fn bump(r_o: f64, eps: f64) -> Result<Self> {
        Self::new(r_o, Profile::Poly(vec![1.0 + eps, 0.0, -eps]))
    }

    pub fn r_o(&self) -> f64 {
        self.r_o
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn area(&self) -> f64 {
        4.0 * PI * self.r_o * self.r_o
    }

    pub fn is_round(&self) -> bool {
        self.profile.is_round()
    }

    /// Same profile, area radius multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.r_o * c, self.profile.clone())
    }

    pub fn w_jet(&self, x: f64) -> Jet {
        self.profile.jet(x)
    }

    pub fn p_jet(&self, x: f64) -> Jet {
        p_jet(x, self.profile.jet(x))
    }

    /// `r_o^2 K`, the curvature normalized by the area radius.
    pub fn normalized_curvature(&self, x: f64) -> Result<f64> {
        let p = self.p_jet(x);
        if !p.is_finite() {
            return Err(Error::NonFinite { what: "P''", x });
        }
        Ok(-0.5 * p.d2)
    }
}

/// Gauss curvature `-P''(x) / (2 r_o^2)`.
pub fn gauss_curvature(g: &AxisymMetricSpec, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!("x = {x} outside [-1, 1]")));
    }
    Ok(g.normalized_curvature(x)? / (g.r_o * g.r_o))
}

/// Positive constant mean curvature `H_o`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCurvatureSpec {
    h_o: f64,
}

impl MeanCurvatureSpec {
    pub fn new(h_o: f64) -> Result<Self> {
        if !(h_o.is_finite() && h_o > 0.0) {
            return Err(Error::InvalidInput(format!("mean curvature must be positive, got {h_o}")));
        }
        Ok(Self { h_o })
    }

    /// The mean curvature giving `tau = r_o H_o / 2`.
    pub fn from_tau(tau: f64, r_o: f64) -> Result<Self> {
        Self::new(2.0 * tau / r_o)
    }

    pub fn h_o(&self) -> f64 {
        self.h_o
    }

    pub fn tau(&self, g: &AxisymMetricSpec) -> f64 {
        0.5 * g.r_o * self.h_o
    }
}

/// Area radius of an interior horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonSpec {
    r_h: f64,
}

impl HorizonSpec {
    pub fn new(r_h: f64) -> Result<Self> {
        if !(r_h.is_finite() && r_h > 0.0) {
            return Err(Error::InvalidInput(format!("horizon radius must be positive, got {r_h}")));
        }
        Ok(Self { r_h })
    }

    pub fn from_area(area: f64) -> Result<Self> {
        Self::new((area / (4.0 * PI)).sqrt())
    }

    pub fn r_h(&self) -> f64 {
        self.r_h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceData {
    pub area: f64,
    pub r_o: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub gauss_bonnet_residual: f64,
}

/// Area, curvature range, and the Gauss–Bonnet residual `|int K dsigma - 4 pi|`
/// from Clenshaw–Curtis quadrature on `intervals + 1` Lobatto nodes.
pub fn surface_data(g: &AxisymMetricSpec, intervals: usize) -> Result<SurfaceData> {
    let x = lobatto_nodes(intervals);
    let wts = clenshaw_curtis_weights(intervals);
    let r2 = g.r_o * g.r_o;
    let mut integral = 0.0;
    let (mut k_min, mut k_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (&xi, &wi) in x.iter().zip(&wts) {
        let k = gauss_curvature(g, xi)?;
        k_min = k_min.min(k);
        k_max = k_max.max(k);
        // dsigma = r_o^2 dx dphi
        integral += wi * k * r2 * 2.0 * PI;
    }
    if !integral.is_finite() {
        return Err(Error::NonFinite { what: "Gauss-Bonnet quadrature", x: f64::NAN });
    }
    Ok(SurfaceData {
        area: g.area(),
        r_o: g.r_o,
        k_min,
        k_max,
        gauss_bonnet_residual: (integral - 4.0 * PI).abs(),
    })
}

/// Hawking mass of a CMC sphere: `(r_o/2)(1 - tau^2)`.
pub fn hawking_mass(g: &AxisymMetricSpec, h: &MeanCurvatureSpec) -> f64 {
    let tau = h.tau(g);
    0.5 * g.r_o * (1.0 - tau * tau)
}

/// Hyperbolic Hawking mass `(r_o/2)(1 + kappa^2 r_o^2 - tau^2)`.
pub fn hyperbolic_hawking_mass(g: &AxisymMetricSpec, h: &MeanCurvatureSpec, kappa: f64) -> Result<f64> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidInput(format!("kappa must be positive, got {kappa}")));
    }
    let tau = h.tau(g);
    let kr = kappa * g.r_o;
    Ok(0.5 * g.r_o * (1.0 + kr * kr - tau * tau))
}

/// Meridian profile `(rho(x), z(x))` of an isometric surface of revolution in R^3.
#[derive(Debug, Clone)]
pub struct RevolutionProfile {
    pub r_o: f64,
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub z: Vec<f64>,
    /// `z'(x) / r_o`, smooth and positive on [-1, 1].
    pub z_slope: Vec<f64>,
    /// `r_o^2 K` at the nodes.
    pub normalized_curvature: Vec<f64>,
    z_series: ChebSeries,
}

impl RevolutionProfile {
    /// `z(x)` anywhere in [-1, 1].
    pub fn z_at(&self, x: f64) -> f64 {
        self.r_o * self.z_series.eval(x)
    }

    /// Mean curvature (sum of principal curvatures) of the embedded surface at node `j`.
    pub fn mean_curvature(&self, j: usize) -> f64 {
        let zs = self.z_slope[j];
        (self.normalized_curvature[j] + zs * zs) / (self.r_o * zs)
    }
}

/// Embeds `(S^2, g)` as a surface of revolution with `rho = r_o sqrt(P)`.
/// Requires `K > 0`; the meridian slope is
/// `z'(x)^2 = r_o^2 (4 - P'^2) / (4 P)`, with limit `r_o^2 (-P''/2)` at the poles.
pub fn embed_revolution(g: &AxisymMetricSpec, intervals: usize) -> Result<RevolutionProfile> {
    let x = lobatto_nodes(intervals);
    let r_o = g.r_o;
    let mut rho = Vec::with_capacity(x.len());
    let mut slope = Vec::with_capacity(x.len());
    let mut curv = Vec::with_capacity(x.len());
    for &xi in &x {
        let p = g.p_jet(xi);
        let kn = -0.5 * p.d2;
        if !(kn > 0.0) {
            return Err(Error::Embedding(format!(
                "Gauss curvature not positive at x = {xi} (r_o^2 K = {kn})"
            )));
        }
        let z2 = if xi.abs() == 1.0 {
            kn
        } else {
            (4.0 - p.d1 * p.d1) / (4.0 * p.value)
        };
        if !(z2 > 0.0) || !z2.is_finite() {
            return Err(Error::Embedding(format!("meridian slope imaginary at x = {xi}")));
        }
        rho.push(r_o * p.value.max(0.0).sqrt());
        slope.push(z2.sqrt());
        curv.push(kn);
    }
    let slope_series = ChebSeries::from_lobatto_samples(&slope);
    let anti = slope_series.antiderivative();
    let half_height = 0.5 * anti.eval(1.0);
    let mut zc = anti.coeffs().to_vec();
    zc[0] -= half_height;
    let z_series = ChebSeries::new(zc);
    let z = x.iter().map(|&xi| r_o * z_series.eval(xi)).collect();
    Ok(RevolutionProfile {
        r_o,
        x,
        rho,
        z,
        z_slope: slope,
        normalized_curvature: curv,
        z_series,
    })
}

/// Brown–York mass and its split into Hawking mass, Minkowski excess, and
/// the mean-curvature defect `(r_o/2)(1 - tau)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrownYorkMass {
    pub mass: f64,
    pub hawking_mass: f64,
    /// `(1/8 pi) int H_E dsigma - r_o`; nonnegative by the Minkowski inequality.
    pub minkowski_excess: f64,
    pub mean_curvature_defect: f64,
    pub total_mean_curvature: f64,
    pub decomposition_residual: f64,
}

pub fn brown_york_mass(g: &AxisymMetricSpec, h: &MeanCurvatureSpec, intervals: usize) -> Result<BrownYorkMass> {
    let emb = embed_revolution(g, intervals)?;
    let wts = clenshaw_curtis_weights(intervals);
    let r_o = g.r_o;
    let area_factor = 2.0 * PI * r_o * r_o;
    let (mut total, mut defect_integral) = (0.0, 0.0);
    for (j, wj) in wts.iter().enumerate() {
        let he = emb.mean_curvature(j);
        total += wj * he * area_factor;
        defect_integral += wj * (he - h.h_o) * area_factor;
    }
    let tau = h.tau(g);
    let mass = defect_integral / (8.0 * PI);
    let hawking = hawking_mass(g, h);
    let excess = total / (8.0 * PI) - r_o;
    let defect = 0.5 * r_o * (1.0 - tau) * (1.0 - tau);
    Ok(BrownYorkMass {
        mass,
        hawking_mass: hawking,
        minkowski_excess: excess,
        mean_curvature_defect: defect,
        total_mean_curvature: total,
        decomposition_residual: (mass - (hawking + excess + defect)).abs(),
    })
}

/// On-disk metric description.
///
/// ```json
/// { "type": "axisym", "r_o": 1.0, "w": { "basis": "poly", "data": [1.1, 0.0, -0.1] } }
/// { "type": "round", "r_o": 2.0 }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MetricFile {
    Axisym { r_o: f64, w: ProfileData },
    Round { r_o: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileData {
    pub basis: Basis,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Poly,
    /// Values at the ascending Lobatto nodes `-cos(pi j / n)`.
    Samples,
}

impl TryFrom<&MetricFile> for AxisymMetricSpec {
    type Error = Error;

    fn try_from(file: &MetricFile) -> Result<Self> {
        match file {
            MetricFile::Round { r_o } => AxisymMetricSpec::round(*r_o),
            MetricFile::Axisym { r_o, w } => {
                let profile = match w.basis {
                    Basis::Poly => {
                        if w.data.is_empty() {
                            return Err(Error::InvalidInput("empty polynomial profile".into()));
                        }
                        Profile::Poly(w.data.clone())
                    }
                    Basis::Samples => Profile::from_samples(&w.data)?,
                };
                AxisymMetricSpec::new(*r_o, profile)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(eps: f64) -> AxisymMetricSpec {
        AxisymMetricSpec::bump(1.0, eps).unwrap()
    }

    #[test]
    fn round_curvature_scales_with_radius() {
        let g1 = AxisymMetricSpec::round(1.0).unwrap();
        let g3 = AxisymMetricSpec::round(3.0).unwrap();
        for x in [-1.0, -0.3, 0.0, 0.9, 1.0] {
            assert_eq!(gauss_curvature(&g1, x).unwrap(), 1.0);
            assert!((gauss_curvature(&g3, x).unwrap() - 1.0 / 9.0).abs() < 1e-16);
        }
    }

    #[test]
    fn bump_curvature_matches_finite_differences_of_p() {
        let g = bump(0.1);
        let p = |x: f64| (1.0 - x * x) * (1.0 + 0.1 * (1.0 - x * x));
        let h = 1e-5;
        let fd = -(p(h) - 2.0 * p(0.0) + p(-h)) / (h * h) / 2.0;
        let k = gauss_curvature(&g, 0.0).unwrap();
        // symbolic: P'' = -2.4 + 1.2 x^2
        assert!((k - 1.2).abs() < 1e-14);
        assert!((k - fd).abs() < 1e-5);
    }

    #[test]
    fn curvature_rejects_out_of_range_coordinate() {
        assert!(gauss_curvature(&bump(0.1), 1.5).is_err());
    }

    #[test]
    fn pole_regularity_is_enforced() {
        let err = AxisymMetricSpec::new(1.0, Profile::Poly(vec![1.0, 0.2])).unwrap_err();
        assert!(matches!(err, Error::PoleRegularity { .. }));
        // within tolerance passes
        assert!(AxisymMetricSpec::new(1.0, Profile::Poly(vec![1.0 + 1e-14])).is_ok());
    }

    #[test]
    fn nonpositive_profile_is_rejected() {
        // w = 1 - 3 (1 - x^2) is negative at the equator
        let err = AxisymMetricSpec::bump(1.0, -3.0).unwrap_err();
        assert!(matches!(err, Error::NonPositiveProfile { .. }));
        assert!(AxisymMetricSpec::round(0.0).is_err());
    }

    #[test]
    fn round_surface_data() {
        let g = AxisymMetricSpec::round(2.0).unwrap();
        let sd = surface_data(&g, DEFAULT_X_INTERVALS).unwrap();
        assert!((sd.area - 16.0 * PI).abs() < 1e-13);
        assert!(sd.gauss_bonnet_residual < 1e-13);
        assert_eq!(sd.k_min, 0.25);
    }

    #[test]
    fn bump_gauss_bonnet_at_high_resolution() {
        let g = bump(0.1);
        let sd = surface_data(&g, 2048).unwrap();
        assert!((sd.area - 4.0 * PI).abs() < 1e-14);
        assert!(sd.gauss_bonnet_residual < 1e-8);
        assert!((sd.k_min - 0.6).abs() < 1e-12);
        assert!((sd.k_max - 1.2).abs() < 1e-12);
    }

    #[test]
    fn hawking_masses() {
        let g = AxisymMetricSpec::round(1.0).unwrap();
        let h = MeanCurvatureSpec::new(2.0).unwrap();
        assert_eq!(hawking_mass(&g, &h), 0.0);
        assert!((hyperbolic_hawking_mass(&g, &h, 1.0).unwrap() - 0.5).abs() < 1e-16);
        assert!(hyperbolic_hawking_mass(&g, &h, 0.0).is_err());
        assert!(MeanCurvatureSpec::new(0.0).is_err());

        // Schwarzschild coordinate sphere r = 4, M = 1: tau^2 = 1 - 2M/r
        let g4 = AxisymMetricSpec::round(4.0).unwrap();
        let h4 = MeanCurvatureSpec::from_tau(0.5f64.sqrt(), 4.0).unwrap();
        assert!((hawking_mass(&g4, &h4) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn round_unit_sphere_embeds_as_itself() {
        let g = AxisymMetricSpec::round(1.0).unwrap();
        let e = embed_revolution(&g, 64).unwrap();
        for (j, &x) in e.x.iter().enumerate() {
            assert!((e.rho[j] - (1.0 - x * x).sqrt()).abs() < 1e-15);
            assert!((e.z[j] - x).abs() < 1e-14);
            assert!((e.mean_curvature(j) - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sign_changing_curvature_is_not_embeddable() {
        // r_o^2 K = 1 + 2 eps - 6 eps x^2 is negative at the poles for eps > 1/4
        let g = bump(0.4);
        assert!(matches!(embed_revolution(&g, 64), Err(Error::Embedding(_))));
        assert!(brown_york_mass(&g, &MeanCurvatureSpec::new(1.0).unwrap(), 64).is_err());
    }

    #[test]
    fn brown_york_round_cases() {
        let g = AxisymMetricSpec::round(1.0).unwrap();
        let by = brown_york_mass(&g, &MeanCurvatureSpec::new(2.0).unwrap(), 64).unwrap();
        assert!(by.mass.abs() < 1e-14);
        assert!(by.hawking_mass.abs() < 1e-14);
        assert!(by.minkowski_excess.abs() < 1e-14);
        assert!(by.mean_curvature_defect.abs() < 1e-14);

        let by = brown_york_mass(&g, &MeanCurvatureSpec::new(1.0).unwrap(), 64).unwrap();
        assert!((by.mass - 0.5).abs() < 1e-14);
        assert!((by.hawking_mass - 0.375).abs() < 1e-15);
        assert!(by.minkowski_excess.abs() < 1e-14);
        assert!((by.mean_curvature_defect - 0.125).abs() < 1e-15);
    }

    #[test]
    fn metric_file_parsing() {
        let f: MetricFile = serde_json::from_str(
            r#"{"type":"axisym","r_o":1.5,"w":{"basis":"poly","data":[1.1,0.0,-0.1]}}"#,
        )
        .unwrap();
        let g = AxisymMetricSpec::try_from(&f).unwrap();
        assert_eq!(g.r_o(), 1.5);
        assert!((g.w_jet(0.0).value - 1.1).abs() < 1e-16);

        let f: MetricFile = serde_json::from_str(r#"{"type":"round","r_o":2}"#).unwrap();
        assert!(AxisymMetricSpec::try_from(&f).unwrap().is_round());

        let x = lobatto_nodes(16);
        let data: Vec<f64> = x.iter().map(|t| 1.0 + 0.1 * (1.0 - t * t)).collect();
        let f = MetricFile::Axisym { r_o: 1.0, w: ProfileData { basis: Basis::Samples, data } };
        let g = AxisymMetricSpec::try_from(&f).unwrap();
        assert!((gauss_curvature(&g, 0.0).unwrap() - 1.2).abs() < 1e-11);
    }
}
