//! Parameter sweeps over `tau`, `zeta`, `kappa r_o` and `r_h / r_o`.
//!
//! Cells are evaluated in parallel; rows come out in lexicographic order of the axis
//! indices (first axis slowest) regardless of scheduling.

use std::collections::BTreeSet;
use std::fmt;

use anyhow::{bail, Result};
use qlm_core::mass_bounds::{ccmm_comparison, flat_bounds, hyperbolic_bounds, horizon_criterion, SCHEMA_VERSION};
use qlm_core::roots::xi_root;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Tau,
    Zeta,
    KappaR,
    RhRatio,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::Tau => "tau",
            Variable::Zeta => "zeta",
            Variable::KappaR => "kappa_r",
            Variable::RhRatio => "rh_ratio",
        }
    }

    fn admits(self, v: f64) -> bool {
        v.is_finite()
            && match self {
                Variable::RhRatio => v > 0.0,
                _ => v >= 0.0,
            }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub var: Variable,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![self.min];
        }
        let n = (self.samples - 1) as f64;
        (0..self.samples)
            .map(|i| if i + 1 == self.samples { self.max } else { self.min + (self.max - self.min) * i as f64 / n })
            .collect()
    }
}

/// Values of the variables that are not swept.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixed {
    #[serde(default = "one")]
    pub r_o: f64,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub zeta: f64,
    #[serde(default)]
    pub kappa_r: f64,
    pub rh_ratio: Option<f64>,
    /// Curvature constant of the path; `alpha = 2 beta zeta^2`.
    #[serde(default = "one")]
    pub beta: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for Fixed {
    fn default() -> Self {
        Self { r_o: 1.0, tau: 0.0, zeta: 0.0, kappa_r: 0.0, rh_ratio: None, beta: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Theta,
    ThetaResidual,
    HawkingMass,
    BartnikBound,
    WeakBound,
    HawkingLowerBound,
    HorizonSlack,
    HorizonThreshold,
    HorizonPositive,
    Xi,
    ThetaKappa,
    HyperbolicHawkingMass,
    HyperbolicBound,
    HyperbolicWeakBound,
    CcmmBound,
    CcmmThetaBound,
}

impl Quantity {
    pub const ALL: [Quantity; 16] = [
        Quantity::Theta,
        Quantity::ThetaResidual,
        Quantity::HawkingMass,
        Quantity::BartnikBound,
        Quantity::WeakBound,
        Quantity::HawkingLowerBound,
        Quantity::HorizonSlack,
        Quantity::HorizonThreshold,
        Quantity::HorizonPositive,
        Quantity::Xi,
        Quantity::ThetaKappa,
        Quantity::HyperbolicHawkingMass,
        Quantity::HyperbolicBound,
        Quantity::HyperbolicWeakBound,
        Quantity::CcmmBound,
        Quantity::CcmmThetaBound,
    ];

    pub fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub fixed: Fixed,
    /// Columns to record; all of them when omitted.
    pub quantities: Option<Vec<Quantity>>,
    pub out: Option<std::path::PathBuf>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            bail!("sweep needs at least one axis");
        }
        let mut seen = BTreeSet::new();
        for a in &self.axes {
            if !seen.insert(a.var) {
                bail!("axis {} appears twice", a.var.name());
            }
            if a.samples == 0 {
                bail!("axis {} has no samples", a.var.name());
            }
            if !(a.var.admits(a.min) && a.var.admits(a.max)) || a.min > a.max {
                bail!("axis {} range [{}, {}] is outside its domain", a.var.name(), a.min, a.max);
            }
        }
        let f = &self.fixed;
        if !(f.r_o > 0.0 && f.r_o.is_finite() && f.beta > 0.0 && f.beta.is_finite()) {
            bail!("fixed r_o and beta must be positive");
        }
        for (v, x) in [(Variable::Tau, f.tau), (Variable::Zeta, f.zeta), (Variable::KappaR, f.kappa_r)] {
            if !v.admits(x) {
                bail!("fixed {} = {x} is outside its domain", v.name());
            }
        }
        if let Some(r) = f.rh_ratio {
            if !Variable::RhRatio.admits(r) {
                bail!("fixed rh_ratio = {r} is outside its domain");
            }
        }
        if matches!(&self.quantities, Some(q) if q.is_empty()) {
            bail!("quantity list is empty");
        }
        Ok(())
    }

    fn quantity_list(&self) -> Vec<Quantity> {
        self.quantities.clone().unwrap_or_else(|| Quantity::ALL.to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Num(f64),
    Flag(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // 17 significant digits
            Value::Num(x) => write!(f, "{x:.16e}"),
            Value::Flag(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    r_o: f64,
    tau: f64,
    zeta: f64,
    kappa_r: f64,
    rh_ratio: Option<f64>,
    beta: f64,
}

impl Point {
    fn set(&mut self, v: Variable, x: f64) {
        match v {
            Variable::Tau => self.tau = x,
            Variable::Zeta => self.zeta = x,
            Variable::KappaR => self.kappa_r = x,
            Variable::RhRatio => self.rh_ratio = Some(x),
        }
    }
}

type Row = Vec<Option<Value>>;

fn evaluate(p: Point, qs: &[Quantity]) -> qlm_core::Result<Row> {
    use Quantity as Q;
    let r_o = p.r_o;
    let tau2 = p.tau * p.tau;
    // CMC sphere of area radius r_o
    let m_h = 0.5 * r_o * (1.0 - tau2);
    let r_h = p.rh_ratio.map(|x| x * r_o);
    let flat = flat_bounds(r_o, p.tau, m_h, p.zeta, r_h)?;
    let horizon = match r_h {
        Some(r_h) => Some(horizon_criterion(p.zeta, r_h, r_o)?),
        None => None,
    };
    let alpha = 2.0 * p.beta * p.zeta * p.zeta;
    let hyp = if p.kappa_r > 0.0 {
        let kappa = p.kappa_r / r_o;
        let xi = xi_root(alpha, p.beta, p.tau, kappa, r_o)?;
        let m_hk = m_h + 0.5 * r_o * p.kappa_r * p.kappa_r;
        Some(hyperbolic_bounds(r_o, p.tau, m_hk, kappa, &xi, r_h)?)
    } else {
        None
    };
    let ccmm = ccmm_comparison(alpha, p.beta, p.tau, m_h);

    let num = |x: f64| Some(Value::Num(x));
    Ok(qs
        .iter()
        .map(|q| match q {
            Q::Theta => num(flat.theta.theta),
            Q::ThetaResidual => num(flat.theta.residual),
            Q::HawkingMass => num(m_h),
            Q::BartnikBound => num(flat.bartnik_upper_bound),
            Q::WeakBound => num(flat.weak_bound),
            Q::HawkingLowerBound => num(flat.hawking_lower_bound),
            Q::HorizonSlack => flat.horizon_inequality.and_then(|v| num(v.slack)),
            Q::HorizonThreshold => horizon.and_then(|h| num(h.threshold)),
            Q::HorizonPositive => horizon.map(|h| Value::Flag(h.holds)),
            Q::Xi => hyp.as_ref().and_then(|h| num(h.xi.xi)),
            Q::ThetaKappa => hyp.as_ref().and_then(|h| h.xi.theta_kappa).and_then(num),
            Q::HyperbolicHawkingMass => hyp.as_ref().and_then(|h| num(h.hawking_mass)),
            Q::HyperbolicBound => hyp.as_ref().and_then(|h| num(h.bartnik_upper_bound)),
            Q::HyperbolicWeakBound => hyp.as_ref().and_then(|h| num(h.weak_bound)),
            Q::CcmmBound => ccmm.and_then(|c| num(c.ccmm_bound)),
            Q::CcmmThetaBound => ccmm.and_then(|c| num(c.theta_bound)),
        })
        .collect())
}

/// Axis indices of every cell, first axis slowest.
fn cell_indices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = sizes.iter().product();
    (0..total)
        .map(|mut n| {
            let mut idx = vec![0; sizes.len()];
            for (slot, &s) in idx.iter_mut().zip(sizes).rev() {
                *slot = n % s;
                n /= s;
            }
            idx
        })
        .collect()
}

/// Runs the sweep and renders it as CSV.
pub fn run(spec: &SweepSpec) -> Result<Vec<u8>> {
    spec.validate()?;
    let qs = spec.quantity_list();
    let values: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let sizes: Vec<usize> = values.iter().map(Vec::len).collect();
    let f = &spec.fixed;
    let base = Point { r_o: f.r_o, tau: f.tau, zeta: f.zeta, kappa_r: f.kappa_r, rh_ratio: f.rh_ratio, beta: f.beta };

    let cells: Vec<(Vec<usize>, std::result::Result<Row, &'static str>)> = cell_indices(&sizes)
        .into_par_iter()
        .map(|idx| {
            let mut p = base;
            for (k, (a, &i)) in spec.axes.iter().zip(&idx).enumerate() {
                p.set(a.var, values[k][i]);
            }
            let row = evaluate(p, &qs).map_err(|e| e.reason());
            (idx, row)
        })
        .collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["schema_version".to_owned()];
    header.extend(spec.axes.iter().map(|a| format!("i_{}", a.var.name())));
    header.extend(spec.axes.iter().map(|a| a.var.name().to_owned()));
    header.extend(qs.iter().map(|q| q.name()));
    header.push("reason".to_owned());
    w.write_record(&header)?;

    for (idx, row) in cells {
        let mut rec = vec![SCHEMA_VERSION.to_string()];
        rec.extend(idx.iter().map(usize::to_string));
        rec.extend(idx.iter().enumerate().map(|(k, &i)| Value::Num(values[k][i]).to_string()));
        match row {
            Ok(r) => {
                rec.extend(r.iter().map(|v| v.map(|v| v.to_string()).unwrap_or_default()));
                rec.push(String::new());
            }
            Err(reason) => {
                rec.extend(qs.iter().map(|_| String::new()));
                rec.push(reason.to_owned());
            }
        }
        w.write_record(&rec)?;
    }
    Ok(w.into_inner()?)
}
