//! Hawking and Bartnik mass bounds for constant-mean-curvature spheres.
//!
//! The pipeline: an axisymmetric metric on the sphere ([`sphere_metrics`]) is joined
//! to the round metric by a trace-free path ([`metric_paths`]) whose constants
//! `alpha`, `beta` feed the scalar root equations ([`roots`]). A warped collar built
//! from Schwarzschild or AdS-Schwarzschild profiles ([`warp_odes`], [`collar`])
//! certifies the construction, and [`mass_bounds`] turns everything into bounds
//! and positivity verdicts.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod collar;
pub mod error;
pub mod mass_bounds;
pub mod metric_paths;
pub mod roots;
pub mod spectral;
pub mod sphere_metrics;
pub mod warp_odes;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};

/// Sampling grid on `[0, 1] x [-1, 1]`: uniform in `t`, Chebyshev–Lobatto in `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub t_samples: usize,
    /// Number of x intervals; the grid has `x_intervals + 1` nodes.
    pub x_intervals: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self { t_samples: 101, x_intervals: sphere_metrics::DEFAULT_X_INTERVALS }
    }
}

impl Grid {
    pub fn new(t_samples: usize, x_intervals: usize) -> Result<Self> {
        if t_samples < 2 || x_intervals < 2 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 2 t samples and 2 x intervals, got {t_samples} x {x_intervals}"
            )));
        }
        Ok(Self { t_samples, x_intervals })
    }

    pub fn t_nodes(&self) -> Vec<f64> {
        let n = self.t_samples - 1;
        (0..=n).map(|i| if i == n { 1.0 } else { i as f64 / n as f64 }).collect()
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        spectral::lobatto_nodes(self.x_intervals)
    }

    /// Refinement that contains every node of `self`.
    pub fn doubled(&self) -> Self {
        Self { t_samples: 2 * self.t_samples - 1, x_intervals: 2 * self.x_intervals }
    }
}

/// Ambient model the collar is glued into.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "pipeline", rename_all = "lowercase")]
pub enum Pipeline {
    /// Nonnegative scalar curvature, Schwarzschild collar.
    #[default]
    Flat,
    /// Scalar curvature at least `-6 kappa^2`, AdS-Schwarzschild collar.
    Hyperbolic { kappa: f64 },
}

impl Pipeline {
    pub fn kappa(&self) -> f64 {
        match self {
            Pipeline::Flat => 0.0,
            Pipeline::Hyperbolic { kappa } => *kappa,
        }
    }

    /// Lower bound the collar scalar curvature must respect.
    pub fn scalar_curvature_floor(&self) -> f64 {
        -6.0 * self.kappa() * self.kappa()
    }
}
