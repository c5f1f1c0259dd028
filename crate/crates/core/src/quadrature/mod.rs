//! Numerical substrate: one-dimensional semi-infinite integration,
//! cumulative (prefix) integral transforms on log grids, and
//! two-dimensional tensor prefix integration.

mod grid;
mod profile;
mod tanh_sinh;

pub(crate) use profile::fmt_float;
pub use grid::{tensor_prefix_2d, TensorGridFunction};
pub use profile::{cumulative, CumulativeProfile, Pchip, ProfileKind, RadialProfile};
pub use tanh_sinh::{integrate_zero_to_inf, tanh_sinh_finite, Quadrature};

use crate::error::{HardyError, Result};

/// Controls for every quadrature in the crate.
///
/// Defaults (`rel_tol = 1e-10`, `grid_points = 512`, span `[1e-6, 1e6]`)
/// leave the acceptance tolerances on norm ratios about two orders of
/// headroom. All integrands in scope are power-law at both endpoints, so
/// log-spaced grids equidistribute panel error; span and count are
/// configurable here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Target relative error for adaptive rules. Must satisfy
    /// `0 < rel_tol <= 1e-6`.
    pub rel_tol: f64,
    /// Refinement cap for the double-exponential rule, in `[3, 14]`.
    pub max_level: u32,
    /// Nodes per axis for cumulative/tensor grids, at least 64.
    pub grid_points: usize,
    /// Lower end of the default log grid.
    pub grid_min: f64,
    /// Upper end of the default log grid.
    pub grid_max: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            max_level: 12,
            grid_points: 512,
            grid_min: 1e-6,
            grid_max: 1e6,
        }
    }
}

impl QuadratureSpec {
    pub fn validated(self) -> Result<Self> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-6) {
            return Err(HardyError::domain(format!(
                "rel_tol must lie in (0, 1e-6], got {}",
                self.rel_tol
            )));
        }
        if !(3..=14).contains(&self.max_level) {
            return Err(HardyError::domain(format!(
                "max_level must lie in [3, 14], got {}",
                self.max_level
            )));
        }
        if self.grid_points < 64 {
            return Err(HardyError::domain(format!(
                "grid_points must be at least 64, got {}",
                self.grid_points
            )));
        }
        if !(self.grid_min.is_finite() && self.grid_max.is_finite())
            || self.grid_min <= 0.0
            || self.grid_min >= self.grid_max
        {
            return Err(HardyError::domain("grid span must satisfy 0 < min < max"));
        }
        Ok(self)
    }

    /// Tighten the relative tolerance (used by tests that need extra digits).
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_grid_points(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    /// The default log-spaced grid `[grid_min, grid_max]` with
    /// `grid_points` nodes.
    pub fn log_grid(&self) -> Vec<f64> {
        log_grid(self.grid_min, self.grid_max, self.grid_points)
    }
}

/// `count` log-spaced nodes on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (la, lb) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
