//! Uniform time grids.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform discretization of `[start, end]` into `n_steps` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    start: f64,
    end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, n_steps: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(Error::Invalid(format!(
                "grid interval [{start}, {end}] is empty or not finite"
            )));
        }
        if n_steps == 0 {
            return Err(Error::Invalid("grid needs at least one step".into()));
        }
        Ok(Self {
            start,
            end,
            n_steps,
        })
    }

    /// Grid on `[0, horizon]`.
    pub fn unit(horizon: f64, n_steps: usize) -> Result<Self> {
        Self::new(0.0, horizon, n_steps)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    pub fn dt(&self) -> f64 {
        (self.end - self.start) / self.n_steps as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_steps {
            self.end
        } else {
            self.start + i as f64 * self.dt()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.node(i)).collect()
    }

    /// Midpoint of cell `i`, i.e. of `[t_i, t_{i+1})`.
    pub fn midpoint(&self, i: usize) -> f64 {
        0.5 * (self.node(i) + self.node(i + 1))
    }

    /// Index of the node nearest to `t`, if it lies within `tol` of it.
    pub fn snap(&self, t: f64, tol: f64) -> Option<usize> {
        let x = (t - self.start) / self.dt();
        let i = x.round();
        if i < 0.0 || i > self.n_steps as f64 {
            return None;
        }
        let i = i as usize;
        ((self.node(i) - t).abs() <= tol).then_some(i)
    }

    /// Grid with the same interval and `factor` times as many steps.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n_steps: self.n_steps * factor.max(1),
            ..*self
        }
    }
}
