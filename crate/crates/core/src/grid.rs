use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `y_i = y_min + i·dy`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    y_min: f64,
    y_max: f64,
    n: usize,
}

impl Grid1D {
    pub const MIN_NODES: usize = 16;

    pub fn new(y_min: f64, y_max: f64, n: usize) -> Result<Self> {
        if n < Self::MIN_NODES {
            return Err(Error::Config(format!("grid needs at least {} nodes, got {n}", Self::MIN_NODES)));
        }
        if !(y_min.is_finite() && y_max.is_finite() && y_max > y_min) {
            return Err(Error::Config(format!("grid extents must satisfy y_min < y_max, got [{y_min}, {y_max}]")));
        }
        Ok(Self { y_min, y_max, n })
    }

    /// Grid covering `[y_min, y_max]` with spacing at most `dy`.
    pub fn with_spacing(y_min: f64, y_max: f64, dy: f64) -> Result<Self> {
        if !(dy > 0.0) {
            return Err(Error::Config(format!("grid spacing must be positive, got {dy}")));
        }
        let cells = ((y_max - y_min) / dy).ceil().max(1.0) as usize;
        Self::new(y_min, y_max, (cells + 1).max(Self::MIN_NODES))
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.y_max
        } else {
            self.y_min + i as f64 * self.dy()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Index range of nodes inside `[lo, hi]`.
    pub fn index_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let dy = self.dy();
        let first = ((lo - self.y_min) / dy).ceil().max(0.0) as usize;
        let last = ((hi - self.y_min) / dy).floor();
        if last < 0.0 {
            return 0..0;
        }
        let end = (last as usize + 1).min(self.n);
        first.min(end)..end
    }
}

/// Trapezoid rule for samples on a uniform grid.
pub fn trapezoid(values: &[f64], dy: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => dy * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}
