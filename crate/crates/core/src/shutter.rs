//! Row-graded exposure of a global-reset-release shutter.
//!
//! Every row starts integrating at the same instant; row `u` (1-based) stops
//! when its readout begins, so it integrates for `t0 + tr * (u - 1)` seconds.
//! Storage row `r` (0-based) therefore sees `t0 + tr * r`. Setting `tr = 0`
//! gives a global shutter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShutterProfile {
    t0: f64,
    tr: f64,
    rows: usize,
}

impl ShutterProfile {
    pub fn grr(t0: f64, tr: f64, rows: usize) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::param(format!("t0 must be positive and finite, got {t0}")));
        }
        if !(tr.is_finite() && tr >= 0.0) {
            return Err(Error::param(format!("tr must be nonnegative and finite, got {tr}")));
        }
        if rows == 0 {
            return Err(Error::param("shutter needs at least one row"));
        }
        Ok(Self { t0, tr, rows })
    }

    pub fn global(t0: f64, rows: usize) -> Result<Self> {
        Self::grr(t0, 0.0, rows)
    }

    /// Profile whose first row integrates `min` seconds and last row `max`.
    pub fn spanning(min: f64, max: f64, rows: usize) -> Result<Self> {
        if max < min {
            return Err(Error::param("maximum exposure below minimum"));
        }
        let tr = if rows > 1 { (max - min) / (rows - 1) as f64 } else { 0.0 };
        Self::grr(min, tr, rows)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tr(&self) -> f64 {
        self.tr
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Exposure of 0-based storage row `row`.
    #[inline]
    pub fn row_exposure(&self, row: usize) -> f64 {
        self.t0 + self.tr * row as f64
    }

    /// Exposure of 1-based row index `u`.
    pub fn exposure(&self, u: usize) -> f64 {
        assert!(u >= 1 && u <= self.rows, "row {u} outside 1..={}", self.rows);
        self.row_exposure(u - 1)
    }

    pub fn max_exposure(&self) -> f64 {
        self.row_exposure(self.rows - 1)
    }

    pub fn min_exposure(&self) -> f64 {
        self.t0
    }

    /// Per-pixel exposures of a `rows x width` sensor, row-major.
    pub fn pixel_exposures(&self, width: usize) -> Vec<f64> {
        (0..self.rows).flat_map(|r| std::iter::repeat_n(self.row_exposure(r), width)).collect()
    }

    pub fn with_t0(&self, t0: f64) -> Result<Self> {
        Self::grr(t0, self.tr, self.rows)
    }

    /// Sub-profile over every other row starting at `offset` (0 or 1).
    pub fn decimated(&self, offset: usize) -> Result<Self> {
        if offset > 1 || self.rows <= offset {
            return Err(Error::param("decimation offset must be 0 or 1 within the profile"));
        }
        let rows = (self.rows - offset).div_ceil(2);
        Self::grr(self.row_exposure(offset), 2.0 * self.tr, rows)
    }
}
