use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Geometry of the periodic square `[0, L)²` sampled on `n × n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n_points: usize,
    box_length: f64,
    dealias_fraction: f64,
}

impl GridSpec {
    pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

    pub fn new(n_points: usize, box_length: f64, dealias_fraction: f64) -> Result<Self> {
        if n_points < 8 || !n_points.is_multiple_of(2) {
            return Err(invalid(format!(
                "n_points must be even, >= 8 (got {n_points})"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(invalid(format!(
                "box_length must be > 0 (got {box_length})"
            )));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(invalid(format!(
                "dealias_fraction must lie in (0, 1] (got {dealias_fraction})"
            )));
        }
        Ok(Self {
            n_points,
            box_length,
            dealias_fraction,
        })
    }

    /// Grid with the standard 2/3 dealiasing fraction.
    pub fn square(n_points: usize, box_length: f64) -> Result<Self> {
        Self::new(n_points, box_length, Self::DEFAULT_DEALIAS)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Total number of samples, `n²`.
    pub fn len(&self) -> usize {
        self.n_points * self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n_points as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Physical coordinate of sample index `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn center(&self) -> [f64; 2] {
        [0.5 * self.box_length, 0.5 * self.box_length]
    }

    /// Signed integer mode of index `i`, in `[-n/2, n/2)`.
    pub fn mode(&self, i: usize) -> i64 {
        let n = self.n_points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Wavenumber `2π/L · mode(i)`; the Nyquist index carries `-π n / L`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * PI / self.box_length * self.mode(i) as f64
    }

    /// Wavenumber used by odd derivatives: identical to [`wavenumber`](Self::wavenumber)
    /// except that the Nyquist mode is zeroed.
    pub fn derivative_wavenumber(&self, i: usize) -> f64 {
        if i == self.n_points / 2 {
            0.0
        } else {
            self.wavenumber(i)
        }
    }

    /// Largest retained `|mode|` under the dealiasing rule.
    pub fn dealias_cutoff(&self) -> f64 {
        self.dealias_fraction * (self.n_points / 2) as f64
    }

    /// Time at which the diffusion length `2√t` reaches a quarter of the box.
    /// Whole-plane comparisons are only meaningful before this.
    pub fn saturation_time(&self) -> f64 {
        let quarter = 0.25 * self.box_length;
        quarter * quarter / 4.0
    }

    /// Minimum-image displacement `x - c` on the torus, per component.
    pub fn periodic_offset(&self, x: f64, c: f64) -> f64 {
        let l = self.box_length;
        let mut d = (x - c) % l;
        if d >= 0.5 * l {
            d -= l;
        } else if d < -0.5 * l {
            d += l;
        }
        d
    }
}
