use rustfft::num_complex::Complex64;

use super::GridSpec;
use crate::error::{invalid, Result};

/// Real samples of a scalar field on a [`GridSpec`], row-major with the
/// `x₁` index running fastest: `values[j * n + i] = f(i h, j h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: GridSpec, value: f64) -> Result<Self> {
        Self::from_values(grid, vec![value; grid.len()])
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "field has {} samples, grid expects {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite sample at index {pos}")));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x₁, x₂)` at every grid point.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let n = grid.n_points();
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..n {
            let x2 = grid.coord(j);
            for i in 0..n {
                values.push(f(grid.coord(i), x2));
            }
        }
        Self::from_values(grid, values)
    }

    /// Skips the finiteness scan; callers check with [`first_non_finite`](Self::first_non_finite).
    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.n_points() + i]
    }

    pub fn first_non_finite(&self) -> Option<usize> {
        self.values.iter().position(|v| !v.is_finite())
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Midpoint-rule integral over the box.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn sub(&self, other: &RealField) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    /// Largest pointwise `|self - other|`.
    pub fn max_abs_diff(&self, other: &RealField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Fourier-series coefficients `f̂(k)` with `f(x) = Σ f̂(k) e^{i k·x}`, stored
/// in the same index layout as [`RealField`] (FFT order along each axis).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralCoeffs {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub(crate) fn from_raw(grid: GridSpec, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at FFT indices `(i, j)` (mode along `x₁`, mode along `x₂`).
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.coeffs[j * self.grid.n_points() + i]
    }

    /// `∫|f|² dx = L² Σ |f̂|²`.
    pub fn energy(&self) -> f64 {
        let l = self.grid.box_length();
        l * l * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Largest `|f̂(k) - conj(f̂(-k))|`; zero for the transform of a real field.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n_points();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let jm = (n - j) % n;
            for i in 0..n {
                let im = (n - i) % n;
                let d = self.at(i, j) - self.at(im, jm).conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Number of coefficients with modulus above `threshold`.
    pub fn count_above(&self, threshold: f64) -> usize {
        self.coeffs.iter().filter(|c| c.norm() > threshold).count()
    }

    pub(crate) fn map_indexed(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        let n = self.grid.n_points();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for j in 0..n {
            for i in 0..n {
                out.push(f(i, j, self.coeffs[j * n + i]));
            }
        }
        Self::from_raw(self.grid, out)
    }
}

/// Two-component field `(v₁, v₂)` on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x1: RealField,
    pub x2: RealField,
}

impl VectorField {
    pub fn new(x1: RealField, x2: RealField) -> Result<Self> {
        if x1.grid() != x2.grid() {
            return Err(invalid("vector components live on different grids"));
        }
        Ok(Self { x1, x2 })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            x1: RealField::zeros(grid),
            x2: RealField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.x1.grid()
    }

    /// Pointwise Euclidean length.
    pub fn magnitude(&self) -> RealField {
        self.x1.zip_map(&self.x2, f64::hypot)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.x1
            .values()
            .iter()
            .zip(self.x2.values())
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// Pointwise `self · other`.
    pub fn dot(&self, other: &VectorField) -> RealField {
        let a = self.x1.zip_map(&other.x1, |p, q| p * q);
        let b = self.x2.zip_map(&other.x2, |p, q| p * q);
        a.zip_map(&b, |p, q| p + q)
    }
}
