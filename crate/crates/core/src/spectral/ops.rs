use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{GridSpec, RealField, SpectralCoeffs, VectorField};
use crate::error::{invalid, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// FFT plans and wavenumber tables for one grid. Every operation is a pure
/// function of its arguments; the struct is cheap to share across threads.
#[derive(Clone)]
pub struct SpectralOps {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    // per-axis tables, indexed by FFT position
    k: Vec<f64>,
    k_odd: Vec<f64>,
}

impl fmt::Debug for SpectralOps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralOps")
            .field("grid", &self.grid)
            .finish()
    }
}

impl SpectralOps {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            k: (0..n).map(|i| grid.wavenumber(i)).collect(),
            k_odd: (0..n).map(|i| grid.derivative_wavenumber(i)).collect(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `|k|²` at FFT indices `(i, j)`, Nyquist included.
    pub fn k_squared(&self, i: usize, j: usize) -> f64 {
        self.k[i] * self.k[i] + self.k[j] * self.k[j]
    }

    fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if *grid != self.grid {
            return Err(invalid("field grid does not match the transform grid"));
        }
        Ok(())
    }

    fn fft2(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n_points();
        let rows_per_task = (n / rayon::current_num_threads().max(1)).max(1);
        let pass = |buf: &mut [Complex64]| {
            buf.par_chunks_mut(n * rows_per_task)
                .for_each(|chunk| fft.process(chunk));
        };
        pass(buf);
        transpose_in_place(buf, n);
        pass(buf);
        transpose_in_place(buf, n);
    }

    pub fn forward_transform(&self, f: &RealField) -> Result<SpectralCoeffs> {
        self.check_grid(f.grid())?;
        if let Some(pos) = f.first_non_finite() {
            return Err(invalid(format!("non-finite sample at index {pos}")));
        }
        Ok(self.forward_unchecked(f))
    }

    pub(crate) fn forward_unchecked(&self, f: &RealField) -> SpectralCoeffs {
        let scale = 1.0 / self.grid.len() as f64;
        let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft2(&mut buf, &self.forward);
        for c in &mut buf {
            *c *= scale;
        }
        SpectralCoeffs::from_raw(self.grid, buf)
    }

    /// Real part of the inverse transform.
    pub fn inverse_transform(&self, c: &SpectralCoeffs) -> RealField {
        assert_eq!(
            *c.grid(),
            self.grid,
            "coefficients live on a different grid"
        );
        let mut buf = c.coeffs().to_vec();
        self.fft2(&mut buf, &self.inverse);
        RealField::from_raw(self.grid, buf.into_iter().map(|z| z.re).collect())
    }

    /// `(i k₁ f̂, i k₂ f̂)` with the Nyquist derivative zeroed.
    pub fn gradient_coeffs(&self, c: &SpectralCoeffs) -> (SpectralCoeffs, SpectralCoeffs) {
        (
            c.map_indexed(|i, _, z| I * self.k_odd[i] * z),
            c.map_indexed(|_, j, z| I * self.k_odd[j] * z),
        )
    }

    /// Second derivatives `(∂₁₁, ∂₁₂, ∂₂₂)` of `f`.
    pub fn hessian_coeffs(&self, c: &SpectralCoeffs) -> [SpectralCoeffs; 3] {
        [
            c.map_indexed(|i, _, z| -self.k[i] * self.k[i] * z),
            c.map_indexed(|i, j, z| -self.k_odd[i] * self.k_odd[j] * z),
            c.map_indexed(|_, j, z| -self.k[j] * self.k[j] * z),
        ]
    }

    /// `i k · (v̂₁, v̂₂)`.
    pub fn divergence_coeffs(&self, v1: &SpectralCoeffs, v2: &SpectralCoeffs) -> SpectralCoeffs {
        let n = self.grid.n_points();
        let mut out = Vec::with_capacity(self.grid.len());
        for j in 0..n {
            for i in 0..n {
                let idx = j * n + i;
                out.push(I * (self.k_odd[i] * v1.coeffs()[idx] + self.k_odd[j] * v2.coeffs()[idx]));
            }
        }
        SpectralCoeffs::from_raw(self.grid, out)
    }

    /// Stream-function inversion of vorticity coefficients:
    /// `û₁ = i k₂ ω̂ / |k|²`, `û₂ = -i k₁ ω̂ / |k|²`, with the derivative
    /// wavenumbers throughout. Modes with vanishing derivative wavenumber
    /// (the mean and the pure-Nyquist modes) carry no velocity.
    pub fn biot_savart_coeffs(&self, w: &SpectralCoeffs) -> (SpectralCoeffs, SpectralCoeffs) {
        let inv_k2 = |i: usize, j: usize| {
            let k2 = self.k_odd[i] * self.k_odd[i] + self.k_odd[j] * self.k_odd[j];
            if k2 == 0.0 {
                0.0
            } else {
                1.0 / k2
            }
        };
        (
            w.map_indexed(|i, j, z| I * self.k_odd[j] * inv_k2(i, j) * z),
            w.map_indexed(|i, j, z| -I * self.k_odd[i] * inv_k2(i, j) * z),
        )
    }

    /// Multiplies every coefficient by `e^{-|k|² τ}`.
    pub fn heat_coeffs(&self, c: &SpectralCoeffs, tau: f64) -> SpectralCoeffs {
        c.map_indexed(|i, j, z| z * (-self.k_squared(i, j) * tau).exp())
    }

    pub fn is_retained(&self, i: usize, j: usize) -> bool {
        let cut = self.grid.dealias_cutoff();
        let m1 = self.grid.mode(i).unsigned_abs() as f64;
        let m2 = self.grid.mode(j).unsigned_abs() as f64;
        m1.max(m2) <= cut
    }

    /// Zeroes every mode with `max(|m₁|, |m₂|)` above `dealias_fraction · n/2`.
    pub fn dealias(&self, c: &SpectralCoeffs) -> SpectralCoeffs {
        c.map_indexed(|i, j, z| {
            if self.is_retained(i, j) {
                z
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub(crate) fn dealias_in_place(&self, c: &mut SpectralCoeffs) {
        let n = self.grid.n_points();
        for j in 0..n {
            for i in 0..n {
                if !self.is_retained(i, j) {
                    c.coeffs_mut()[j * n + i] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    pub fn gradient(&self, f: &RealField) -> Result<VectorField> {
        let c = self.forward_transform(f)?;
        let (g1, g2) = self.gradient_coeffs(&c);
        VectorField::new(self.inverse_transform(&g1), self.inverse_transform(&g2))
    }

    /// `∇^⊥ f = (-∂₂ f, ∂₁ f)`.
    pub fn perp_grad(&self, f: &RealField) -> Result<VectorField> {
        let g = self.gradient(f)?;
        VectorField::new(g.x2.scaled(-1.0), g.x1)
    }

    pub fn divergence(&self, v: &VectorField) -> Result<RealField> {
        let c1 = self.forward_transform(&v.x1)?;
        let c2 = self.forward_transform(&v.x2)?;
        Ok(self.inverse_transform(&self.divergence_coeffs(&c1, &c2)))
    }

    /// Scalar curl `∂₁ v₂ - ∂₂ v₁`.
    pub fn curl(&self, v: &VectorField) -> Result<RealField> {
        let c1 = self.forward_transform(&v.x1)?;
        let c2 = self.forward_transform(&v.x2)?;
        let curl = c2.map_indexed(|i, j, z| {
            let n = self.grid.n_points();
            I * self.k_odd[i] * z - I * self.k_odd[j] * c1.coeffs()[j * n + i]
        });
        Ok(self.inverse_transform(&curl))
    }

    /// Hessian components `(∂₁₁ f, ∂₁₂ f, ∂₂₂ f)`.
    pub fn hessian(&self, f: &RealField) -> Result<[RealField; 3]> {
        let c = self.forward_transform(f)?;
        let [a, b, d] = self.hessian_coeffs(&c);
        Ok([
            self.inverse_transform(&a),
            self.inverse_transform(&b),
            self.inverse_transform(&d),
        ])
    }

    /// Periodic velocity with curl `ω - mean(ω)` and zero divergence.
    pub fn biot_savart(&self, omega: &RealField) -> Result<VectorField> {
        let c = self.forward_transform(omega)?;
        let (u1, u2) = self.biot_savart_coeffs(&c);
        VectorField::new(self.inverse_transform(&u1), self.inverse_transform(&u2))
    }

    /// `e^{τΔ} f` on the torus.
    pub fn heat_propagator(&self, f: &RealField, tau: f64) -> Result<RealField> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(invalid(format!(
                "propagation time must be >= 0 (got {tau})"
            )));
        }
        if tau == 0.0 {
            self.check_grid(f.grid())?;
            return Ok(f.clone());
        }
        let c = self.forward_transform(f)?;
        Ok(self.inverse_transform(&self.heat_coeffs(&c, tau)))
    }
}

fn transpose_in_place(buf: &mut [Complex64], n: usize) {
    for j in 0..n {
        for i in (j + 1)..n {
            buf.swap(j * n + i, i * n + j);
        }
    }
}
