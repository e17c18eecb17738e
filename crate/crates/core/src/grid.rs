//! Sampling grid and the complex scalar field that lives on it.
//!
//! Lengths are in wavelengths throughout. Sample `j` along an axis sits at
//! `(j - (n - 1) / 2) * pitch`, so the optical axis passes between the four
//! central samples and the grid is symmetric under quarter turns and mirrors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub pitch: f64,
}

impl GridSpec {
    pub fn new(n: usize, pitch: f64) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidGrid(format!("n = {n} is below the minimum of 8")));
        }
        if n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n = {n} must be even")));
        }
        if !(pitch > 0.0 && pitch.is_finite()) {
            return Err(Error::InvalidGrid(format!("pitch = {pitch} must be positive")));
        }
        Ok(Self { n, pitch })
    }

    /// Paper-scale geometry: 200 x 200 nodes over a 100 wavelength aperture.
    pub fn paper() -> Self {
        Self { n: 200, pitch: 0.5 }
    }

    /// CPU-friendly geometry used by the desk preset.
    pub fn desk() -> Self {
        Self { n: 64, pitch: 0.5 }
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn aperture(&self) -> f64 {
        self.n as f64 * self.pitch
    }

    /// Physical coordinate of sample index `j` along either axis.
    #[inline]
    pub fn coord(&self, j: usize) -> f64 {
        (j as f64 - (self.n as f64 - 1.0) / 2.0) * self.pitch
    }

    /// Fractional sample index of a physical coordinate (inverse of [`coord`](Self::coord)).
    #[inline]
    pub fn index_of(&self, x: f64) -> f64 {
        x / self.pitch + (self.n as f64 - 1.0) / 2.0
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self.n != other.n || self.pitch != other.pitch {
            return Err(Error::GridMismatch {
                expected: self.n,
                expected_pitch: self.pitch,
                got: other.n,
                got_pitch: other.pitch,
            });
        }
        Ok(())
    }
}

/// Complex amplitudes sampled row-major on a [`GridSpec`], at longitudinal position `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: GridSpec,
    pub samples: Vec<Complex64>,
    pub z: f64,
}

impl ComplexField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
            z: 0.0,
        }
    }

    pub fn from_samples(grid: GridSpec, samples: Vec<Complex64>, z: f64) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "field has {} samples, grid needs {}",
                samples.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, samples, z })
    }

    /// Builds a field by evaluating `f(x, y)` at every sample.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let mut samples = Vec::with_capacity(grid.len());
        for row in 0..grid.n {
            let y = grid.coord(row);
            for col in 0..grid.n {
                samples.push(f(grid.coord(col), y));
            }
        }
        Self { grid, samples, z: 0.0 }
    }

    /// P = sum |E|^2 * pitch^2.
    pub fn power(&self) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.pitch * self.grid.pitch
    }

    /// Rescales to unit power. Fails on an all-zero or non-finite field.
    pub fn normalize(&mut self) -> Result<()> {
        let p = self.power();
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("cannot normalize field of power {p}")));
        }
        let s = 1.0 / p.sqrt();
        for c in &mut self.samples {
            *c *= s;
        }
        Ok(())
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.samples[row * self.grid.n + col]
    }

    /// Inner product <self, other> = sum conj(self) * other * pitch^2.
    pub fn inner(&self, other: &ComplexField) -> Complex64 {
        let dot: Complex64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a.conj() * b).sum();
        dot * self.grid.pitch * self.grid.pitch
    }

    /// Largest elementwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &ComplexField) -> f64 {
        self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Power-weighted RMS radius about the grid center, sqrt(<x^2 + y^2>).
    pub fn rms_radius(&self) -> f64 {
        let n = self.grid.n;
        let mut num = 0.0;
        let mut den = 0.0;
        for row in 0..n {
            let y = self.grid.coord(row);
            for col in 0..n {
                let x = self.grid.coord(col);
                let w = self.samples[row * n + col].norm_sqr();
                num += w * (x * x + y * y);
                den += w;
            }
        }
        (num / den).sqrt()
    }
}
