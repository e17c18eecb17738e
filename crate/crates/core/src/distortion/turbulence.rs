//! Modified von Karman phase screens and split-step propagation through them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{fft2, signed_bin};
use crate::grid::ComplexField;
use crate::propagation::PropagationOperator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TurbulenceConfig {
    /// Structure-constant strength, used as a dimensionless knob.
    pub cn2: f64,
    pub outer_scale: f64,
    pub inner_scale: f64,
    pub screens: usize,
    /// Total path; `None` means one Rayleigh range of the probe beam.
    pub path: Option<f64>,
}

impl Default for TurbulenceConfig {
    fn default() -> Self {
        Self {
            cn2: 1e-4,
            outer_scale: 1000.0,
            inner_scale: 1.0,
            screens: 5,
            path: None,
        }
    }
}

impl TurbulenceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cn2 >= 0.0) || self.screens == 0 || !(self.inner_scale > 0.0) || !(self.inner_scale < self.outer_scale) {
            return Err(Error::InvalidParameter(format!(
                "turbulence needs cn2 >= 0, at least one screen and 0 < inner scale < outer scale, got {self:?}"
            )));
        }
        if let Some(p) = self.path {
            if !(p > 0.0) {
                return Err(Error::InvalidParameter(format!("path must be positive, got {p}")));
            }
        }
        Ok(())
    }
}

/// Phase power spectral density for a slab of thickness `dz`, in rad^2 per (rad/length)^2.
pub fn phase_psd(cfg: &TurbulenceConfig, dz: f64, kappa: f64) -> f64 {
    let k = 2.0 * PI;
    let km = 5.92 / cfg.inner_scale;
    let k0 = 2.0 * PI / cfg.outer_scale;
    2.0 * PI * k * k * dz * 0.033 * cfg.cn2 * (-(kappa * kappa) / (km * km)).exp() / (kappa * kappa + k0 * k0).powf(11.0 / 6.0)
}

/// One `n x n` screen with sample spacing `dx`: Gaussian white noise shaped
/// by `sqrt(psd)` in the frequency domain, real part, mean removed.
pub fn make_von_karman_screen(cfg: &TurbulenceConfig, n: usize, dx: f64, dz: f64, seed: u64) -> Result<Vec<f64>> {
    cfg.validate()?;
    if cfg.cn2 == 0.0 {
        return Ok(vec![0.0; n * n]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dk = 2.0 * PI / (n as f64 * dx);
    let mut buf: Vec<Complex64> = (0..n * n)
        .map(|i| {
            let (kx, ky) = (signed_bin(i % n, n) as f64 * dk, signed_bin(i / n, n) as f64 * dk);
            let kappa = (kx * kx + ky * ky).sqrt();
            let amp = if kappa == 0.0 { 0.0 } else { phase_psd(cfg, dz, kappa).sqrt() * dk };
            let (a, b): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
            Complex64::new(a, b) * amp
        })
        .collect();
    fft2(&mut buf, n, true);
    let mean = buf.iter().map(|c| c.re).sum::<f64>() / (n * n) as f64;
    Ok(buf.iter().map(|c| c.re - mean).collect())
}

/// Split-step: each of the `screens` segments propagates `path / screens`
/// and then applies a fresh screen.
pub fn propagate_through_turbulence(field: &ComplexField, cfg: &TurbulenceConfig, path: f64, seed: u64) -> Result<ComplexField> {
    cfg.validate()?;
    let dz = path / cfg.screens as f64;
    let hop = PropagationOperator::with_default_padding(field.grid, dz)?;
    let mut current = field.clone();
    for s in 0..cfg.screens {
        current = hop.propagate(&current, false)?;
        if cfg.cn2 > 0.0 {
            let screen = make_von_karman_screen(cfg, field.grid.n, field.grid.pitch, dz, seed.wrapping_add(s as u64))?;
            current
                .samples
                .iter_mut()
                .zip(&screen)
                .for_each(|(e, p)| *e *= Complex64::from_polar(1.0, *p));
        }
    }
    Ok(current)
}

/// Ensemble estimate of `D(r) = <(phi(x + r) - phi(x))^2>` along both axes for lags `1..=max_lag`.
pub fn structure_function(screens: &[Vec<f64>], n: usize, max_lag: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_lag];
    for (li, d) in out.iter_mut().enumerate() {
        let lag = li + 1;
        let mut acc = 0.0;
        let mut count = 0usize;
        for s in screens {
            for r in 0..n {
                for c in 0..n - lag {
                    let a = s[r * n + c + lag] - s[r * n + c];
                    let b = s[(c + lag) * n + r] - s[c * n + r];
                    acc += a * a + b * b;
                    count += 2;
                }
            }
        }
        *d = acc / count as f64;
    }
    out
}
