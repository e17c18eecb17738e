//! Band-limited angular spectrum propagation with zero padding.
//!
//! The field is embedded in a `pad_factor * n` square, transformed, multiplied by
//! `H = exp(i 2 pi z sqrt(1 - fx^2 - fy^2))` (wavelength = 1) and cropped back.
//! Evanescent bins and bins outside the anti-aliasing limit
//! `f_lim = 1 / sqrt((2 df z)^2 + 1)`, `df = 1 / (N pitch)`, applied per axis,
//! are zeroed. At `z = 0` the operator is the identity.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{self, signed_bin};
use crate::grid::{ComplexField, GridSpec};

pub const DEFAULT_PAD_FACTOR: usize = 2;

/// Immutable free-space propagation operator over a fixed distance.
#[derive(Clone)]
pub struct PropagationOperator {
    pub grid: GridSpec,
    pub distance: f64,
    pub pad_factor: usize,
    padded: usize,
    band_limit: f64,
    transfer: Arc<Vec<Complex64>>,
    plans: fft::Plans,
}

impl std::fmt::Debug for PropagationOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PropagationOperator")
            .field("grid", &self.grid)
            .field("distance", &self.distance)
            .field("pad_factor", &self.pad_factor)
            .field("band_limit", &self.band_limit)
            .finish()
    }
}

type CacheKey = (usize, u64, u64, usize);

fn transfer_cache() -> &'static Mutex<HashMap<CacheKey, (Arc<Vec<Complex64>>, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, (Arc<Vec<Complex64>>, f64)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Rayleigh range `pi w0^2 / lambda` with lambda = 1.
pub fn rayleigh_range(w0: f64) -> f64 {
    PI * w0 * w0
}

impl PropagationOperator {
    pub fn new(grid: GridSpec, distance: f64, pad_factor: usize) -> Result<Self> {
        if !(distance >= 0.0 && distance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "propagation distance must be finite and >= 0 (got {distance}); use the adjoint for backward steps"
            )));
        }
        if pad_factor == 0 || (distance > 0.0 && pad_factor < 2) {
            return Err(Error::InvalidParameter(format!(
                "pad factor {pad_factor} too small (need >= 2 for nonzero distance)"
            )));
        }
        let padded = grid.n * pad_factor;
        let key = (grid.n, grid.pitch.to_bits(), distance.to_bits(), pad_factor);
        let (transfer, band_limit) = {
            let mut cache = transfer_cache().lock().expect("transfer cache poisoned");
            cache.entry(key).or_insert_with(|| build_transfer(grid.pitch, padded, distance)).clone()
        };
        Ok(Self {
            grid,
            distance,
            pad_factor,
            padded,
            band_limit,
            transfer,
            plans: fft::plans(padded),
        })
    }

    /// Operator with the default 2x padding.
    pub fn with_default_padding(grid: GridSpec, distance: f64) -> Result<Self> {
        Self::new(grid, distance, DEFAULT_PAD_FACTOR)
    }

    /// Per-axis spatial-frequency cutoff in cycles per wavelength.
    pub fn band_limit(&self) -> f64 {
        self.band_limit
    }

    /// Transfer function on the padded spectral grid (FFT bin order).
    pub fn transfer(&self) -> &[Complex64] {
        &self.transfer
    }

    pub fn padded_side(&self) -> usize {
        self.padded
    }

    /// Propagates `field` by `+distance`, or applies the exact adjoint
    /// (conjugate transfer, `-distance`) when `adjoint` is set.
    pub fn propagate(&self, field: &ComplexField, adjoint: bool) -> Result<ComplexField> {
        self.grid.ensure_same(&field.grid)?;
        let samples = self.apply(&field.samples, adjoint);
        let dz = if adjoint { -self.distance } else { self.distance };
        Ok(ComplexField {
            grid: field.grid,
            samples,
            z: field.z + dz,
        })
    }

    /// Raw sample-buffer version of [`propagate`](Self::propagate).
    pub fn apply(&self, input: &[Complex64], adjoint: bool) -> Vec<Complex64> {
        let n = self.grid.n;
        if self.distance == 0.0 {
            return input.to_vec();
        }
        let big = self.padded;
        let zero = Complex64::new(0.0, 0.0);
        let fwd = &self.plans.forward;
        let inv = &self.plans.inverse;
        let mut scratch = vec![zero; fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];

        // Row transforms over the n occupied rows only.
        let mut rows = vec![zero; n * big];
        for r in 0..n {
            let row = &mut rows[r * big..(r + 1) * big];
            row[..n].copy_from_slice(&input[r * n..(r + 1) * n]);
            fwd.process_with_scratch(row, &mut scratch);
        }
        // Column transforms, kept in transposed layout: spec[c * big + r].
        let mut spec = vec![zero; big * big];
        for r in 0..n {
            for c in 0..big {
                spec[c * big + r] = rows[r * big + c];
            }
        }
        fwd.process_with_scratch(&mut spec, &mut scratch);

        // H is symmetric under fx <-> fy, so the transposed layout indexes it directly.
        let scale = 1.0 / (big * big) as f64;
        if adjoint {
            for (s, h) in spec.iter_mut().zip(self.transfer.iter()) {
                *s *= h.conj() * scale;
            }
        } else {
            for (s, h) in spec.iter_mut().zip(self.transfer.iter()) {
                *s *= h * scale;
            }
        }

        inv.process_with_scratch(&mut spec, &mut scratch);
        let mut out = Vec::with_capacity(n * n);
        let mut row = vec![zero; big];
        for r in 0..n {
            for c in 0..big {
                row[c] = spec[c * big + r];
            }
            inv.process_with_scratch(&mut row, &mut scratch);
            out.extend_from_slice(&row[..n]);
        }
        out
    }
}

fn build_transfer(pitch: f64, padded: usize, distance: f64) -> (Arc<Vec<Complex64>>, f64) {
    let df = 1.0 / (padded as f64 * pitch);
    let band_limit = 1.0 / ((2.0 * df * distance).powi(2) + 1.0).sqrt();
    let one = Complex64::new(1.0, 0.0);
    let mut h = vec![Complex64::new(0.0, 0.0); padded * padded];
    for r in 0..padded {
        let fy = signed_bin(r, padded) as f64 * df;
        for c in 0..padded {
            let fx = signed_bin(c, padded) as f64 * df;
            h[r * padded + c] = if distance == 0.0 {
                one
            } else {
                let arg = 1.0 - fx * fx - fy * fy;
                if arg < 0.0 || fx.abs() > band_limit || fy.abs() > band_limit {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar(1.0, 2.0 * PI * distance * arg.sqrt())
                }
            };
        }
    }
    (Arc::new(h), band_limit)
}
