//! Rotation, misalignment and defocus of an incoming beam.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::ComplexField;
use crate::interp::{sample, Interpolation};
use crate::propagation::{rayleigh_range, PropagationOperator};

/// Resamples `field` so the output at `(x, y)` is the input at `src(x, y)`.
fn resample(field: &ComplexField, scheme: Interpolation, src: impl Fn(f64, f64) -> (f64, f64) + Sync) -> ComplexField {
    let g = field.grid;
    let samples: Vec<Complex64> = (0..g.n)
        .into_par_iter()
        .flat_map_iter(|row| {
            let points: Vec<(f64, f64)> = (0..g.n)
                .map(|col| {
                    let (x, y) = src(g.coord(col), g.coord(row));
                    (g.index_of(x), g.index_of(y))
                })
                .collect();
            sample(field, &points, scheme)
        })
        .collect();
    ComplexField {
        grid: g,
        samples,
        z: field.z,
    }
}

/// Rotates the transverse pattern by `angle` (counter-clockwise) about the
/// grid centre. Samples that come from outside the grid are zero.
pub fn apply_rotation(field: &ComplexField, angle: f64, scheme: Interpolation) -> ComplexField {
    if angle == 0.0 {
        return field.clone();
    }
    let (s, c) = angle.sin_cos();
    resample(field, scheme, move |x, y| (c * x + s * y, -s * x + c * y))
}

/// Shifts along x by `dx` beam waists.
pub fn apply_transverse_shift(field: &ComplexField, dx: f64, waist: f64, scheme: Interpolation) -> Result<ComplexField> {
    let shift = dx * waist;
    if shift.abs() >= field.grid.aperture() / 4.0 {
        return Err(Error::InvalidParameter(format!(
            "shift of {shift} exceeds a quarter of the aperture {}",
            field.grid.aperture()
        )));
    }
    if shift == 0.0 {
        return Ok(field.clone());
    }
    Ok(resample(field, scheme, move |x, y| (x - shift, y)))
}

/// Tilts the wavefront by `gamma` radians in the x-z plane.
pub fn apply_angular_shift(field: &ComplexField, gamma: f64) -> Result<ComplexField> {
    let fx = gamma.sin();
    // Keep the carrier well inside the sampled band.
    if fx.abs() > 0.25 / field.grid.pitch {
        return Err(Error::InvalidParameter(format!("tilt {gamma} rad leaves the sampled band")));
    }
    if gamma == 0.0 {
        return Ok(field.clone());
    }
    let g = field.grid;
    let samples = field
        .samples
        .iter()
        .enumerate()
        .map(|(i, e)| e * Complex64::from_polar(1.0, 2.0 * PI * fx * g.coord(i % g.n)))
        .collect();
    Ok(ComplexField {
        grid: g,
        samples,
        z: field.z,
    })
}

/// Free-space propagation by `dz` Rayleigh ranges of a beam with waist `waist`.
pub fn apply_longitudinal_shift(field: &ComplexField, dz: f64, waist: f64) -> Result<ComplexField> {
    if dz < 0.0 {
        return Err(Error::InvalidParameter(format!("longitudinal shift must be non-negative, got {dz}")));
    }
    if dz == 0.0 {
        return Ok(field.clone());
    }
    PropagationOperator::with_default_padding(field.grid, dz * rayleigh_range(waist))?.propagate(field, false)
}
