//! Vortex-superposition synthesis and the azimuthal OAM decomposition oracle.
//!
//! Each charge `l` carries the ring profile
//! `R_l(rho) = N_l (sqrt(2) rho / w0)^|l| exp(-rho^2 / w0^2)` with unit power,
//! so a normalized complex spectrum maps onto a unit-power field whose
//! decomposed weights are exactly `a_l^2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};
use crate::interp::FourierSampler;
use crate::spectrum::{ComplexSpectrum, OamSpectrum, SpectrumBasis, NORM_TOL};

/// Default waist as a fraction of the aperture side.
pub const DEFAULT_WAIST_FRACTION: f64 = 0.125;

/// Captured-power fraction below which decomposition logs a warning.
pub const CAPTURE_WARN_EPS: f64 = 1e-3;

/// Relative power below which a charge is dropped from the decomposed complex spectrum.
pub const COMPLEX_FLOOR: f64 = 1e-9;

pub fn default_waist(grid: &GridSpec) -> f64 {
    DEFAULT_WAIST_FRACTION * grid.aperture()
}

fn ln_factorial(k: u32) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Unit-power radial profile of charge `l` at radius `rho`.
pub fn ring_profile(charge: i32, w0: f64, rho: f64) -> f64 {
    let m = charge.unsigned_abs();
    let log_norm = 0.5 * ((2.0 / (PI * w0 * w0)).ln() - ln_factorial(m));
    let t = 2f64.sqrt() * rho / w0;
    let poly = if m == 0 { 1.0 } else { t.powi(m as i32) };
    log_norm.exp() * poly * (-(rho * rho) / (w0 * w0)).exp()
}

pub fn check_waist(grid: &GridSpec, w0: f64) -> Result<()> {
    if !(w0 > 0.0 && w0.is_finite()) {
        return Err(Error::InvalidParameter(format!("beam waist must be positive, got {w0}")));
    }
    if 4.0 * w0 > grid.aperture() {
        return Err(Error::Pupil {
            span: 4.0 * w0,
            aperture: grid.aperture(),
        });
    }
    Ok(())
}

/// Superposes the spectrum's vortex modes on `grid`; output has unit power.
pub fn synthesize(spec: &ComplexSpectrum, w0: f64, grid: GridSpec) -> Result<ComplexField> {
    check_waist(&grid, w0)?;
    let norm: f64 = spec.amplitudes.iter().map(|a| a * a).sum();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Unnormalized(norm));
    }
    let active: Vec<(i32, Complex64)> = (0..spec.basis.count())
        .filter(|&i| spec.amplitudes[i] > 0.0)
        .map(|i| (spec.basis.charge(i), spec.coefficient(i)))
        .collect();
    let mut field = ComplexField::from_fn(grid, |x, y| {
        let rho = x.hypot(y);
        let theta = y.atan2(x);
        active
            .iter()
            .map(|&(l, c)| c * ring_profile(l, w0, rho) * Complex64::from_polar(1.0, l as f64 * theta))
            .sum()
    });
    field.normalize()?;
    Ok(field)
}

/// Result of projecting a field onto the angular harmonics of a basis.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub complex: ComplexSpectrum,
    pub power: OamSpectrum,
    /// Un-normalized power per charge.
    pub raw_power: Vec<f64>,
    /// Fraction of the in-disk power carried by the basis charges.
    pub captured_fraction: f64,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; order];
    let mut w = vec![0.0; order];
    let nf = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..order {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[order - 1 - i] = wi;
    }
    (x, w)
}

/// Azimuthal decomposition by ring quadrature.
///
/// On each ring the trigonometric interpolant of the samples is evaluated at
/// enough equispaced angles to avoid aliasing, `c_l(rho)` follows from a DFT
/// along the ring, and `P_l = pi * int |c_l(sqrt u)|^2 du` over `u = rho^2` in
/// `[0, (n pitch / 2)^2]` is integrated by Gauss-Legendre (smooth in `u`).
pub fn oam_decompose(field: &ComplexField, basis: SpectrumBasis) -> Result<Decomposition> {
    let total = field.power();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::InvalidParameter(format!("cannot decompose a field of power {total}")));
    }
    let grid = field.grid;
    let r_max = grid.n as f64 * grid.pitch / 2.0;
    let order = (grid.n / 2 + 16).max(64);
    let (nodes, gw) = gauss_legendre(order);
    let k = basis.count();
    let kmax = basis.max_abs_charge() as f64;

    struct Ring {
        coeffs: Vec<Complex64>,
        mean_intensity: f64,
        weight: f64,
    }

    let rings: Vec<Ring> = nodes
        .par_iter()
        .zip(gw.par_iter())
        .map(|(&t, &w)| {
            let u = 0.5 * (t + 1.0) * r_max * r_max;
            let rho = u.sqrt();
            let harmonics = PI * 2f64.sqrt() * rho / grid.pitch + kmax;
            let n_theta = (2 * (harmonics.ceil() as usize) + 16).max(grid.n);
            let mut sampler = FourierSampler::new(field);
            let samples: Vec<Complex64> = (0..n_theta)
                .map(|i| {
                    let th = 2.0 * PI * i as f64 / n_theta as f64;
                    sampler.eval_periodic(grid.index_of(rho * th.cos()), grid.index_of(rho * th.sin()))
                })
                .collect();
            let mean_intensity = samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / n_theta as f64;
            let coeffs = basis
                .charges()
                .map(|l| {
                    let acc: Complex64 = samples
                        .iter()
                        .enumerate()
                        .map(|(i, s)| s * Complex64::from_polar(1.0, -(l as f64) * 2.0 * PI * i as f64 / n_theta as f64))
                        .sum();
                    acc / n_theta as f64
                })
                .collect();
            // du = r_max^2 / 2 dt on the mapped interval.
            Ring {
                coeffs,
                mean_intensity,
                weight: w * 0.5 * r_max * r_max,
            }
        })
        .collect();

    let mut raw_power = vec![0.0; k];
    let mut phase_acc = vec![Complex64::new(0.0, 0.0); k];
    let mut disk_power = 0.0;
    for ring in &rings {
        disk_power += PI * ring.weight * ring.mean_intensity;
        for (i, c) in ring.coeffs.iter().enumerate() {
            raw_power[i] += PI * ring.weight * c.norm_sqr();
            phase_acc[i] += c * c.norm() * ring.weight;
        }
    }
    let basis_power: f64 = raw_power.iter().sum();
    if !(basis_power > 0.0) {
        return Err(Error::InvalidParameter("field carries no power in the basis".into()));
    }
    let captured_fraction = basis_power / disk_power;
    if captured_fraction < 1.0 - CAPTURE_WARN_EPS {
        log::warn!(
            "basis [{}, {}] captures only {:.6} of the field power",
            basis.k_n,
            basis.k_p,
            captured_fraction
        );
    }
    let power = OamSpectrum::from_unnormalized(basis, raw_power.clone())?;
    // Quadrature leakage is not a component: it must not become the phase reference.
    let amplitudes: Vec<f64> = power.weights.iter().map(|&w| if w < COMPLEX_FLOOR { 0.0 } else { w.sqrt() }).collect();
    let phases: Vec<f64> = phase_acc.iter().map(|c| c.arg()).collect();
    let norm: f64 = amplitudes.iter().map(|a| a * a).sum();
    let amplitudes = amplitudes.into_iter().map(|a| a / norm.sqrt()).collect();
    let complex = ComplexSpectrum::new(basis, amplitudes, phases)?;
    Ok(Decomposition {
        complex,
        power,
        raw_power,
        captured_fraction,
    })
}
