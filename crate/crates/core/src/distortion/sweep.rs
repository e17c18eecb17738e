//! Robustness protocol: distort probe beams, compare the model output with the
//! decomposed spectrum of the beam before and after the distortion.

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometric::{apply_angular_shift, apply_longitudinal_shift, apply_rotation, apply_transverse_shift};
use super::turbulence::{propagate_through_turbulence, TurbulenceConfig};
use crate::error::{Error, Result};
use crate::grid::ComplexField;
use crate::interp::Interpolation;
use crate::loss::mse;
use crate::model::HybridModel;
use crate::modes::{oam_decompose, synthesize};
use crate::propagation::rayleigh_range;
use crate::spectrum::{ComplexSpectrum, SpectrumBasis};
use crate::training::dataset::{draw_phases, draw_weights, label_from};
use crate::training::trainer::logspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistortionKind {
    /// Transverse rotation, radians.
    Tr,
    /// Transverse shift along x, beam waists.
    Ts,
    /// Angular shift (tilt), radians.
    As,
    /// Longitudinal shift, Rayleigh ranges.
    Ls,
    /// Atmospheric turbulence, structure constant.
    At,
}

impl FromStr for DistortionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tr" => Ok(Self::Tr),
            "ts" => Ok(Self::Ts),
            "as" => Ok(Self::As),
            "ls" => Ok(Self::Ls),
            "at" => Ok(Self::At),
            other => Err(Error::InvalidParameter(format!("unknown distortion kind '{other}'"))),
        }
    }
}

impl DistortionKind {
    pub fn code(&self) -> &'static str {
        match self {
            Self::Tr => "tr",
            Self::Ts => "ts",
            Self::As => "as",
            Self::Ls => "ls",
            Self::At => "at",
        }
    }

    /// Default sweep grids over the ranges studied for each effect.
    pub fn default_magnitudes(&self) -> Vec<f64> {
        let lin = |lo: f64, hi: f64, n: usize| (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect::<Vec<_>>();
        match self {
            Self::Tr => lin(-std::f64::consts::PI, std::f64::consts::PI, 17),
            Self::Ts => lin(-1.0, 1.0, 21),
            Self::As => lin(-9.6e-3, 9.6e-3, 17),
            Self::Ls => lin(0.0, 1.0, 11),
            Self::At => {
                let mut v = vec![0.0];
                v.extend(logspace(10f64.powf(-4.5), 1e-3, 7));
                v
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub interpolation: Interpolation,
    /// Random multiplexed probes for rotation sweeps.
    pub rotation_probes: usize,
    /// Turbulence realizations per probe and magnitude.
    pub turbulence_seeds: usize,
    pub turbulence: TurbulenceConfig,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            interpolation: Interpolation::Fourier,
            rotation_probes: 20,
            turbulence_seeds: 4,
            turbulence: TurbulenceConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub magnitude: f64,
    pub mse_vs_before: f64,
    pub mse_vs_after: f64,
    pub mse_after_vs_before: f64,
    /// Output-vs-before MSE per probe.
    pub per_probe: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub kind: DistortionKind,
    pub points: Vec<SweepPoint>,
}

/// Applies one distortion of the given kind and magnitude.
pub fn distort(field: &ComplexField, kind: DistortionKind, magnitude: f64, waist: f64, cfg: &SweepConfig, seed: u64) -> Result<ComplexField> {
    match kind {
        DistortionKind::Tr => Ok(apply_rotation(field, magnitude, cfg.interpolation)),
        DistortionKind::Ts => apply_transverse_shift(field, magnitude, waist, cfg.interpolation),
        DistortionKind::As => apply_angular_shift(field, magnitude),
        DistortionKind::Ls => apply_longitudinal_shift(field, magnitude, waist),
        DistortionKind::At => {
            if magnitude == 0.0 {
                return Ok(field.clone());
            }
            let tc = TurbulenceConfig {
                cn2: magnitude,
                ..cfg.turbulence.clone()
            };
            let path = cfg.turbulence.path.unwrap_or_else(|| rayleigh_range(waist));
            // The undistorted reference has not travelled, so undo the free-space part.
            let out = propagate_through_turbulence(field, &tc, path, seed)?;
            crate::propagation::PropagationOperator::with_default_padding(field.grid, path)?.propagate(&out, true)
        }
    }
}

/// Probe beams: every single mode, or seeded random multiplexed modes for rotation.
pub fn probe_labels(kind: DistortionKind, basis: SpectrumBasis, cfg: &SweepConfig) -> Result<Vec<ComplexSpectrum>> {
    let k = basis.count();
    if kind == DistortionKind::Tr {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        return (0..cfg.rotation_probes)
            .map(|_| {
                let w = draw_weights(&basis, &mut rng);
                label_from(basis, &w, draw_phases(&basis, &mut rng))
            })
            .collect();
    }
    (0..k)
        .map(|i| {
            let mut w = vec![0.0; k];
            w[i] = 1.0;
            label_from(basis, &w, vec![0.0; k])
        })
        .collect()
}

pub fn robustness_sweep(model: &HybridModel, kind: DistortionKind, magnitudes: &[f64], waist: f64, cfg: &SweepConfig) -> Result<RobustnessReport> {
    let basis = model.basis();
    let grid = model.grid();
    let probes = probe_labels(kind, basis, cfg)?;
    let fields = probes.par_iter().map(|l| synthesize(l, waist, grid)).collect::<Result<Vec<_>>>()?;
    let before = fields
        .par_iter()
        .map(|f| Ok(oam_decompose(f, basis)?.power.weights))
        .collect::<Result<Vec<_>>>()?;
    let seeds = if kind == DistortionKind::At { cfg.turbulence_seeds.max(1) } else { 1 };
    let mut points = Vec::with_capacity(magnitudes.len());
    for (mi, &m) in magnitudes.iter().enumerate() {
        let jobs: Vec<(usize, usize)> = (0..fields.len()).flat_map(|p| (0..seeds).map(move |s| (p, s))).collect();
        let rows = jobs
            .par_iter()
            .map(|&(p, s)| {
                let seed = cfg.seed.wrapping_add(((mi * fields.len() + p) * seeds + s) as u64 * 1000);
                let distorted = distort(&fields[p], kind, m, waist, cfg, seed)?;
                let after = if m == 0.0 {
                    before[p].clone()
                } else {
                    oam_decompose(&distorted, basis)?.power.weights
                };
                let out = model.predict(&distorted)?.weights;
                Ok((mse(&out, &before[p])?, mse(&out, &after)?, mse(&after, &before[p])?))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = rows.len() as f64;
        let per_probe = (0..fields.len())
            .map(|p| rows[p * seeds..(p + 1) * seeds].iter().map(|r| r.0).sum::<f64>() / seeds as f64)
            .collect();
        points.push(SweepPoint {
            magnitude: m,
            mse_vs_before: rows.iter().map(|r| r.0).sum::<f64>() / n,
            mse_vs_after: rows.iter().map(|r| r.1).sum::<f64>() / n,
            mse_after_vs_before: rows.iter().map(|r| r.2).sum::<f64>() / n,
            per_probe,
        });
    }
    Ok(RobustnessReport { kind, points })
}
