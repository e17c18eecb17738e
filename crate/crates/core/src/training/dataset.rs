//! Simulated multiplexed-mode datasets.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};
use crate::modes::{default_waist, oam_decompose, synthesize};
use crate::spectrum::{ComplexSpectrum, SpectrumBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn name(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetConfig {
    /// Distinct weight vectors in the training split.
    pub spectra: usize,
    /// Intermodal phase draws per training weight vector.
    pub phases_per_weight: usize,
    pub val: usize,
    pub test: usize,
    /// Extra training samples with a uniform spectrum and random phases.
    pub uniform_augment: usize,
    /// Beam waist; `None` means the grid default.
    pub waist: Option<f64>,
    /// Number of samples whose label is re-derived by decomposition.
    pub verify: usize,
    pub seed: u64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self::desk()
    }
}

impl DatasetConfig {
    pub fn paper() -> Self {
        Self {
            spectra: 500,
            phases_per_weight: 50,
            val: 5000,
            test: 5000,
            uniform_augment: 2000,
            waist: None,
            verify: 32,
            seed: 0,
        }
    }

    pub fn desk() -> Self {
        Self {
            spectra: 200,
            phases_per_weight: 10,
            val: 1000,
            test: 1000,
            uniform_augment: 0,
            waist: None,
            verify: 32,
            seed: 0,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper" => Ok(Self::paper()),
            "desk" => Ok(Self::desk()),
            other => Err(Error::InvalidParameter(format!("unknown dataset preset '{other}'"))),
        }
    }

    pub fn train_len(&self) -> usize {
        self.spectra * self.phases_per_weight + self.uniform_augment
    }
}

#[derive(Debug, Clone)]
pub struct Sample {
    pub field: ComplexField,
    pub label: ComplexSpectrum,
    pub split: Split,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub grid: GridSpec,
    pub basis: SpectrumBasis,
    pub waist: f64,
    pub seed: u64,
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn split(&self, split: Split) -> Vec<&Sample> {
        self.samples.iter().filter(|s| s.split == split).collect()
    }
}

/// `|N(0,1)|` per component, normalized to sum 1; all-zero draws are redrawn.
pub fn draw_weights(basis: &SpectrumBasis, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..basis.count()).map(|_| StandardNormal.sample(rng)).map(|v: f64| v.abs()).collect();
        let s: f64 = w.iter().sum();
        if s > 0.0 {
            return w.into_iter().map(|v| v / s).collect();
        }
    }
}

pub fn draw_phases(basis: &SpectrumBasis, rng: &mut impl Rng) -> Vec<f64> {
    (0..basis.count()).map(|_| rng.random_range(-PI..PI)).collect()
}

pub fn label_from(basis: SpectrumBasis, weights: &[f64], phases: Vec<f64>) -> Result<ComplexSpectrum> {
    ComplexSpectrum::new(basis, weights.iter().map(|w| w.sqrt()).collect(), phases)
}

/// Draws all labels first from one seeded stream, then synthesizes in parallel.
pub fn generate_dataset(cfg: &DatasetConfig, grid: GridSpec, basis: SpectrumBasis) -> Result<Dataset> {
    if cfg.spectra == 0 || cfg.phases_per_weight == 0 {
        return Err(Error::InvalidParameter(
            "training split needs at least one spectrum and one phase draw".into(),
        ));
    }
    let waist = cfg.waist.unwrap_or_else(|| default_waist(&grid));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut labels = Vec::with_capacity(cfg.train_len() + cfg.val + cfg.test);
    for _ in 0..cfg.spectra {
        let w = draw_weights(&basis, &mut rng);
        for _ in 0..cfg.phases_per_weight {
            labels.push((label_from(basis, &w, draw_phases(&basis, &mut rng))?, Split::Train));
        }
    }
    let uniform = vec![1.0 / basis.count() as f64; basis.count()];
    for _ in 0..cfg.uniform_augment {
        labels.push((label_from(basis, &uniform, draw_phases(&basis, &mut rng))?, Split::Train));
    }
    for (split, count) in [(Split::Val, cfg.val), (Split::Test, cfg.test)] {
        for _ in 0..count {
            let w = draw_weights(&basis, &mut rng);
            labels.push((label_from(basis, &w, draw_phases(&basis, &mut rng))?, split));
        }
    }
    let samples = labels
        .into_par_iter()
        .map(|(label, split)| {
            Ok(Sample {
                field: synthesize(&label, waist, grid)?,
                label,
                split,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ds = Dataset {
        grid,
        basis,
        waist,
        seed: cfg.seed,
        samples,
    };
    verify_labels(&ds, cfg.verify, cfg.seed)?;
    Ok(ds)
}

/// Re-derives `count` seeded-random labels by decomposition; errors on any
/// weight differing by more than `1e-6`.
pub fn verify_labels(ds: &Dataset, count: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let picks: Vec<usize> = (0..count.min(ds.samples.len())).map(|_| rng.random_range(0..ds.samples.len())).collect();
    picks.into_par_iter().try_for_each(|i| {
        let s = &ds.samples[i];
        let d = oam_decompose(&s.field, ds.basis)?;
        let want = s.label.power_spectrum().weights;
        let worst = d.power.weights.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if worst > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "sample {i}: label differs from decomposition by {worst:e}"
            )));
        }
        Ok(())
    })
}

/// Single modes, equal-weight pairs and random multiplexed modes, for
/// comparing models across regimes.
pub fn mixed_probe_set(grid: GridSpec, basis: SpectrumBasis, waist: f64, random: usize, seed: u64) -> Result<Vec<Sample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = basis.count();
    let mut labels = Vec::new();
    for i in 0..k {
        let mut w = vec![0.0; k];
        w[i] = 1.0;
        labels.push(label_from(basis, &w, vec![0.0; k])?);
    }
    for _ in 0..k {
        let a = rng.random_range(0..k);
        let b = (a + rng.random_range(1..k)) % k;
        let mut w = vec![0.0; k];
        w[a] = 0.5;
        w[b] = 0.5;
        labels.push(label_from(basis, &w, draw_phases(&basis, &mut rng))?);
    }
    for _ in 0..random {
        let w = draw_weights(&basis, &mut rng);
        labels.push(label_from(basis, &w, draw_phases(&basis, &mut rng))?);
    }
    labels
        .into_par_iter()
        .map(|label| {
            Ok(Sample {
                field: synthesize(&label, waist, grid)?,
                label,
                split: Split::Test,
            })
        })
        .collect()
}
