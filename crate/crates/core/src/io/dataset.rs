//! Dataset directories: `dataset.json` plus one field file per sample under `fields/`.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{read_field, write_field};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::spectrum::{ComplexSpectrum, SpectrumBasis};
use crate::training::dataset::{Dataset, DatasetConfig, Sample, Split};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub file: String,
    pub split: Split,
    pub weights: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub grid: GridSpec,
    pub basis: SpectrumBasis,
    pub waist: f64,
    pub seed: u64,
    pub config: DatasetConfig,
    pub samples: Vec<SampleRecord>,
}

pub fn save_dataset(dir: impl AsRef<Path>, ds: &Dataset, cfg: &DatasetConfig) -> Result<DatasetManifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir.join("fields"))?;
    let mut counters = [0usize; 3];
    let names: Vec<String> = ds
        .samples
        .iter()
        .map(|s| {
            let slot = &mut counters[s.split as usize];
            let name = format!("fields/{}_{:06}.oamf", s.split.name(), *slot);
            *slot += 1;
            name
        })
        .collect();
    ds.samples
        .par_iter()
        .zip(&names)
        .try_for_each(|(s, name)| write_field(dir.join(name), &s.field))?;
    let samples = ds
        .samples
        .iter()
        .zip(names)
        .map(|(s, file)| SampleRecord {
            file,
            split: s.split,
            weights: s.label.power_spectrum().weights,
            amplitudes: s.label.amplitudes.clone(),
            phases: s.label.phases.clone(),
        })
        .collect();
    let manifest = DatasetManifest {
        grid: ds.grid,
        basis: ds.basis,
        waist: ds.waist,
        seed: ds.seed,
        config: cfg.clone(),
        samples,
    };
    fs::write(dir.join("dataset.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let manifest: DatasetManifest = serde_json::from_slice(&fs::read(dir.join("dataset.json"))?)?;
    let samples = manifest
        .samples
        .par_iter()
        .map(|r| {
            let field = read_field(dir.join(&r.file))?;
            manifest.grid.ensure_same(&field.grid)?;
            let label = ComplexSpectrum::new(manifest.basis, r.amplitudes.clone(), r.phases.clone())?;
            Ok(Sample {
                field,
                label,
                split: r.split,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if samples.is_empty() {
        return Err(Error::Format("dataset has no samples".into()));
    }
    Ok(Dataset {
        grid: manifest.grid,
        basis: manifest.basis,
        waist: manifest.waist,
        seed: manifest.seed,
        samples,
    })
}
