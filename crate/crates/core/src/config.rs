//! Run configuration: one JSON document, every field optional with a default.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distortion::SweepConfig;
use crate::error::Result;
use crate::grid::GridSpec;
use crate::model::ModelConfig;
use crate::optics::{DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_HOP, DEFAULT_LAYERS};
use crate::propagation::DEFAULT_PAD_FACTOR;
use crate::readout::{HeadMode, DEFAULT_HIDDEN_WIDTH, DEFAULT_TEMPERATURE};
use crate::training::{DatasetConfig, TrainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    pub pitch: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = GridSpec::desk();
        Self { n: g.n, pitch: g.pitch }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StackSection {
    pub layers: usize,
    pub hop: f64,
    pub pad_factor: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for StackSection {
    fn default() -> Self {
        Self {
            layers: DEFAULT_LAYERS,
            hop: DEFAULT_HOP,
            pad_factor: DEFAULT_PAD_FACTOR,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReadoutSection {
    pub hidden: Vec<usize>,
    pub k_n: i32,
    pub k_p: i32,
    pub head: HeadMode,
    pub temperature: f64,
}

impl Default for ReadoutSection {
    fn default() -> Self {
        Self {
            hidden: vec![DEFAULT_HIDDEN_WIDTH],
            k_n: -5,
            k_p: 5,
            head: HeadMode::Power,
            temperature: DEFAULT_TEMPERATURE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterpretSection {
    pub window: usize,
    /// Defaults to the window side.
    pub stride: Option<usize>,
    pub probes: usize,
    pub rule: crate::interpret::VoteRule,
    /// Pixel budgets evaluated by the reduced-readout benchmark.
    pub budgets: Vec<f64>,
    pub seed: u64,
}

impl Default for InterpretSection {
    fn default() -> Self {
        Self {
            window: crate::interpret::DEFAULT_WINDOW,
            stride: None,
            probes: crate::interpret::DEFAULT_PROBES,
            rule: crate::interpret::VoteRule::default(),
            budgets: vec![0.04, 0.1, 0.2, 0.5, 1.0],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridSection,
    pub stack: StackSection,
    pub readout: ReadoutSection,
    pub dataset: DatasetConfig,
    pub training: TrainConfig,
    pub distortion: SweepConfig,
    pub interpretation: InterpretSection,
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }

    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            n: self.grid.n,
            pitch: self.grid.pitch,
            layers: self.stack.layers,
            hop: self.stack.hop,
            pad_factor: self.stack.pad_factor,
            alpha: self.stack.alpha,
            beta: self.stack.beta,
            hidden: self.readout.hidden.clone(),
            k_n: self.readout.k_n,
            k_p: self.readout.k_p,
            head: self.readout.head,
            temperature: self.readout.temperature,
        }
    }

    /// Full-scale geometry and dataset recipe.
    pub fn paper() -> Self {
        let g = GridSpec::paper();
        Self {
            grid: GridSection { n: g.n, pitch: g.pitch },
            readout: ReadoutSection {
                k_n: -10,
                k_p: 10,
                ..ReadoutSection::default()
            },
            dataset: DatasetConfig::paper(),
            training: TrainConfig {
                batch_size: 300,
                ..TrainConfig::default()
            },
            ..Self::default()
        }
    }
}
