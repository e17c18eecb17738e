//! The full optoelectronic pipeline: diffractive stack, detector, readout.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::backprop::{backward_deltas, backward_optical, backward_to_detector, head_delta, ElectronicGradients, GradientBundle, HeadGradient};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};
use crate::optics::{ForwardTrace, OpticalStack, DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_HOP, DEFAULT_LAYERS};
use crate::propagation::DEFAULT_PAD_FACTOR;
use crate::readout::{HeadMode, HeadOutput, ReadoutNetwork, ReadoutTrace, DEFAULT_HIDDEN_WIDTH, DEFAULT_TEMPERATURE};
use crate::spectrum::{ComplexSpectrum, OamSpectrum, SpectrumBasis};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub n: usize,
    pub pitch: f64,
    pub layers: usize,
    pub hop: f64,
    pub pad_factor: usize,
    pub alpha: f64,
    pub beta: f64,
    pub hidden: Vec<usize>,
    pub k_n: i32,
    pub k_p: i32,
    pub head: HeadMode,
    pub temperature: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let grid = GridSpec::desk();
        Self {
            n: grid.n,
            pitch: grid.pitch,
            layers: DEFAULT_LAYERS,
            hop: DEFAULT_HOP,
            pad_factor: DEFAULT_PAD_FACTOR,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            hidden: vec![DEFAULT_HIDDEN_WIDTH],
            k_n: -5,
            k_p: 5,
            head: HeadMode::Power,
            temperature: DEFAULT_TEMPERATURE,
        }
    }
}

impl ModelConfig {
    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.n, self.pitch)
    }

    pub fn basis(&self) -> Result<SpectrumBasis> {
        SpectrumBasis::new(self.k_n, self.k_p)
    }
}

/// Everything a backward pass needs from one forward pass.
#[derive(Debug, Clone)]
pub struct ModelTrace {
    pub optical: ForwardTrace,
    pub readout: ReadoutTrace,
    pub z: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct HybridModel {
    pub stack: OpticalStack,
    pub readout: ReadoutNetwork,
}

/// Addresses a single trainable scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamId {
    Theta { layer: usize, index: usize },
    Weight { layer: usize, index: usize },
    Bias { layer: usize, index: usize },
}

impl HybridModel {
    /// Fresh model with `theta = 0` and randomly initialized readout.
    pub fn new(cfg: &ModelConfig, rng: &mut impl Rng) -> Result<Self> {
        let grid = cfg.grid()?;
        let stack = OpticalStack::new(grid, cfg.layers, cfg.hop, cfg.pad_factor, cfg.alpha, cfg.beta)?;
        let gain = grid.len() as f64 * grid.pitch * grid.pitch;
        let readout = ReadoutNetwork::new(grid.len(), &cfg.hidden, cfg.basis()?, cfg.head, cfg.temperature, gain, rng)?;
        Ok(Self { stack, readout })
    }

    pub fn from_parts(stack: OpticalStack, readout: ReadoutNetwork) -> Result<Self> {
        if readout.input_dim() != stack.grid.len() {
            return Err(Error::Dimension(format!(
                "readout takes {} pixels, detector has {}",
                readout.input_dim(),
                stack.grid.len()
            )));
        }
        Ok(Self { stack, readout })
    }

    pub fn grid(&self) -> GridSpec {
        self.stack.grid
    }

    pub fn basis(&self) -> SpectrumBasis {
        self.readout.basis
    }

    pub fn detector(&self, field: &ComplexField) -> Result<Vec<f64>> {
        let (out, _) = self.stack.forward(field, false)?;
        Ok(out.samples.iter().map(|e| e.norm_sqr()).collect())
    }

    pub fn predict_from_detector(&self, detector: &[f64]) -> Result<HeadOutput> {
        let (z, _) = self.readout.forward_readout(detector, false)?;
        self.readout.head_output(&z)
    }

    pub fn predict(&self, field: &ComplexField) -> Result<HeadOutput> {
        self.predict_from_detector(&self.detector(field)?)
    }

    pub fn predict_spectrum(&self, field: &ComplexField) -> Result<OamSpectrum> {
        Ok(OamSpectrum {
            basis: self.basis(),
            weights: self.predict(field)?.weights,
        })
    }

    pub fn predict_complex(&self, field: &ComplexField) -> Result<ComplexSpectrum> {
        self.readout.complex_from_head(&self.predict(field)?)
    }

    pub fn forward_trace(&self, field: &ComplexField) -> Result<(HeadOutput, ModelTrace)> {
        let (_, optical) = self.stack.forward(field, true)?;
        let optical = optical.ok_or(Error::MissingTrace("optical"))?;
        let (z, readout) = self.readout.forward_readout(&optical.detector.data, true)?;
        let readout = readout.ok_or(Error::MissingTrace("readout"))?;
        let head = self.readout.head_output(&z)?;
        Ok((head, ModelTrace { optical, readout, z }))
    }

    /// Error chain and optical gradients only; weight gradients are left empty
    /// so callers can form them as one batched product.
    pub fn backward_partial(&self, trace: &ModelTrace, grad: &HeadGradient) -> Result<GradientBundle> {
        let deltas = backward_deltas(&self.readout, &trace.readout, head_delta(&self.readout, &trace.z, grad)?)?;
        let d_detector = backward_to_detector(&self.readout, &deltas[0])?;
        let optical = backward_optical(&self.stack, Some(&trace.optical), &d_detector)?;
        Ok(GradientBundle {
            electronic: ElectronicGradients {
                deltas,
                d_weights: Vec::new(),
                d_bias: Vec::new(),
            },
            d_detector,
            optical,
        })
    }

    /// Full per-sample gradient bundle.
    pub fn backward(&self, trace: &ModelTrace, grad: &HeadGradient) -> Result<GradientBundle> {
        let mut bundle = self.backward_partial(trace, grad)?;
        let e = &mut bundle.electronic;
        e.d_weights = e
            .deltas
            .iter()
            .zip(&trace.readout.act)
            .map(|(d, a)| d.iter().flat_map(|di| a.iter().map(move |aj| di * aj)).collect())
            .collect();
        e.d_bias = e.deltas.clone();
        Ok(bundle)
    }

    /// `||theta||^2 + ||W||^2 + ||B||^2`.
    pub fn squared_norm(&self) -> f64 {
        let optical: f64 = self.stack.layers.iter().flat_map(|l| &l.theta).map(|t| t * t).sum();
        let electronic: f64 = self
            .readout
            .layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.bias))
            .map(|w| w * w)
            .sum();
        optical + electronic
    }

    pub fn parameter_count(&self) -> usize {
        self.stack.layers.iter().map(|l| l.theta.len()).sum::<usize>() + self.readout.parameter_count()
    }

    pub fn param(&self, id: ParamId) -> f64 {
        match id {
            ParamId::Theta { layer, index } => self.stack.layers[layer].theta[index],
            ParamId::Weight { layer, index } => self.readout.layers[layer].weights[index],
            ParamId::Bias { layer, index } => self.readout.layers[layer].bias[index],
        }
    }

    pub fn param_mut(&mut self, id: ParamId) -> &mut f64 {
        match id {
            ParamId::Theta { layer, index } => &mut self.stack.layers[layer].theta[index],
            ParamId::Weight { layer, index } => &mut self.readout.layers[layer].weights[index],
            ParamId::Bias { layer, index } => &mut self.readout.layers[layer].bias[index],
        }
    }

    /// Uniformly random parameter address.
    pub fn random_param(&self, rng: &mut impl Rng) -> ParamId {
        let mut k = rng.random_range(0..self.parameter_count());
        for (layer, l) in self.stack.layers.iter().enumerate() {
            if k < l.theta.len() {
                return ParamId::Theta { layer, index: k };
            }
            k -= l.theta.len();
        }
        for (layer, l) in self.readout.layers.iter().enumerate() {
            if k < l.weights.len() {
                return ParamId::Weight { layer, index: k };
            }
            k -= l.weights.len();
            if k < l.bias.len() {
                return ParamId::Bias { layer, index: k };
            }
            k -= l.bias.len();
        }
        unreachable!("index within parameter count")
    }
}

impl GradientBundle {
    /// Data-loss gradient of one scalar parameter.
    pub fn get(&self, id: ParamId) -> f64 {
        match id {
            ParamId::Theta { layer, index } => self.optical.d_theta[layer][index],
            ParamId::Weight { layer, index } => self.electronic.d_weights[layer][index],
            ParamId::Bias { layer, index } => self.electronic.d_bias[layer][index],
        }
    }
}
