//! The electronic half: fully connected layers with ReLU between them and a
//! temperature softmax on the spectrum head. In complex mode the last layer
//! also emits a `(cos, sin)` pair per charge for the intermodal phase.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{wrap_phase, ComplexSpectrum, OamSpectrum, SpectrumBasis};

/// `10^-1.2`
pub const DEFAULT_TEMPERATURE: f64 = 0.063_095_734_448_019_33;
pub const DEFAULT_HIDDEN_WIDTH: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum HeadMode {
    #[default]
    Power,
    Complex,
}

impl HeadMode {
    pub fn output_width(&self, basis: &SpectrumBasis) -> usize {
        match self {
            HeadMode::Power => basis.count(),
            HeadMode::Complex => 3 * basis.count(),
        }
    }
}

/// `z = W a + b` with `W` stored row-major, `outputs x inputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    fn init(inputs: usize, outputs: usize, std: f64, rng: &mut impl Rng) -> Self {
        let normal = Normal::new(0.0, std).expect("finite std");
        let weights = (0..inputs * outputs).map(|_| normal.sample(rng)).collect();
        Self {
            inputs,
            outputs,
            weights,
            bias: vec![0.0; outputs],
        }
    }

    pub fn forward(&self, a: &[f64]) -> Vec<f64> {
        self.weights
            .chunks_exact(self.inputs)
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(a).map(|(w, x)| w * x).sum::<f64>() + b)
            .collect()
    }
}

#[inline]
pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// ReLU subgradient; 0 at the origin.
#[inline]
pub fn relu_slope(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// `exp(z_i / T) / sum_k exp(z_k / T)` with max subtraction.
pub fn temperature_softmax(z: &[f64], temperature: f64) -> Result<Vec<f64>> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidParameter(format!("temperature must be positive, got {temperature}")));
    }
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| ((v - max) / temperature).exp()).collect();
    let s: f64 = e.iter().sum();
    Ok(e.into_iter().map(|v| v / s).collect())
}

/// Activations of one readout pass; `pre[q]` is `z_q` and `act[q]` is the input to layer q.
#[derive(Debug, Clone)]
pub struct ReadoutTrace {
    pub act: Vec<Vec<f64>>,
    pub pre: Vec<Vec<f64>>,
}

/// Head outputs after the final nonlinearity.
#[derive(Debug, Clone)]
pub struct HeadOutput {
    /// Softmax spectrum.
    pub weights: Vec<f64>,
    /// Raw phase angles `atan2(v, u)` per charge (complex mode only).
    pub raw_phases: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutNetwork {
    pub layers: Vec<DenseLayer>,
    pub temperature: f64,
    pub head: HeadMode,
    pub basis: SpectrumBasis,
    /// Fixed scale applied to the detector image before the first layer.
    pub input_gain: f64,
}

impl ReadoutNetwork {
    /// Random network: He-normal hidden layers and a head scaled by the
    /// temperature, so the initial softmax is close to uniform.
    pub fn new(
        inputs: usize,
        hidden: &[usize],
        basis: SpectrumBasis,
        head: HeadMode,
        temperature: f64,
        input_gain: f64,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        if !(temperature > 0.0) {
            return Err(Error::InvalidParameter(format!("temperature must be positive, got {temperature}")));
        }
        let mut dims = vec![inputs];
        dims.extend_from_slice(hidden);
        dims.push(head.output_width(&basis));
        let last = dims.len() - 2;
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(q, d)| {
                let std = if q == last {
                    temperature * (1.0 / d[0] as f64).sqrt()
                } else {
                    (2.0 / d[0] as f64).sqrt()
                };
                DenseLayer::init(d[0], d[1], std, rng)
            })
            .collect();
        let net = Self {
            layers,
            temperature,
            head,
            basis,
            input_gain,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn from_layers(layers: Vec<DenseLayer>, basis: SpectrumBasis, head: HeadMode, temperature: f64, input_gain: f64) -> Result<Self> {
        let net = Self {
            layers,
            temperature,
            head,
            basis,
            input_gain,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Dimension("readout needs at least one layer".into()));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!("temperature must be positive, got {}", self.temperature)));
        }
        for (q, l) in self.layers.iter().enumerate() {
            if l.weights.len() != l.inputs * l.outputs || l.bias.len() != l.outputs {
                return Err(Error::Dimension(format!("layer {q} tensors do not match {}x{}", l.outputs, l.inputs)));
            }
        }
        for (q, pair) in self.layers.windows(2).enumerate() {
            if pair[0].outputs != pair[1].inputs {
                return Err(Error::Dimension(format!(
                    "layer {q} emits {} values but layer {} takes {}",
                    pair[0].outputs,
                    q + 1,
                    pair[1].inputs
                )));
            }
        }
        let want = self.head.output_width(&self.basis);
        let got = self.layers.last().map(|l| l.outputs).unwrap_or(0);
        if got != want {
            return Err(Error::Dimension(format!("head emits {got} values, mode needs {want}")));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Final pre-activation `z_N`, and the hidden activations when tracing.
    pub fn forward_readout(&self, detector: &[f64], trace: bool) -> Result<(Vec<f64>, Option<ReadoutTrace>)> {
        if detector.len() != self.input_dim() {
            return Err(Error::Dimension(format!(
                "detector image has {} pixels, readout expects {}",
                detector.len(),
                self.input_dim()
            )));
        }
        let mut a: Vec<f64> = detector.iter().map(|v| v * self.input_gain).collect();
        let mut acts = Vec::new();
        let mut pres = Vec::new();
        let last = self.layers.len() - 1;
        for (q, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(&a);
            let next = if q == last { z.clone() } else { z.iter().map(|v| relu(*v)).collect() };
            if trace {
                acts.push(std::mem::replace(&mut a, next));
                pres.push(z);
            } else {
                a = next;
            }
        }
        Ok((a, trace.then_some(ReadoutTrace { act: acts, pre: pres })))
    }

    /// Splits `z_N` into the softmax spectrum and (complex mode) the raw phase angles.
    pub fn head_output(&self, z: &[f64]) -> Result<HeadOutput> {
        let k = self.basis.count();
        if z.len() != self.head.output_width(&self.basis) {
            return Err(Error::Dimension(format!("head input has {} values", z.len())));
        }
        let weights = temperature_softmax(&z[..k], self.temperature)?;
        let raw_phases = match self.head {
            HeadMode::Power => None,
            HeadMode::Complex => Some((0..k).map(|i| z[k + 2 * i + 1].atan2(z[k + 2 * i])).collect()),
        };
        Ok(HeadOutput { weights, raw_phases })
    }

    pub fn forward_power(&self, detector: &[f64]) -> Result<OamSpectrum> {
        let (z, _) = self.forward_readout(detector, false)?;
        let out = self.head_output(&z)?;
        Ok(OamSpectrum {
            basis: self.basis,
            weights: out.weights,
        })
    }

    pub fn forward_complex(&self, detector: &[f64]) -> Result<ComplexSpectrum> {
        if self.head != HeadMode::Complex {
            return Err(Error::InvalidParameter("readout is not in complex mode".into()));
        }
        let (z, _) = self.forward_readout(detector, false)?;
        self.complex_from_head(&self.head_output(&z)?)
    }

    pub fn complex_from_head(&self, out: &HeadOutput) -> Result<ComplexSpectrum> {
        let raw = out
            .raw_phases
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("readout is not in complex mode".into()))?;
        let amplitudes: Vec<f64> = out.weights.iter().map(|w| w.sqrt()).collect();
        let norm: f64 = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        ComplexSpectrum::new(self.basis, amplitudes, raw.iter().map(|p| wrap_phase(*p)).collect())
    }
}
