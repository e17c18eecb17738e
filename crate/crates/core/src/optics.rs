//! The optical half of the processor: cascaded phase-only diffractive layers
//! separated by free-space hops, followed by square-law detection.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};
use crate::propagation::PropagationOperator;

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_BETA: f64 = 3.0;
pub const DEFAULT_HOP: f64 = 40.0;
pub const DEFAULT_LAYERS: usize = 5;

/// One programmable phase mask. The applied phase is
/// `phi = alpha * pi * (sin(beta * theta) + 1)`, always within `[0, 2 alpha pi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffractiveLayer {
    pub theta: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl DiffractiveLayer {
    /// Layer with `theta = 0`, i.e. a uniform phase of `alpha * pi`.
    pub fn new(grid: &GridSpec, alpha: f64, beta: f64) -> Self {
        Self {
            theta: vec![0.0; grid.len()],
            alpha,
            beta,
        }
    }

    #[inline]
    pub fn phase_at(&self, i: usize) -> f64 {
        self.alpha * PI * ((self.beta * self.theta[i]).sin() + 1.0)
    }

    /// d(phi)/d(theta) at sample `i`.
    #[inline]
    pub fn phase_slope_at(&self, i: usize) -> f64 {
        self.alpha * self.beta * PI * (self.beta * self.theta[i]).cos()
    }

    pub fn phases(&self) -> Vec<f64> {
        (0..self.theta.len()).map(|i| self.phase_at(i)).collect()
    }

    /// Unit-modulus transmission `T = exp(i phi)`.
    pub fn transmission(&self) -> Vec<Complex64> {
        (0..self.theta.len()).map(|i| Complex64::from_polar(1.0, self.phase_at(i))).collect()
    }
}

/// Multiplies a field by the layer transmission.
pub fn layer_modulate(field: &ComplexField, layer: &DiffractiveLayer) -> Result<ComplexField> {
    if layer.theta.len() != field.samples.len() {
        return Err(Error::Dimension(format!(
            "layer has {} nodes, field has {} samples",
            layer.theta.len(),
            field.samples.len()
        )));
    }
    let samples = field
        .samples
        .iter()
        .enumerate()
        .map(|(i, e)| e * Complex64::from_polar(1.0, layer.phase_at(i)))
        .collect();
    Ok(ComplexField {
        grid: field.grid,
        samples,
        z: field.z,
    })
}

/// Square-law detector output `|E|^2`, one value per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorImage {
    pub grid: GridSpec,
    pub data: Vec<f64>,
}

impl DetectorImage {
    /// `sum A * pitch^2`, equal to the detected field's power.
    pub fn energy(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.grid.pitch * self.grid.pitch
    }
}

pub fn detect(field: &ComplexField) -> DetectorImage {
    DetectorImage {
        grid: field.grid,
        data: field.samples.iter().map(|e| e.norm_sqr()).collect(),
    }
}

/// Intermediate fields of one forward pass, kept for the reverse sweep.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    /// Field arriving at layer p, before modulation.
    pub pre: Vec<Vec<Complex64>>,
    /// Field leaving layer p, after modulation.
    pub post: Vec<Vec<Complex64>>,
    /// Field at the detector plane.
    pub output: Vec<Complex64>,
    pub detector: DetectorImage,
}

/// `M` layers sharing one hop distance: input -> L1 -> ... -> LM -> detector.
#[derive(Debug, Clone)]
pub struct OpticalStack {
    pub grid: GridSpec,
    pub layers: Vec<DiffractiveLayer>,
    pub hop: PropagationOperator,
}

impl OpticalStack {
    pub fn new(grid: GridSpec, layers: usize, hop_distance: f64, pad_factor: usize, alpha: f64, beta: f64) -> Result<Self> {
        if layers == 0 {
            return Err(Error::InvalidParameter("an optical stack needs at least one layer".into()));
        }
        let hop = PropagationOperator::new(grid, hop_distance, pad_factor)?;
        let layers = (0..layers).map(|_| DiffractiveLayer::new(&grid, alpha, beta)).collect();
        Ok(Self { grid, layers, hop })
    }

    pub fn from_layers(grid: GridSpec, layers: Vec<DiffractiveLayer>, hop: PropagationOperator) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidParameter("an optical stack needs at least one layer".into()));
        }
        grid.ensure_same(&hop.grid)?;
        if let Some(bad) = layers.iter().find(|l| l.theta.len() != grid.len()) {
            return Err(Error::Dimension(format!(
                "layer with {} nodes on a {}-sample grid",
                bad.theta.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, layers, hop })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Detector-plane field `D (prod diag(T_p) D) E0`, plus the trace when requested.
    pub fn forward(&self, e0: &ComplexField, keep_trace: bool) -> Result<(ComplexField, Option<ForwardTrace>)> {
        self.grid.ensure_same(&e0.grid)?;
        let mut pre = Vec::new();
        let mut post = Vec::new();
        let mut current = e0.samples.clone();
        for layer in &self.layers {
            let arriving = self.hop.apply(&current, false);
            let leaving: Vec<Complex64> = arriving
                .iter()
                .enumerate()
                .map(|(i, e)| e * Complex64::from_polar(1.0, layer.phase_at(i)))
                .collect();
            if keep_trace {
                pre.push(arriving);
                post.push(leaving.clone());
            }
            current = leaving;
        }
        let output = self.hop.apply(&current, false);
        let z = e0.z + self.hop.distance * (self.layers.len() + 1) as f64;
        let field = ComplexField {
            grid: self.grid,
            samples: output,
            z,
        };
        let trace = keep_trace.then(|| ForwardTrace {
            pre,
            post,
            output: field.samples.clone(),
            detector: detect(&field),
        });
        Ok((field, trace))
    }
}
