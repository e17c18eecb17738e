//! Model checkpoints: `model.json` for architecture and hyperparameters plus
//! `model.tensors` for the trainable values (stored as f32).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tensors::{decode_tensors, encode_tensors, Tensor};
use crate::error::{Error, Result};
use crate::model::{HybridModel, ModelConfig};
use crate::optics::OpticalStack;
use crate::readout::{DenseLayer, ReadoutNetwork};

pub const CHECKPOINT_FORMAT: &str = "oamnet-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointMeta {
    pub format: String,
    pub version: u32,
    pub model: ModelConfig,
    pub input_gain: f64,
    pub seed: u64,
    pub epoch: Option<usize>,
}

/// Architecture description of an existing model.
pub fn model_config(model: &HybridModel) -> ModelConfig {
    let r = &model.readout;
    let first = &model.stack.layers[0];
    ModelConfig {
        n: model.grid().n,
        pitch: model.grid().pitch,
        layers: model.stack.depth(),
        hop: model.stack.hop.distance,
        pad_factor: model.stack.hop.pad_factor,
        alpha: first.alpha,
        beta: first.beta,
        hidden: r.layers[..r.layers.len() - 1].iter().map(|l| l.outputs).collect(),
        k_n: r.basis.k_n,
        k_p: r.basis.k_p,
        head: r.head,
        temperature: r.temperature,
    }
}

pub fn model_tensors(model: &HybridModel) -> Vec<Tensor> {
    let n = model.grid().n;
    let mut out: Vec<Tensor> = model
        .stack
        .layers
        .iter()
        .enumerate()
        .map(|(p, l)| Tensor {
            name: format!("theta.{p}"),
            dims: vec![n, n],
            data: l.theta.clone(),
        })
        .collect();
    for (q, l) in model.readout.layers.iter().enumerate() {
        out.push(Tensor {
            name: format!("weight.{q}"),
            dims: vec![l.outputs, l.inputs],
            data: l.weights.clone(),
        });
        out.push(Tensor {
            name: format!("bias.{q}"),
            dims: vec![l.outputs],
            data: l.bias.clone(),
        });
    }
    out
}

pub fn save_checkpoint(dir: impl AsRef<Path>, model: &HybridModel, seed: u64, epoch: Option<usize>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let meta = CheckpointMeta {
        format: CHECKPOINT_FORMAT.into(),
        version: CHECKPOINT_VERSION,
        model: model_config(model),
        input_gain: model.readout.input_gain,
        seed,
        epoch,
    };
    fs::write(dir.join("model.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
    fs::write(dir.join("model.tensors"), encode_tensors(&model_tensors(model))?)?;
    Ok(())
}

pub fn load_checkpoint(dir: impl AsRef<Path>) -> Result<(HybridModel, CheckpointMeta)> {
    let dir = dir.as_ref();
    let meta: CheckpointMeta = serde_json::from_slice(&fs::read(dir.join("model.json"))?)?;
    if meta.format != CHECKPOINT_FORMAT || meta.version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!("unsupported checkpoint {} v{}", meta.format, meta.version)));
    }
    let tensors = decode_tensors(&fs::read(dir.join("model.tensors"))?)?;
    let cfg = &meta.model;
    let grid = cfg.grid()?;
    let mut stack = OpticalStack::new(grid, cfg.layers, cfg.hop, cfg.pad_factor, cfg.alpha, cfg.beta)?;
    let find = |name: &str, dims: &[usize]| -> Result<Vec<f64>> {
        let t = tensors
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| Error::Format(format!("checkpoint lacks tensor {name}")))?;
        if t.dims != dims {
            return Err(Error::Format(format!("tensor {name} has dims {:?}, expected {dims:?}", t.dims)));
        }
        Ok(t.data.clone())
    };
    for (p, l) in stack.layers.iter_mut().enumerate() {
        l.theta = find(&format!("theta.{p}"), &[grid.n, grid.n])?;
    }
    let basis = cfg.basis()?;
    let mut dims = vec![grid.len()];
    dims.extend_from_slice(&cfg.hidden);
    dims.push(cfg.head.output_width(&basis));
    let layers = dims
        .windows(2)
        .enumerate()
        .map(|(q, d)| {
            Ok(DenseLayer {
                inputs: d[0],
                outputs: d[1],
                weights: find(&format!("weight.{q}"), &[d[1], d[0]])?,
                bias: find(&format!("bias.{q}"), &[d[1]])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if tensors.len() != cfg.layers + 2 * layers.len() {
        return Err(Error::Format(format!(
            "checkpoint holds {} tensors, architecture needs {}",
            tensors.len(),
            cfg.layers + 2 * layers.len()
        )));
    }
    let readout = ReadoutNetwork::from_layers(layers, basis, cfg.head, cfg.temperature, meta.input_gain)?;
    Ok((HybridModel::from_parts(stack, readout)?, meta))
}

/// Rounds every parameter through f32, matching what a checkpoint stores.
pub fn quantize_like_checkpoint(model: &mut HybridModel) {
    let round = |v: &mut f64| *v = *v as f32 as f64;
    model.stack.layers.iter_mut().flat_map(|l| l.theta.iter_mut()).for_each(round);
    for l in &mut model.readout.layers {
        l.weights.iter_mut().chain(l.bias.iter_mut()).for_each(round);
    }
}
