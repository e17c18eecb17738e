//! Mini-batch training loop, evaluation metrics and the temperature sweep.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::Sample;
use super::optimizer::{learning_rate, Adam};
use crate::error::{Error, Result};
use crate::loss::{data_loss, mse};
use crate::model::{HybridModel, ModelConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Multiplies the learning rate of the diffractive layers.
    pub optical_lr_scale: f64,
    pub lr_decay: f64,
    pub lr_period: usize,
    /// L2 constant `C`.
    pub l2: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 60,
            batch_size: 32,
            learning_rate: 2e-4,
            optical_lr_scale: 1.0,
            lr_decay: 0.5,
            lr_period: 15,
            l2: 1e-6,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.epochs > 0
            && self.batch_size > 0
            && self.learning_rate > 0.0
            && self.optical_lr_scale >= 0.0
            && self.lr_decay > 0.0
            && self.lr_period >= 1
            && self.l2 >= 0.0;
        if !positive {
            return Err(Error::InvalidParameter(format!("invalid training configuration {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Epoch 0 is the untrained model.
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub wall_clock_s: f64,
}

/// Parameter tensors in a fixed order: every theta, then `W_q, B_q` per layer.
fn tensors(model: &mut HybridModel) -> Vec<&mut [f64]> {
    let mut out: Vec<&mut [f64]> = model.stack.layers.iter_mut().map(|l| l.theta.as_mut_slice()).collect();
    for l in &mut model.readout.layers {
        out.push(l.weights.as_mut_slice());
        out.push(l.bias.as_mut_slice());
    }
    out
}

fn tensor_shapes(model: &HybridModel) -> Vec<usize> {
    let mut out: Vec<usize> = model.stack.layers.iter().map(|l| l.theta.len()).collect();
    for l in &model.readout.layers {
        out.push(l.weights.len());
        out.push(l.bias.len());
    }
    out
}

/// Mean data loss over the batch and the gradient of `mean + c ||params||^2`.
/// Sums run in sample order so the result does not depend on thread count.
pub fn batch_gradient(model: &HybridModel, batch: &[&Sample], c: f64) -> Result<(f64, Vec<Vec<f64>>)> {
    let head = model.readout.head;
    let per_sample = batch
        .par_iter()
        .map(|s| {
            let (out, trace) = model.forward_trace(&s.field)?;
            let (loss, grad) = data_loss(&out, &s.label, head)?;
            let bundle = model.backward_partial(&trace, &grad)?;
            Ok((loss, bundle.electronic.deltas, trace.readout.act, bundle.optical.d_theta))
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = 1.0 / batch.len() as f64;
    let loss = per_sample.iter().map(|s| s.0).sum::<f64>() * scale;
    let mut grads = Vec::new();
    for (p, layer) in model.stack.layers.iter().enumerate() {
        let mut g = vec![0.0; layer.theta.len()];
        for s in &per_sample {
            g.iter_mut().zip(&s.3[p]).for_each(|(a, b)| *a += b);
        }
        g.iter_mut().zip(&layer.theta).for_each(|(a, t)| *a = *a * scale + 2.0 * c * t);
        grads.push(g);
    }
    for (q, layer) in model.readout.layers.iter().enumerate() {
        let cols = layer.inputs;
        let mut dw = vec![0.0; layer.weights.len()];
        dw.par_chunks_mut(cols).enumerate().for_each(|(r, row)| {
            for s in &per_sample {
                let d = s.1[q][r];
                if d != 0.0 {
                    row.iter_mut().zip(&s.2[q]).for_each(|(a, x)| *a += d * x);
                }
            }
        });
        dw.iter_mut().zip(&layer.weights).for_each(|(a, w)| *a = *a * scale + 2.0 * c * w);
        let mut db = vec![0.0; layer.outputs];
        for s in &per_sample {
            db.iter_mut().zip(&s.1[q]).for_each(|(a, b)| *a += b);
        }
        db.iter_mut().zip(&layer.bias).for_each(|(a, b)| *a = *a * scale + 2.0 * c * b);
        grads.push(dw);
        grads.push(db);
    }
    Ok((loss, grads))
}

/// Mean per-sample data loss.
pub fn mean_loss(model: &HybridModel, samples: &[&Sample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("empty evaluation set".into()));
    }
    let losses = samples
        .par_iter()
        .map(|s| Ok(data_loss(&model.predict(&s.field)?, &s.label, model.readout.head)?.0))
        .collect::<Result<Vec<f64>>>()?;
    Ok(losses.iter().sum::<f64>() / losses.len() as f64)
}

/// Trains in place and leaves the best-validation parameters in `model`.
///
/// On a non-finite loss the model keeps the last finite parameters and
/// [`Error::NonFinite`] is returned.
pub fn train(
    model: &mut HybridModel,
    cfg: &TrainConfig,
    train_set: &[&Sample],
    val_set: &[&Sample],
    mut on_epoch: impl FnMut(&EpochRecord, &HybridModel) -> Result<()>,
) -> Result<TrainReport> {
    cfg.validate()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::InvalidParameter("training and validation splits must be non-empty".into()));
    }
    let start = Instant::now();
    let mut adam = Adam::new(&tensor_shapes(model));
    let optical_tensors = model.stack.layers.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..train_set.len()).collect();

    let initial = EpochRecord {
        epoch: 0,
        train_loss: mean_loss(model, train_set)?,
        val_loss: mean_loss(model, val_set)?,
        learning_rate: cfg.learning_rate,
    };
    on_epoch(&initial, model)?;
    let mut best = (0usize, initial.val_loss, model.clone());
    let mut records = vec![initial];

    for epoch in 1..=cfg.epochs {
        let lr = learning_rate(cfg.learning_rate, cfg.lr_decay, cfg.lr_period, epoch - 1);
        let lrs: Vec<f64> = (0..adam_len(model))
            .map(|t| if t < optical_tensors { lr * cfg.optical_lr_scale } else { lr })
            .collect();
        order.shuffle(&mut rng);
        let mut total = 0.0;
        let mut count = 0usize;
        for (step, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let batch: Vec<&Sample> = chunk.iter().map(|&i| train_set[i]).collect();
            let (loss, grads) = batch_gradient(model, &batch, cfg.l2)?;
            if !loss.is_finite() || grads.iter().flatten().any(|g| !g.is_finite()) {
                return Err(Error::NonFinite { epoch, step });
            }
            adam.update(&mut tensors(model), &grads, &lrs);
            total += loss * batch.len() as f64;
            count += batch.len();
        }
        let val_loss = mean_loss(model, val_set)?;
        if !val_loss.is_finite() {
            return Err(Error::NonFinite {
                epoch,
                step: order.len().div_ceil(cfg.batch_size),
            });
        }
        let rec = EpochRecord {
            epoch,
            train_loss: total / count as f64,
            val_loss,
            learning_rate: lr,
        };
        log::info!("epoch {epoch}: train {:.3e} val {:.3e} lr {:.2e}", rec.train_loss, rec.val_loss, lr);
        on_epoch(&rec, model)?;
        if val_loss < best.1 {
            best = (epoch, val_loss, model.clone());
        }
        records.push(rec);
    }
    let (best_epoch, best_val_loss, best_model) = best;
    *model = best_model;
    Ok(TrainReport {
        epochs: records,
        best_epoch,
        best_val_loss,
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

fn adam_len(model: &HybridModel) -> usize {
    model.stack.layers.len() + 2 * model.readout.layers.len()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub count: usize,
    pub mean_mse: f64,
    /// Mean R^2 over samples whose label is not constant.
    pub mean_r2: Option<f64>,
    pub r2_undefined: usize,
    pub per_sample_mse: Vec<f64>,
}

/// `1 - SS_res / SS_tot` about the label's own mean; `None` for a constant label.
pub fn r_squared(pred: &[f64], label: &[f64]) -> Option<f64> {
    let mean = label.iter().sum::<f64>() / label.len() as f64;
    let ss_tot: f64 = label.iter().map(|t| (t - mean) * (t - mean)).sum();
    if ss_tot <= 1e-15 {
        return None;
    }
    let ss_res: f64 = pred.iter().zip(label).map(|(p, t)| (p - t) * (p - t)).sum();
    Some(1.0 - ss_res / ss_tot)
}

pub fn evaluate(model: &HybridModel, samples: &[&Sample]) -> Result<EvalReport> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("empty evaluation set".into()));
    }
    if samples[0].label.basis != model.basis() {
        return Err(Error::Dimension("dataset basis differs from the model basis".into()));
    }
    let rows = samples
        .par_iter()
        .map(|s| {
            let pred = model.predict(&s.field)?.weights;
            let truth = s.label.power_spectrum().weights;
            Ok((mse(&pred, &truth)?, r_squared(&pred, &truth)))
        })
        .collect::<Result<Vec<_>>>()?;
    let per_sample_mse: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let r2: Vec<f64> = rows.iter().filter_map(|r| r.1).collect();
    Ok(EvalReport {
        count: rows.len(),
        mean_mse: per_sample_mse.iter().sum::<f64>() / rows.len() as f64,
        mean_r2: (!r2.is_empty()).then(|| r2.iter().sum::<f64>() / r2.len() as f64),
        r2_undefined: rows.len() - r2.len(),
        per_sample_mse,
    })
}

/// MSE of always predicting the mean training label, a floor any useful model beats.
pub fn mean_predictor_mse(train_set: &[&Sample], eval_set: &[&Sample]) -> Result<f64> {
    let k = train_set
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty training set".into()))?
        .label
        .basis
        .count();
    let mut mean = vec![0.0; k];
    for s in train_set {
        mean.iter_mut().zip(s.label.power_spectrum().weights).for_each(|(m, w)| *m += w);
    }
    mean.iter_mut().for_each(|m| *m /= train_set.len() as f64);
    let mut total = 0.0;
    for s in eval_set {
        total += mse(&mean, &s.label.power_spectrum().weights)?;
    }
    Ok(total / eval_set.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub temperature: f64,
    pub converged: bool,
    pub degraded: bool,
    pub best_epoch: usize,
    pub val_mse: f64,
    pub mixed_mse: f64,
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count).map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64)).collect()
}

/// One model per temperature. A run counts as converged when its validation
/// MSE is below half the mean-predictor MSE; it is degraded when it did not
/// converge or its mixed-set MSE exceeds twice the sweep minimum.
pub fn temperature_sweep(
    model_cfg: &ModelConfig,
    train_cfg: &TrainConfig,
    temperatures: &[f64],
    train_set: &[&Sample],
    val_set: &[&Sample],
    mixed_set: &[&Sample],
) -> Result<Vec<SweepRow>> {
    let baseline = mean_predictor_mse(train_set, val_set)?;
    let mut rows = Vec::new();
    for &t in temperatures {
        let cfg = ModelConfig {
            temperature: t,
            ..model_cfg.clone()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(train_cfg.seed);
        let mut model = HybridModel::new(&cfg, &mut rng)?;
        let outcome = train(&mut model, train_cfg, train_set, val_set, |_, _| Ok(()));
        let (best_epoch, finite) = match outcome {
            Ok(r) => (r.best_epoch, true),
            Err(Error::NonFinite { .. }) => (0, false),
            Err(e) => return Err(e),
        };
        let val_mse = evaluate(&model, val_set)?.mean_mse;
        let mixed_mse = evaluate(&model, mixed_set)?.mean_mse;
        let converged = finite && val_mse.is_finite() && val_mse < 0.5 * baseline;
        log::info!("temperature {t:.4}: val {val_mse:.3e} mixed {mixed_mse:.3e} converged {converged}");
        rows.push(SweepRow {
            temperature: t,
            converged,
            degraded: false,
            best_epoch,
            val_mse,
            mixed_mse,
        });
    }
    let best = rows.iter().filter(|r| r.converged).map(|r| r.mixed_mse).fold(f64::INFINITY, f64::min);
    for r in &mut rows {
        r.degraded = !r.converged || r.mixed_mse > 2.0 * best;
    }
    Ok(rows)
}
