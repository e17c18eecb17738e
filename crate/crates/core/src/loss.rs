//! Training objective: spectrum MSE, optional intermodal-phase term and L2 penalty.

use crate::backprop::HeadGradient;
use crate::error::{Error, Result};
use crate::readout::{HeadMode, HeadOutput};
use crate::spectrum::{wrap_phase, ComplexSpectrum};

/// Mean squared difference over entries.
pub fn mse(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Dimension(format!("cannot compare vectors of length {} and {}", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64)
}

/// Per-sample data loss and its gradient with respect to the head outputs.
///
/// In complex mode the predicted phases are taken relative to the label's
/// reference charge and scored with `sum w (1 - cos(dphi))`.
pub fn data_loss(pred: &HeadOutput, label: &ComplexSpectrum, mode: HeadMode) -> Result<(f64, HeadGradient)> {
    let target = label.power_spectrum().weights;
    let k = target.len();
    let value = mse(&pred.weights, &target)?;
    let weights = pred.weights.iter().zip(&target).map(|(p, t)| 2.0 * (p - t) / k as f64).collect();
    if mode == HeadMode::Power {
        return Ok((value, HeadGradient { weights, phases: None }));
    }
    let raw = pred
        .raw_phases
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("complex loss needs phase outputs".into()))?;
    let r = ComplexSpectrum::reference_index(&label.basis, &label.amplitudes);
    let mut phase_loss = 0.0;
    let mut phases = vec![0.0; k];
    for i in 0..k {
        if i == r || target[i] == 0.0 {
            continue;
        }
        let d = wrap_phase(raw[i] - raw[r] - label.phases[i]);
        phase_loss += target[i] * (1.0 - d.cos());
        let s = target[i] * d.sin();
        phases[i] += s;
        phases[r] -= s;
    }
    Ok((
        value + phase_loss,
        HeadGradient {
            weights,
            phases: Some(phases),
        },
    ))
}

/// Batch objective: mean per-sample data loss plus `c * ||params||^2`.
pub fn compute_loss(preds: &[HeadOutput], labels: &[ComplexSpectrum], squared_norm: f64, c: f64, mode: HeadMode) -> Result<f64> {
    if preds.len() != labels.len() || preds.is_empty() {
        return Err(Error::Dimension(format!("{} predictions for {} labels", preds.len(), labels.len())));
    }
    let mut total = 0.0;
    for (p, l) in preds.iter().zip(labels) {
        total += data_loss(p, l, mode)?.0;
    }
    Ok(total / preds.len() as f64 + c * squared_norm)
}
